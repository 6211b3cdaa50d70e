#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "seatrend/errors.hpp"

namespace seatrend {

// RFC 4180 quoting: fields containing commas, quotes, or line breaks are
// wrapped in double quotes, with embedded quotes doubled.
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
        if (!out_) throw FormatError("csv: cannot open " + path.string());
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_escape(fields[i]);
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

// Fixed 17-significant-digit formatting so identical runs produce identical
// bytes and values survive a parse round trip.
std::string csv_num(double v);
std::string csv_num(long long v);

} // namespace seatrend
