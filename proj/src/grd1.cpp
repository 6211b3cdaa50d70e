#include "seatrend/grd1.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "seatrend/errors.hpp"

namespace seatrend {

namespace {

static_assert(std::endian::native == std::endian::little,
              "GRD1 writer assumes a little-endian host");

constexpr char kMagic[4] = {'G', 'R', 'D', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 63;

template <typename T>
void put(std::string& buf, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& off) {
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

bool is_fill(double v, double fill) {
    return std::isnan(fill) ? std::isnan(v) : v == fill;
}

} // namespace

OceanMask Grd1Data::infer_mask() const {
    OceanMask m{grid, std::vector<std::uint8_t>(grid.cells(), 0)};
    for (int j = 0; j < grid.n_lat; ++j) {
        for (int i = 0; i < grid.n_lon; ++i) {
            const bool first = is_fill(at(0, j, i), fill_value);
            for (int t = 1; t < n_time; ++t)
                if (is_fill(at(t, j, i), fill_value) != first)
                    throw DataError("grd1: mask changes across time at cell (" +
                                    std::to_string(j) + ", " + std::to_string(i) + ")");
            m.mask[grid.cell_index(j, i)] = first ? 0 : 1;
        }
    }
    return m;
}

Field Grd1Data::as_field() const {
    if (n_time != 1) throw ArgumentError("grd1: as_field requires a single time slice");
    const OceanMask m = infer_mask();
    Field f{grid, std::vector<double>(grid.cells(), kMissing)};
    for (int j = 0; j < grid.n_lat; ++j)
        for (int i = 0; i < grid.n_lon; ++i)
            if (m.ocean(j, i)) f.at(j, i) = at(0, j, i);
    return f;
}

TimeSeriesStack Grd1Data::as_stack() const {
    const OceanMask m = infer_mask();
    TimeSeriesStack s;
    s.mask = m;
    s.n_months = n_time;
    s.start_year = start_year;
    s.values.resize(m.ocean_count() * static_cast<std::size_t>(n_time));
    std::size_t p = 0;
    for (int j = 0; j < grid.n_lat; ++j)
        for (int i = 0; i < grid.n_lon; ++i) {
            if (!m.ocean(j, i)) continue;
            for (int t = 0; t < n_time; ++t) s.at(p, t) = at(t, j, i);
            ++p;
        }
    return s;
}

Grd1Data from_field(const Field& f, const OceanMask& mask) {
    if (f.grid != mask.grid) throw ArgumentError("from_field: field/mask grids differ");
    Grd1Data d;
    d.grid = f.grid;
    d.n_time = 1;
    d.values.assign(f.grid.cells(), d.fill_value);
    for (int j = 0; j < f.grid.n_lat; ++j)
        for (int i = 0; i < f.grid.n_lon; ++i)
            if (mask.ocean(j, i)) d.at(0, j, i) = f.at(j, i);
    return d;
}

Grd1Data from_stack(const TimeSeriesStack& stack) {
    Grd1Data d;
    d.grid = stack.mask.grid;
    d.n_time = stack.n_months;
    d.start_year = stack.start_year;
    d.values.assign(d.grid.cells() * static_cast<std::size_t>(d.n_time), d.fill_value);
    std::size_t p = 0;
    for (int j = 0; j < d.grid.n_lat; ++j)
        for (int i = 0; i < d.grid.n_lon; ++i) {
            if (!stack.mask.ocean(j, i)) continue;
            for (int t = 0; t < d.n_time; ++t) d.at(t, j, i) = stack.at(p, t);
            ++p;
        }
    return d;
}

void write_grd1(const Grd1Data& data, const std::filesystem::path& path) {
    validate(data.grid);
    if (data.n_time < 1) throw ArgumentError("write_grd1: n_time must be >= 1");
    const std::size_t expect =
        data.grid.cells() * static_cast<std::size_t>(data.n_time);
    if (data.values.size() != expect)
        throw ArgumentError("write_grd1: payload size does not match header");
    if (data.start_month < 1 || data.start_month > 12)
        throw ArgumentError("write_grd1: start month must be 1..12");

    std::string buf;
    buf.reserve(kHeaderBytes + expect * sizeof(double));
    buf.append(kMagic, 4);
    put<std::uint16_t>(buf, kVersion);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(data.grid.n_lon));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(data.grid.n_lat));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(data.n_time));
    put<double>(buf, data.grid.lon0);
    put<double>(buf, data.grid.lat0);
    put<double>(buf, data.grid.d_lon);
    put<double>(buf, data.grid.d_lat);
    put<double>(buf, data.fill_value);
    put<std::int32_t>(buf, static_cast<std::int32_t>(data.start_year));
    put<std::uint8_t>(buf, static_cast<std::uint8_t>(data.start_month));
    // NaN in memory stands for missing; map it to the declared fill on disk
    // (unless the fill itself is NaN, where bytes pass through untouched)
    const bool nan_fill = std::isnan(data.fill_value);
    for (double v : data.values)
        put<double>(buf, (std::isnan(v) && !nan_fill) ? data.fill_value : v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("write_grd1: cannot open " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError("write_grd1: short write to " + path.string());
}

Grd1Data read_grd1(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("read_grd1: cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < kHeaderBytes)
        throw FormatError("read_grd1: file shorter than header (" +
                          std::to_string(buf.size()) + " bytes)");
    if (std::memcmp(buf.data(), kMagic, 4) != 0)
        throw FormatError("read_grd1: bad magic in " + path.string());

    std::size_t off = 4;
    const auto version = take<std::uint16_t>(buf, off);
    if (version != kVersion)
        throw FormatError("read_grd1: unsupported version " + std::to_string(version));

    Grd1Data d;
    d.grid.n_lon = static_cast<int>(take<std::uint32_t>(buf, off));
    d.grid.n_lat = static_cast<int>(take<std::uint32_t>(buf, off));
    d.n_time = static_cast<int>(take<std::uint32_t>(buf, off));
    d.grid.lon0 = take<double>(buf, off);
    d.grid.lat0 = take<double>(buf, off);
    d.grid.d_lon = take<double>(buf, off);
    d.grid.d_lat = take<double>(buf, off);
    d.fill_value = take<double>(buf, off);
    d.start_year = static_cast<int>(take<std::int32_t>(buf, off));
    d.start_month = static_cast<int>(take<std::uint8_t>(buf, off));

    try {
        validate(d.grid);
    } catch (const ArgumentError& e) {
        throw FormatError("read_grd1: bad grid geometry: " + std::string(e.what()));
    }
    if (d.n_time < 1) throw FormatError("read_grd1: n_time must be >= 1");
    if (d.start_month < 1 || d.start_month > 12)
        throw FormatError("read_grd1: start month out of range");

    const std::size_t n =
        d.grid.cells() * static_cast<std::size_t>(d.n_time);
    const std::size_t expect = kHeaderBytes + n * sizeof(double);
    if (buf.size() != expect)
        throw FormatError("read_grd1: expected " + std::to_string(expect) + " bytes, found " +
                          std::to_string(buf.size()));

    d.values.resize(n);
    std::memcpy(d.values.data(), buf.data() + kHeaderBytes, n * sizeof(double));
    return d;
}

} // namespace seatrend
