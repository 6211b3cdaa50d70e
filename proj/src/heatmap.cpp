#include "seatrend/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "seatrend/errors.hpp"

namespace seatrend {

namespace {

struct Range {
    double lo = 0.0, hi = 0.0;
};

Range ocean_range(const Field& f, const OceanMask& mask) {
    Range r{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
    bool any = false;
    for (std::size_t c = 0; c < f.values.size(); ++c) {
        if (!mask.mask[c]) continue;
        r.lo = std::min(r.lo, f.values[c]);
        r.hi = std::max(r.hi, f.values[c]);
        any = true;
    }
    if (!any) throw ArgumentError("heatmap: mask has no ocean cells");
    if (r.hi == r.lo) r.hi = r.lo + 1.0; // constant field still maps somewhere
    return r;
}

// Rows are written north to south so the image reads like a map.
void write_pnm(std::ofstream& out, const std::string& magic, int w, int h, int maxval,
               const std::string& comment) {
    out << magic << "\n" << comment << w << " " << h << "\n" << maxval << "\n";
}

} // namespace

void write_heatmap_pgm(const Field& f, const OceanMask& mask,
                       const std::filesystem::path& path) {
    if (f.grid != mask.grid) throw ArgumentError("heatmap: field/mask grids differ");
    const Range r = ocean_range(f, mask);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("heatmap: cannot open " + path.string());

    std::ostringstream comment;
    comment.precision(17);
    comment << "# linear value map: gray = 1 + round((v - lo)/(hi - lo)*65534); gray 0 = land\n"
            << "# vmin " << r.lo << " vmax " << r.hi << "\n";
    write_pnm(out, "P5", f.grid.n_lon, f.grid.n_lat, 65535, comment.str());

    const double scale = 65534.0 / (r.hi - r.lo);
    for (int j = f.grid.n_lat - 1; j >= 0; --j) {
        for (int i = 0; i < f.grid.n_lon; ++i) {
            std::uint16_t g = 0;
            if (mask.ocean(j, i))
                g = static_cast<std::uint16_t>(
                    1 + std::lround((f.at(j, i) - r.lo) * scale));
            // PNM 16-bit samples are big-endian
            out.put(static_cast<char>(g >> 8));
            out.put(static_cast<char>(g & 0xff));
        }
    }
}

Field read_heatmap_pgm(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("heatmap: cannot open " + path.string());

    std::string magic;
    in >> magic;
    if (magic != "P5") throw FormatError("heatmap: not a P5 PGM");
    in.ignore(); // newline after magic

    double vmin = 0.0, vmax = 1.0;
    std::string line;
    while (in.peek() == '#') {
        std::getline(in, line);
        const auto pos_min = line.find("vmin ");
        const auto pos_max = line.find("vmax ");
        if (pos_min != std::string::npos && pos_max != std::string::npos) {
            vmin = std::stod(line.substr(pos_min + 5));
            vmax = std::stod(line.substr(pos_max + 5));
        }
    }
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    in.ignore();
    if (w != grid.n_lon || h != grid.n_lat)
        throw FormatError("heatmap: image size does not match grid");
    if (maxval != 65535) throw FormatError("heatmap: expected 16-bit samples");

    Field f{grid, std::vector<double>(grid.cells(), kMissing)};
    const double step = (vmax - vmin) / 65534.0;
    for (int j = grid.n_lat - 1; j >= 0; --j) {
        for (int i = 0; i < grid.n_lon; ++i) {
            const int hi = in.get();
            const int lo = in.get();
            if (hi < 0 || lo < 0) throw FormatError("heatmap: truncated pixel data");
            const int g = (hi << 8) | lo;
            if (g > 0) f.at(j, i) = vmin + (g - 1) * step;
        }
    }
    return f;
}

void write_heatmap_ppm(const Field& f, const OceanMask& mask,
                       const std::filesystem::path& path) {
    if (f.grid != mask.grid) throw ArgumentError("heatmap: field/mask grids differ");
    const Range r = ocean_range(f, mask);
    const double amp = std::max(std::abs(r.lo), std::abs(r.hi));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("heatmap: cannot open " + path.string());
    write_pnm(out, "P6", f.grid.n_lon, f.grid.n_lat, 255,
              "# diverging palette centered on zero\n");

    for (int j = f.grid.n_lat - 1; j >= 0; --j) {
        for (int i = 0; i < f.grid.n_lon; ++i) {
            unsigned char rgb[3] = {60, 60, 60}; // land
            if (mask.ocean(j, i)) {
                const double t = amp > 0.0 ? std::clamp(f.at(j, i) / amp, -1.0, 1.0) : 0.0;
                if (t >= 0.0) {
                    rgb[0] = 255;
                    rgb[1] = rgb[2] = static_cast<unsigned char>(std::lround(255 * (1.0 - t)));
                } else {
                    rgb[2] = 255;
                    rgb[0] = rgb[1] = static_cast<unsigned char>(std::lround(255 * (1.0 + t)));
                }
            }
            out.write(reinterpret_cast<const char*>(rgb), 3);
        }
    }
}

void write_partition_ppm(const Partition& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("heatmap: cannot open " + path.string());
    const Grid& grid = p.mask.grid;
    write_pnm(out, "P6", grid.n_lon, grid.n_lat, 255, "# cluster labels\n");

    // label -> color via a fixed hue wheel
    auto color = [&](int label, unsigned char* rgb) {
        const double h = std::fmod(0.61803398875 * label, 1.0) * 6.0;
        const int sect = static_cast<int>(h);
        const double frac = h - sect;
        const auto q = static_cast<unsigned char>(255 * (1.0 - frac));
        const auto t = static_cast<unsigned char>(255 * frac);
        switch (sect % 6) {
            case 0: rgb[0] = 255; rgb[1] = t;   rgb[2] = 40;  break;
            case 1: rgb[0] = q;   rgb[1] = 255; rgb[2] = 40;  break;
            case 2: rgb[0] = 40;  rgb[1] = 255; rgb[2] = t;   break;
            case 3: rgb[0] = 40;  rgb[1] = q;   rgb[2] = 255; break;
            case 4: rgb[0] = t;   rgb[1] = 40;  rgb[2] = 255; break;
            default: rgb[0] = 255; rgb[1] = 40; rgb[2] = q;   break;
        }
    };

    std::size_t point = 0;
    std::vector<int> label_at(grid.cells(), -1);
    for (int j = 0; j < grid.n_lat; ++j)
        for (int i = 0; i < grid.n_lon; ++i)
            if (p.mask.ocean(j, i)) label_at[grid.cell_index(j, i)] = p.labels[point++];

    for (int j = grid.n_lat - 1; j >= 0; --j) {
        for (int i = 0; i < grid.n_lon; ++i) {
            unsigned char rgb[3] = {60, 60, 60};
            const int l = label_at[grid.cell_index(j, i)];
            if (l >= 0) color(l, rgb);
            out.write(reinterpret_cast<const char*>(rgb), 3);
        }
    }
}

} // namespace seatrend
