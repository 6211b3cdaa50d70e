#include "seatrend/grid.hpp"

#include <numbers>

#include "seatrend/errors.hpp"

namespace seatrend {

void validate(const Grid& g) {
    if (g.n_lon < 1 || g.n_lat < 1)
        throw ArgumentError("grid: axes must have at least one cell");
    if (g.d_lon <= 0.0 || g.d_lat <= 0.0)
        throw ArgumentError("grid: steps must be positive");
    const double south = g.lat(0);
    const double north = g.lat(g.n_lat - 1);
    if (south <= -90.0 || north >= 90.0)
        throw ArgumentError("grid: cell-center latitudes must lie strictly inside (-90, 90)");
}

std::size_t OceanMask::ocean_count() const {
    std::size_t n = 0;
    for (auto m : mask) n += (m != 0);
    return n;
}

std::vector<std::pair<int, int>> OceanMask::ocean_cells() const {
    std::vector<std::pair<int, int>> cells;
    cells.reserve(ocean_count());
    for (int j = 0; j < grid.n_lat; ++j)
        for (int i = 0; i < grid.n_lon; ++i)
            if (ocean(j, i)) cells.emplace_back(j, i);
    return cells;
}

OceanMask all_ocean(const Grid& g) {
    validate(g);
    return OceanMask{g, std::vector<std::uint8_t>(g.cells(), 1)};
}

Field make_field(const OceanMask& mask, double ocean_value) {
    Field f{mask.grid, std::vector<double>(mask.grid.cells(), kMissing)};
    for (std::size_t c = 0; c < f.values.size(); ++c)
        if (mask.mask[c]) f.values[c] = ocean_value;
    return f;
}

std::vector<double> ocean_values(const Field& f, const OceanMask& mask) {
    if (f.grid != mask.grid)
        throw ArgumentError("ocean_values: field and mask grids differ");
    std::vector<double> out;
    out.reserve(mask.ocean_count());
    for (int j = 0; j < mask.grid.n_lat; ++j)
        for (int i = 0; i < mask.grid.n_lon; ++i)
            if (mask.ocean(j, i)) out.push_back(f.at(j, i));
    return out;
}

Field field_from_ocean(const OceanMask& mask, std::span<const double> values) {
    if (values.size() != mask.ocean_count())
        throw ArgumentError("field_from_ocean: value count does not match ocean count");
    Field f{mask.grid, std::vector<double>(mask.grid.cells(), kMissing)};
    std::size_t p = 0;
    for (int j = 0; j < mask.grid.n_lat; ++j)
        for (int i = 0; i < mask.grid.n_lon; ++i)
            if (mask.ocean(j, i)) f.at(j, i) = values[p++];
    return f;
}

LatWeights area_weights(const OceanMask& mask) {
    validate(mask.grid);
    LatWeights lw;
    lw.w.reserve(mask.ocean_count());
    const double to_rad = std::numbers::pi / 180.0;
    for (int j = 0; j < mask.grid.n_lat; ++j) {
        const double w = std::cos(mask.grid.lat(j) * to_rad);
        for (int i = 0; i < mask.grid.n_lon; ++i)
            if (mask.ocean(j, i)) lw.w.push_back(w);
    }
    return lw;
}

double weighted_mean(std::span<const double> x, const LatWeights& w) {
    if (x.size() != w.size())
        throw ArgumentError("weighted_mean: value/weight lengths differ");
    if (x.empty())
        throw ArgumentError("weighted_mean: empty input");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += w[i] * x[i];
        den += w[i];
    }
    return num / den;
}

Field remove_global_mean(const Field& f, const OceanMask& mask) {
    const auto vals = ocean_values(f, mask);
    const auto w = area_weights(mask);
    const double mu = weighted_mean(vals, w);
    Field out = f;
    for (std::size_t c = 0; c < out.values.size(); ++c)
        if (mask.mask[c]) out.values[c] -= mu;
    return out;
}

namespace {

void check_factor(const Grid& g, int factor) {
    if (factor < 1)
        throw ArgumentError("coarsen: factor must be >= 1");
    if (g.n_lon % factor != 0 || g.n_lat % factor != 0)
        throw ArgumentError("coarsen: factor must divide both grid axes");
}

Grid coarse_grid(const Grid& g, int factor) {
    Grid out;
    out.n_lon = g.n_lon / factor;
    out.n_lat = g.n_lat / factor;
    out.d_lon = g.d_lon * factor;
    out.d_lat = g.d_lat * factor;
    out.lon0 = g.lon0 + g.d_lon * (factor - 1) / 2.0;
    out.lat0 = g.lat0 + g.d_lat * (factor - 1) / 2.0;
    return out;
}

} // namespace

Field coarsen(const Field& f, int factor, MaskPolicy) {
    check_factor(f.grid, factor);
    if (factor == 1) return f;
    const Grid cg = coarse_grid(f.grid, factor);
    Field out{cg, std::vector<double>(cg.cells(), kMissing)};
    const int block = factor * factor;
    for (int J = 0; J < cg.n_lat; ++J) {
        for (int I = 0; I < cg.n_lon; ++I) {
            double sum = 0.0;
            int valid = 0;
            for (int j = J * factor; j < (J + 1) * factor; ++j) {
                for (int i = I * factor; i < (I + 1) * factor; ++i) {
                    const double v = f.at(j, i);
                    if (!std::isnan(v)) {
                        sum += v;
                        ++valid;
                    }
                }
            }
            // majority rule: ocean iff at least half of the block is ocean
            if (2 * valid >= block && valid > 0) out.at(J, I) = sum / valid;
        }
    }
    return out;
}

OceanMask coarsen(const OceanMask& mask, int factor, MaskPolicy) {
    check_factor(mask.grid, factor);
    if (factor == 1) return mask;
    const Grid cg = coarse_grid(mask.grid, factor);
    OceanMask out{cg, std::vector<std::uint8_t>(cg.cells(), 0)};
    for (int J = 0; J < cg.n_lat; ++J) {
        for (int I = 0; I < cg.n_lon; ++I) {
            int valid = 0;
            for (int j = J * factor; j < (J + 1) * factor; ++j)
                for (int i = I * factor; i < (I + 1) * factor; ++i)
                    valid += mask.ocean(j, i) ? 1 : 0;
            if (2 * valid >= factor * factor && valid > 0)
                out.mask[cg.cell_index(J, I)] = 1;
        }
    }
    return out;
}

} // namespace seatrend
