#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace seatrend {

// Regular lon/lat lattice. lon0/lat0 are cell centers of the first column/row,
// rows run south to north, columns run eastward from lon0.
struct Grid {
    int n_lon = 0;
    int n_lat = 0;
    double lon0 = 0.0;
    double lat0 = 0.0;
    double d_lon = 0.0;
    double d_lat = 0.0;

    double lon(int i) const { return lon0 + i * d_lon; }
    double lat(int j) const { return lat0 + j * d_lat; }
    std::size_t cells() const { return static_cast<std::size_t>(n_lon) * n_lat; }
    std::size_t cell_index(int j, int i) const {
        return static_cast<std::size_t>(j) * n_lon + i;
    }

    bool operator==(const Grid&) const = default;

    // 180x90 cells of 2 degrees, centers at odd longitudes and odd latitudes.
    static Grid two_degree_global() { return Grid{180, 90, 1.0, -89.0, 2.0, 2.0}; }
};

// Throws ArgumentError if the lattice parameters are unusable
// (empty axes, non-positive steps, or a cell-center latitude at/over the poles).
void validate(const Grid& g);

// Land/sea mask over a grid. Ocean points are enumerated in a single canonical
// order everywhere: latitude outer (south to north), longitude inner.
struct OceanMask {
    Grid grid;
    std::vector<std::uint8_t> mask; // 1 = ocean, row-major [lat][lon]

    bool ocean(int j, int i) const { return mask[grid.cell_index(j, i)] != 0; }
    std::size_t ocean_count() const;

    // (lat index, lon index) of every ocean cell in canonical order.
    std::vector<std::pair<int, int>> ocean_cells() const;

    bool operator==(const OceanMask&) const = default;
};

OceanMask all_ocean(const Grid& g);

// One scalar per grid cell; NaN marks non-ocean cells.
struct Field {
    Grid grid;
    std::vector<double> values; // row-major [lat][lon], NaN on land

    double at(int j, int i) const { return values[grid.cell_index(j, i)]; }
    double& at(int j, int i) { return values[grid.cell_index(j, i)]; }
};

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

Field make_field(const OceanMask& mask, double ocean_value = 0.0);

// Pack a field's ocean cells into a canonical-order vector, and back.
std::vector<double> ocean_values(const Field& f, const OceanMask& mask);
Field field_from_ocean(const OceanMask& mask, std::span<const double> values);

// cos(latitude) per ocean point, canonical order. Strictly positive.
struct LatWeights {
    std::vector<double> w;

    std::size_t size() const { return w.size(); }
    double operator[](std::size_t i) const { return w[i]; }
};

LatWeights area_weights(const OceanMask& mask);

// Area-weighted mean: sum(w*x)/sum(w). Lengths must agree.
double weighted_mean(std::span<const double> x, const LatWeights& w);

// Subtract the area-weighted ocean mean; land cells stay NaN.
Field remove_global_mean(const Field& f, const OceanMask& mask);

enum class MaskPolicy { Majority };

// Block-average resampling by an integer factor that divides both axes.
// An output cell is ocean iff at least half of its block is ocean; its value
// is the plain mean of the block's ocean cells.
Field coarsen(const Field& f, int factor, MaskPolicy policy = MaskPolicy::Majority);
OceanMask coarsen(const OceanMask& mask, int factor, MaskPolicy policy = MaskPolicy::Majority);

} // namespace seatrend
