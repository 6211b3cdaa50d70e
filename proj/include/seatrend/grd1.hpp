#pragma once

#include <filesystem>
#include <string>

#include "seatrend/grid.hpp"
#include "seatrend/trend.hpp"

namespace seatrend {

// Gridded binary container: a fixed little-endian header followed by f64
// samples ordered time-major, then latitude, then longitude. Land cells hold
// the declared fill value in every time slice.
//
// Header layout (offsets in bytes):
//   0  magic "GRD1"
//   4  version      u16   (currently 1)
//   6  n_lon        u32
//  10  n_lat        u32
//  14  n_time       u32
//  18  lon0         f64
//  26  lat0         f64
//  34  d_lon        f64
//  42  d_lat        f64
//  50  fill_value   f64
//  58  start_year   i32
//  62  start_month  u8    (1..12)
//  63  payload      f64 * n_lon * n_lat * n_time
struct Grd1Data {
    Grid grid;
    int n_time = 0;
    int start_year = 0;
    int start_month = 1;
    double fill_value = kDefaultFill;
    std::vector<double> values; // [time][lat][lon]; land cells hold fill_value

    static constexpr double kDefaultFill = -1.0e30;

    double at(int t, int j, int i) const {
        return values[(static_cast<std::size_t>(t) * grid.n_lat + j) * grid.n_lon + i];
    }
    double& at(int t, int j, int i) {
        return values[(static_cast<std::size_t>(t) * grid.n_lat + j) * grid.n_lon + i];
    }

    // Land = fill in every slice; a cell that is fill in only some slices is
    // rejected as inconsistent.
    OceanMask infer_mask() const;

    Field as_field() const;                // requires n_time == 1
    TimeSeriesStack as_stack() const;      // monthly series per ocean point
};

Grd1Data from_field(const Field& f, const OceanMask& mask);
Grd1Data from_stack(const TimeSeriesStack& stack);

void write_grd1(const Grd1Data& data, const std::filesystem::path& path);
Grd1Data read_grd1(const std::filesystem::path& path);

} // namespace seatrend
