#pragma once

#include <span>
#include <vector>

#include "seatrend/grid.hpp"

namespace seatrend {

// Inclusive span of calendar years, e.g. {1993, 2022} covers 360 months.
struct YearWindow {
    int start_year = 0;
    int end_year = 0;

    int n_months() const { return (end_year - start_year + 1) * 12; }
    bool operator==(const YearWindow&) const = default;
};

// Monthly series per ocean point (canonical order), stored point-major.
struct TimeSeriesStack {
    OceanMask mask;
    int n_months = 0;
    int start_year = 0;
    std::vector<double> values; // [point * n_months + month], mm

    std::size_t n_points() const { return mask.ocean_count(); }
    double at(std::size_t point, int month) const {
        return values[point * n_months + month];
    }
    double& at(std::size_t point, int month) {
        return values[point * n_months + month];
    }
    std::span<const double> series(std::size_t point) const {
        return {values.data() + point * n_months, static_cast<std::size_t>(n_months)};
    }
};

// Per-point linear slope over a window, mm/year.
struct TrendMap {
    OceanMask mask;
    std::vector<double> slope; // per ocean point, canonical order
    YearWindow window;

    Field as_field() const { return field_from_ocean(mask, slope); }
};

// Time coordinate of month m within a window: month centers in fractional
// years, so slopes come out per year with no rescaling.
inline double month_center(int start_year, int month) {
    return start_year + (month + 0.5) / 12.0;
}

// Ordinary least squares slope of y against t.
double fit_linear_trend(std::span<const double> y, std::span<const double> t);

// Fit every ocean point's series over the window (which must lie inside the
// stack's span, aligned to whole years).
TrendMap trend_map(const TimeSeriesStack& stack, const YearWindow& window);

// Subtract each calendar month's mean from every point's series.
TimeSeriesStack deseasonalize(const TimeSeriesStack& stack);

// Subtract the area-weighted ocean mean from every monthly slice.
TimeSeriesStack remove_global_mean(const TimeSeriesStack& stack);

} // namespace seatrend
