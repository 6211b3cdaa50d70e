#include "seatrend/trend.hpp"

#include <cmath>

#include "seatrend/errors.hpp"

namespace seatrend {

double fit_linear_trend(std::span<const double> y, std::span<const double> t) {
    const std::size_t n = y.size();
    if (n < 2) throw ArgumentError("fit_linear_trend: need at least 2 samples");
    if (t.size() != n) throw ArgumentError("fit_linear_trend: y/t lengths differ");

    double t_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t_mean += t[i];
        y_mean += y[i];
    }
    t_mean /= n;
    y_mean /= n;

    double s_ty = 0.0, s_tt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = t[i] - t_mean;
        s_ty += dt * (y[i] - y_mean);
        s_tt += dt * dt;
    }
    if (s_tt == 0.0) throw ArgumentError("fit_linear_trend: constant time coordinate");
    return s_ty / s_tt;
}

TrendMap trend_map(const TimeSeriesStack& stack, const YearWindow& window) {
    const int wm = window.n_months();
    if (wm <= 0) throw ArgumentError("trend_map: empty window");
    const int offset = (window.start_year - stack.start_year) * 12;
    if (offset < 0 || offset + wm > stack.n_months)
        throw ArgumentError("trend_map: window outside stack time span");

    std::vector<double> t(wm);
    for (int m = 0; m < wm; ++m) t[m] = month_center(window.start_year, m);

    const std::size_t np = stack.n_points();
    std::vector<double> slopes(np);
    for (std::size_t p = 0; p < np; ++p) {
        const auto s = stack.series(p).subspan(offset, wm);
        slopes[p] = fit_linear_trend(s, t);
    }
    return TrendMap{stack.mask, std::move(slopes), window};
}

TimeSeriesStack deseasonalize(const TimeSeriesStack& stack) {
    if (stack.n_months < 12 || stack.n_months % 12 != 0)
        throw ArgumentError("deseasonalize: month count must be a positive multiple of 12");
    const int years = stack.n_months / 12;
    TimeSeriesStack out = stack;
    const std::size_t np = stack.n_points();
    for (std::size_t p = 0; p < np; ++p) {
        for (int cm = 0; cm < 12; ++cm) {
            double clim = 0.0;
            for (int y = 0; y < years; ++y) clim += stack.at(p, y * 12 + cm);
            clim /= years;
            for (int y = 0; y < years; ++y) out.at(p, y * 12 + cm) -= clim;
        }
    }
    return out;
}

TimeSeriesStack remove_global_mean(const TimeSeriesStack& stack) {
    const auto w = area_weights(stack.mask);
    const std::size_t np = stack.n_points();
    double w_sum = 0.0;
    for (std::size_t p = 0; p < np; ++p) w_sum += w[p];

    TimeSeriesStack out = stack;
    for (int m = 0; m < stack.n_months; ++m) {
        double num = 0.0;
        for (std::size_t p = 0; p < np; ++p) num += w[p] * stack.at(p, m);
        const double mu = num / w_sum;
        for (std::size_t p = 0; p < np; ++p) out.at(p, m) -= mu;
    }
    return out;
}

} // namespace seatrend
