#include "seatrend/uncertainty.hpp"

#include <cmath>
#include <numeric>

#include "seatrend/errors.hpp"
#include "seatrend/parallel.hpp"
#include "seatrend/rng.hpp"

namespace seatrend {

McStats mc_dropout_stats(const Mlp& m, const Scaler& scaler, const Matrix& X_scaled,
                         std::span<const std::size_t> point_ids, int passes,
                         std::uint64_t seed, int threads) {
    if (passes < 1) throw ArgumentError("mc_dropout_stats: need at least one pass");
    if (point_ids.size() != X_scaled.rows)
        throw ArgumentError("mc_dropout_stats: one point id per input row required");

    McStats out;
    out.mean.assign(X_scaled.rows, 0.0);
    out.std.assign(X_scaled.rows, 0.0);

    parallel_for(X_scaled.rows, threads, [&](std::size_t r) {
        // every pass is identical when dropout is off, so the spread is an
        // exact zero rather than accumulated rounding noise
        if (m.dropout_rate == 0.0) {
            out.mean[r] = scaler.inverse_label(forward(m, X_scaled.row(r)));
            out.std[r] = 0.0;
            return;
        }
        std::mt19937_64 rng(mix_seed(seed, point_ids[r]));
        std::vector<double> samples(passes);
        for (int t = 0; t < passes; ++t)
            samples[t] = scaler.inverse_label(forward_dropout(m, X_scaled.row(r), rng));

        double mean = 0.0;
        for (double s : samples) mean += s;
        mean /= passes;
        double var = 0.0;
        for (double s : samples) var += (s - mean) * (s - mean);
        var /= passes; // population form: the passes are the whole ensemble
        out.mean[r] = mean;
        out.std[r] = std::sqrt(var);
    });
    return out;
}

UncertaintyMap mc_dropout_predict(const Mlp& m, const Scaler& scaler, const Matrix& X_scaled,
                                  const OceanMask& mask, int passes, std::uint64_t seed,
                                  int threads) {
    if (X_scaled.rows != mask.ocean_count())
        throw ArgumentError("mc_dropout_predict: one row per ocean point required");
    std::vector<std::size_t> ids(X_scaled.rows);
    std::iota(ids.begin(), ids.end(), 0);
    const McStats stats = mc_dropout_stats(m, scaler, X_scaled, ids, passes, seed, threads);
    return UncertaintyMap{field_from_ocean(mask, stats.mean),
                          field_from_ocean(mask, stats.std), passes};
}

double uncertainty_rms(const UncertaintyMap& u, const OceanMask& mask, const LatWeights& w) {
    const auto std_vals = ocean_values(u.std, mask);
    if (std_vals.size() != w.size())
        throw ArgumentError("uncertainty_rms: weight length does not match ocean count");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < std_vals.size(); ++i) {
        num += w[i] * std_vals[i] * std_vals[i];
        den += w[i];
    }
    return std::sqrt(num / den);
}

} // namespace seatrend
