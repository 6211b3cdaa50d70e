#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seatrend/grid.hpp"
#include "seatrend/matrix.hpp"
#include "seatrend/neuralnet.hpp"

namespace seatrend {

// Dropout-ensemble prediction summary per grid point.
struct UncertaintyMap {
    Field mean; // mm/year
    Field std;  // mm/year, >= 0
    int passes = 0;
};

// T stochastic forward passes per input row, unscaled through the label
// scaler. Returns the per-row sample mean and population (1/T) standard
// deviation. Each row's dropout stream is derived from (seed, point id), so
// results do not depend on row order or thread schedule, and the first T
// passes of a longer run are unchanged.
struct McStats {
    std::vector<double> mean;
    std::vector<double> std;
};
McStats mc_dropout_stats(const Mlp& m, const Scaler& scaler, const Matrix& X_scaled,
                         std::span<const std::size_t> point_ids, int passes,
                         std::uint64_t seed, int threads = 1);

// Whole-mask variant: one model for every ocean point (row i = point i).
UncertaintyMap mc_dropout_predict(const Mlp& m, const Scaler& scaler, const Matrix& X_scaled,
                                  const OceanMask& mask, int passes, std::uint64_t seed,
                                  int threads = 1);

// Area-weighted RMS of the per-point standard deviation.
double uncertainty_rms(const UncertaintyMap& u, const OceanMask& mask, const LatWeights& w);

} // namespace seatrend
