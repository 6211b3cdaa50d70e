#pragma once

#include <cstdint>
#include <filesystem>

#include "seatrend/evalmetrics.hpp"
#include "seatrend/grid.hpp"
#include "seatrend/trend.hpp"

namespace seatrend {

// Knobs for the synthetic observation/ensemble suite. The observation series
// is planted trend * time + an exact 12-month seasonal cycle + a shared
// oscillation pattern + white noise; each pseudo-model carries a damped copy
// of the planted trend pattern plus its own structured bias, identically in
// the hindcast and projection periods, which makes the label recoverable
// from the features in both windows.
//
// The seasonal shape and the shared oscillation are orthogonalized against
// {1, t} over their window, so the per-point least-squares slope of a
// noise-free stack equals the planted trend exactly.
struct SynthSpec {
    Grid grid{36, 18, 5.0, -85.0, 10.0, 10.0};
    int n_models = 6;
    int months = 72; // per window, multiple of 12
    int start_year = 2000;
    std::uint64_t seed = 42;

    double land_fraction = 0.25;
    double trend_amp = 2.0;     // mm/year, rms of the planted pattern
    double seasonal_amp = 30.0; // mm
    double mode_amp = 15.0;     // mm, shared-oscillation pattern scale
    double noise_amp = 2.0;     // mm, white noise on the observation

    // correlation between the past and future planted patterns; projections
    // of real ensembles track their hindcasts, so the default is well away
    // from both 0 (pure extrapolation) and 1 (persistence is unbeatable)
    double future_past_correlation = 0.5;

    // pseudo-models: fraction of the planted pattern they retain, and the
    // scale of their structured bias (mm/year)
    double model_pattern_factor = 0.5;
    double model_bias_amp = 0.1;
    double model_noise_amp = 0.4; // mm
};

struct SynthData {
    OceanMask mask;
    TimeSeriesStack observation; // hindcast window only
    std::vector<ModelDataset> models;
    std::vector<double> planted_past;   // per ocean point, mm/year, zero weighted mean
    std::vector<double> planted_future; // same for the projection window
    YearWindow hindcast_window;
    YearWindow projection_window;
};

SynthData gen_synth(const SynthSpec& spec);

// Write the suite as GRD1 files plus a manifest and a ready-to-run pipeline
// config; returns the config path.
std::filesystem::path write_synth_dir(const SynthData& data, const SynthSpec& spec,
                                      const std::filesystem::path& dir);

} // namespace seatrend
