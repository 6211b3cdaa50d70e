#pragma once

#include <string>
#include <vector>

#include "seatrend/grid.hpp"
#include "seatrend/neuralnet.hpp"
#include "seatrend/segmentation.hpp"
#include "seatrend/trend.hpp"

namespace seatrend {

struct ScoreReport {
    double rmse = 0.0;            // mm/year
    double correlation = 0.0;     // in [-1, 1]
    double rms_variability = 0.0; // mm/year
    std::string label;
};

// sqrt(sum(w (a-b)^2) / sum(w)); both fields on the same mask.
double weighted_rmse(const Field& a, const Field& b, const OceanMask& mask,
                     const LatWeights& w);

// Weighted, centered Pearson correlation. Throws on constant input.
double weighted_pearson(const Field& a, const Field& b, const OceanMask& mask,
                        const LatWeights& w);

// sqrt(sum(w a^2) / sum(w)).
double rms_variability(const Field& a, const OceanMask& mask, const LatWeights& w);

// Vector forms over canonical ocean-point values.
double weighted_rmse(std::span<const double> a, std::span<const double> b, const LatWeights& w);
double weighted_pearson(std::span<const double> a, std::span<const double> b,
                        const LatWeights& w);
double rms_variability(std::span<const double> a, const LatWeights& w);

// The past trend reused as the forecast, relabeled to the target window.
TrendMap persistence(const TrendMap& past, const YearWindow& future);
YearWindow following_window(const YearWindow& w);

// One climate model's monthly series for both periods.
struct ModelDataset {
    std::string name;
    TimeSeriesStack hindcast;
    TimeSeriesStack projection;
};

struct LeaveOneOutRow {
    std::string held_out;
    double ml_rmse = 0.0;
    double ml_corr = 0.0;
    double persistence_rmse = 0.0;
    double persistence_corr = 0.0;
};

struct LeaveOneOutTable {
    std::vector<LeaveOneOutRow> rows; // one per held-out model
    LeaveOneOutRow average;           // name "average"
};

struct LeaveOneOutConfig {
    YearWindow hindcast_window;
    YearWindow projection_window;
    TrainConfig train;
    // Hidden sizes per cluster; empty selects the cluster-share default.
    std::vector<std::vector<int>> hidden_per_cluster;
    int threads = 1;
};

// Hold each model out in turn: train per-cluster nets mapping the other
// models' hindcast trends to the held-out hindcast trend, predict its
// projection from the others' projected trends, and score both the
// prediction and the persistence baseline against the held-out projection.
// Degenerate inputs (constant feature columns) propagate as errors.
LeaveOneOutTable leave_one_out(const std::vector<ModelDataset>& datasets,
                               const Partition& partition, const LeaveOneOutConfig& cfg);

} // namespace seatrend
