#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seatrend/evalmetrics.hpp"
#include "seatrend/explain.hpp"
#include "seatrend/grid.hpp"
#include "seatrend/model_store.hpp"
#include "seatrend/neuralnet.hpp"
#include "seatrend/segmentation.hpp"
#include "seatrend/trend.hpp"
#include "seatrend/uncertainty.hpp"

namespace seatrend {

enum class Strategy { None, Spectral, Domain };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct ModelPaths {
    std::string name;
    std::string hindcast;
    std::string projection;
};

// Run configuration, loaded from JSON. All paths are relative to the config
// file's directory.
struct RunConfig {
    std::filesystem::path base_dir;
    std::string observation;
    std::vector<ModelPaths> models;
    // 30-year default windows; {0, 0} in the JSON derives them from the
    // dataset spans instead
    YearWindow hindcast_window{1993, 2022};
    YearWindow projection_window{2023, 2052};

    Strategy strategy = Strategy::Spectral;
    int k = 4;
    double sigma = 0.0; // <= 0: median heuristic
    int knn = 0;
    DomainBoxes boxes;

    TrainConfig train;
    std::vector<Candidate> candidates; // nonempty enables k-fold selection
    int kfold = 5;
    std::vector<int> arch_large{1024, 512, 256};
    std::vector<int> arch_small{256, 128};

    int mc_passes = 100;
    int shap_background = 100;
    std::uint64_t seed = 1234;
    int threads = 1;
};

RunConfig load_config(const std::filesystem::path& path);

// Everything the datasets provide after loading: shared mask, global-mean
// removed stacks, and their trend maps.
struct PipelineData {
    OceanMask mask;
    LatWeights weights;
    TimeSeriesStack observation;        // mean-removed
    std::vector<ModelDataset> models;   // mean-removed
    YearWindow hindcast_window;         // effective (config or inferred)
    YearWindow projection_window;
    std::vector<double> obs_trend;      // hindcast window, per ocean point
    Matrix feature_trends;              // [points x models], hindcast
    Matrix projection_trends;           // [points x models], projection window
};

PipelineData load_datasets(const RunConfig& cfg);

Partition make_partition(const RunConfig& cfg, const PipelineData& data);

struct ClusterTrainInfo {
    int cluster = 0;
    std::size_t points = 0;
    std::vector<int> hidden;
    std::uint64_t seed = 0;
    double train_rmse = 0.0;
    double train_corr = 0.0;
    int kfold_choice = -1; // candidate index when selection ran
};

// Optional tail stages; training and prediction always run.
struct RunStages {
    bool uncertainty = true;
    bool importance = true;
};

struct RunResult {
    Partition partition;
    std::vector<ClusterModel> models;
    std::vector<ClusterTrainInfo> cluster_info;
    RunStages stages;

    std::vector<double> obs_trend;
    std::vector<double> train_prediction;
    std::vector<double> future_prediction;
    McStats mc; // per-point dropout mean/std, mm/year

    double train_rmse = 0.0;
    double train_corr = 0.0;
    double future_rms = 0.0;       // of the mean-removed prediction
    double future_corr_past = 0.0; // prediction vs hindcast observation trend
    double uncertainty_rms = 0.0;
    std::vector<FeatureImportance> importance;
};

// Trends -> segmentation -> per-cluster training -> future prediction ->
// dropout uncertainty -> attribution. Pure in-memory variant of `run`.
RunResult run_pipeline(const RunConfig& cfg, const PipelineData& data,
                       const RunStages& stages = {});

// File products: GRD1 fields, CSV tables, heatmaps, models, manifest.
void write_run_outputs(const RunConfig& cfg, const PipelineData& data, const RunResult& res,
                       const std::filesystem::path& out_dir);

struct SweepRow {
    int k = 0;
    double train_rmse = 0.0;
    double future_rms = 0.0;
    double uncertainty_rms = 0.0;
    double corr_past = 0.0;
    double loo_avg_corr = 0.0;
};

// Spectral runs across cluster counts; every row also runs the leave-one-out
// harness on the same partition.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, const PipelineData& data,
                                const std::vector<int>& ks);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

LeaveOneOutTable run_leave_one_out(const RunConfig& cfg, const PipelineData& data,
                                   const Partition& partition);

void write_loo_csv(const LeaveOneOutTable& table, const std::filesystem::path& path);

void write_partition_csv(const Partition& p, const std::filesystem::path& path);
Partition read_partition_csv(const std::filesystem::path& path, const OceanMask& mask);

// Per-cluster architecture: explicit override, else share-based default.
std::vector<int> resolve_architecture(const RunConfig& cfg, std::size_t cluster_size,
                                      std::size_t total_points);

} // namespace seatrend
