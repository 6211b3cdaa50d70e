// Command-line driver for the trend-forecasting pipeline.
//
// Subcommands cover the end-to-end run plus each stage in isolation:
//   gen-synth    write a synthetic observation + ensemble suite
//   trends       trend maps for every configured dataset
//   cluster      segmentation only (partition.csv + preview image)
//   train        per-cluster model fitting (models.mdl1)
//   predict      future trend field from stored models
//   uncertainty  dropout-ensemble mean/std maps from stored models
//   explain      per-cluster feature importance from stored models
//   eval-loo     leave-one-out evaluation across the model ensemble
//   sweep        cluster-count sweep table
//   run          the full pipeline

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <random>

#include "seatrend/csvio.hpp"
#include "seatrend/errors.hpp"
#include "seatrend/grd1.hpp"
#include "seatrend/heatmap.hpp"
#include "seatrend/model_store.hpp"
#include "seatrend/pipeline.hpp"
#include "seatrend/rng.hpp"
#include "seatrend/synth.hpp"

namespace fs = std::filesystem;
using namespace seatrend;

namespace {

struct CommonArgs {
    std::string config;
    std::string out = "out";
    std::string strategy;
    int k = -1;
    int threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
    auto* c = cmd->add_option("--config", args.config, "pipeline config JSON");
    if (needs_config) c->required();
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--strategy", args.strategy, "none|spectral|domain");
    cmd->add_option("--k", args.k, "cluster count for spectral segmentation");
    cmd->add_option("--threads", args.threads, "worker cap (default from config)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t s) { args.seed = s; args.seed_set = true; },
        "override the config seed");
}

RunConfig make_config(const CommonArgs& args) {
    RunConfig cfg = load_config(args.config);
    if (!args.strategy.empty()) cfg.strategy = strategy_from_string(args.strategy);
    if (args.k > 0) cfg.k = args.k;
    if (args.threads > 0) cfg.threads = args.threads;
    if (args.seed_set) {
        cfg.seed = args.seed;
        cfg.train.seed = args.seed;
    }
    return cfg;
}

std::vector<ClusterModel> load_models_for(const PipelineData& data, const fs::path& out_dir,
                                          Partition& partition) {
    partition = read_partition_csv(out_dir / "partition.csv", data.mask);
    auto models = read_models(out_dir / "models.mdl1");
    if (static_cast<int>(models.size()) != partition.k)
        throw DataError("stored models do not match the stored partition");
    return models;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gridded multi-decadal trend forecasting toolkit"};
    app.require_subcommand(1);

    // gen-synth
    auto* gen = app.add_subcommand("gen-synth", "generate a synthetic dataset suite");
    std::string gen_out = "synth";
    SynthSpec spec;
    gen->add_option("--out", gen_out, "target directory");
    gen->add_option("--n-lon", spec.grid.n_lon, "global columns (cell size follows)");
    gen->add_option("--n-lat", spec.grid.n_lat, "global rows (cell size follows)");
    gen->add_option("--months", spec.months);
    gen->add_option("--n-models", spec.n_models);
    gen->add_option("--seed", spec.seed);
    gen->add_option("--noise", spec.noise_amp);
    gen->add_option("--land-fraction", spec.land_fraction);

    CommonArgs trends_args, cluster_args, train_args, predict_args, unc_args, explain_args,
        loo_args, sweep_args, run_args;
    auto* trends = app.add_subcommand("trends", "write trend maps for all datasets");
    add_common(trends, trends_args);
    auto* cluster = app.add_subcommand("cluster", "write the segmentation");
    add_common(cluster, cluster_args);
    auto* train_cmd = app.add_subcommand("train", "train per-cluster models");
    add_common(train_cmd, train_args);
    auto* predict = app.add_subcommand("predict", "predict from stored models");
    add_common(predict, predict_args);
    auto* unc = app.add_subcommand("uncertainty", "dropout uncertainty from stored models");
    add_common(unc, unc_args);
    int unc_passes = 0;
    unc->add_option("--passes", unc_passes, "dropout passes (default from config)");
    auto* explain_cmd = app.add_subcommand("explain", "feature importance from stored models");
    add_common(explain_cmd, explain_args);
    auto* loo = app.add_subcommand("eval-loo", "leave-one-out ensemble evaluation");
    add_common(loo, loo_args);
    auto* sweep = app.add_subcommand("sweep", "cluster-count sweep");
    add_common(sweep, sweep_args);
    std::vector<int> sweep_ks{2, 4, 8, 16, 32, 64};
    sweep->add_option("--ks", sweep_ks, "cluster counts to sweep");
    auto* run = app.add_subcommand("run", "full pipeline");
    add_common(run, run_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            // cell counts define the resolution of a global grid
            spec.grid.d_lon = 360.0 / spec.grid.n_lon;
            spec.grid.d_lat = 180.0 / spec.grid.n_lat;
            spec.grid.lon0 = spec.grid.d_lon / 2.0;
            spec.grid.lat0 = -90.0 + spec.grid.d_lat / 2.0;
            const SynthData data = gen_synth(spec);
            const fs::path cfg = write_synth_dir(data, spec, gen_out);
            std::cout << "synthetic suite written; config at " << cfg.string() << "\n";
            return 0;
        }

        if (trends->parsed()) {
            const RunConfig cfg = make_config(trends_args);
            const PipelineData data = load_datasets(cfg);
            fs::create_directories(trends_args.out);
            auto save = [&](const std::vector<double>& v, const std::string& name, int year) {
                Grd1Data d = from_field(field_from_ocean(data.mask, v), data.mask);
                d.start_year = year;
                write_grd1(d, fs::path(trends_args.out) / (name + "_trend.grd1"));
            };
            save(data.obs_trend, "observation", data.hindcast_window.start_year);
            for (std::size_t m = 0; m < data.models.size(); ++m) {
                std::vector<double> h(data.mask.ocean_count()), p(data.mask.ocean_count());
                for (std::size_t i = 0; i < h.size(); ++i) {
                    h[i] = data.feature_trends(i, m);
                    p[i] = data.projection_trends(i, m);
                }
                save(h, data.models[m].name + "_hindcast", data.hindcast_window.start_year);
                save(p, data.models[m].name + "_projection",
                     data.projection_window.start_year);
            }
            std::cout << "trend maps written to " << trends_args.out << "\n";
            return 0;
        }

        if (cluster->parsed()) {
            const RunConfig cfg = make_config(cluster_args);
            const PipelineData data = load_datasets(cfg);
            const Partition p = make_partition(cfg, data);
            fs::create_directories(cluster_args.out);
            write_partition_csv(p, fs::path(cluster_args.out) / "partition.csv");
            write_partition_ppm(p, fs::path(cluster_args.out) / "partition.ppm");
            std::cout << "partition with k=" << p.k << " written to " << cluster_args.out
                      << "\n";
            return 0;
        }

        if (train_cmd->parsed() || run->parsed()) {
            const CommonArgs& args = train_cmd->parsed() ? train_args : run_args;
            const RunConfig cfg = make_config(args);
            const PipelineData data = load_datasets(cfg);
            // `train` stops after fitting; `run` carries on through
            // uncertainty and attribution
            const RunStages stages =
                train_cmd->parsed() ? RunStages{false, false} : RunStages{};
            const RunResult res = run_pipeline(cfg, data, stages);
            write_run_outputs(cfg, data, res, args.out);
            std::cout << "strategy " << to_string(cfg.strategy) << ", k=" << res.partition.k
                      << ": train rmse " << res.train_rmse << " corr " << res.train_corr
                      << "; future rms " << res.future_rms << " corr-with-past "
                      << res.future_corr_past << "; uncertainty rms " << res.uncertainty_rms
                      << "\noutputs in " << args.out << "\n";
            return 0;
        }

        if (predict->parsed() || unc->parsed() || explain_cmd->parsed()) {
            const CommonArgs& args = predict->parsed() ? predict_args
                                     : unc->parsed()   ? unc_args
                                                       : explain_args;
            RunConfig cfg = make_config(args);
            const PipelineData data = load_datasets(cfg);
            Partition partition{data.mask, {}, 0};
            const auto models = load_models_for(data, args.out, partition);

            if (predict->parsed()) {
                std::vector<double> pred(data.mask.ocean_count(), 0.0);
                for (int c = 0; c < partition.k; ++c) {
                    const auto pts = partition.cluster_points(c);
                    Matrix x(pts.size(), data.projection_trends.cols);
                    for (std::size_t r = 0; r < pts.size(); ++r)
                        for (std::size_t f = 0; f < x.cols; ++f)
                            x(r, f) = data.projection_trends(pts[r], f);
                    const auto yh =
                        forward_batch(models[c].mlp, models[c].scaler.transform_features(x));
                    for (std::size_t r = 0; r < pts.size(); ++r)
                        pred[pts[r]] = models[c].scaler.inverse_label(yh[r]);
                }
                Grd1Data d = from_field(field_from_ocean(data.mask, pred), data.mask);
                d.start_year = data.projection_window.start_year;
                write_grd1(d, fs::path(args.out) / "prediction_future.grd1");
                std::cout << "prediction written\n";
                return 0;
            }

            if (unc->parsed()) {
                if (unc_passes > 0) cfg.mc_passes = unc_passes;
                std::vector<double> mean(data.mask.ocean_count(), 0.0),
                    stdv(data.mask.ocean_count(), 0.0);
                for (int c = 0; c < partition.k; ++c) {
                    const auto pts = partition.cluster_points(c);
                    Matrix x(pts.size(), data.projection_trends.cols);
                    for (std::size_t r = 0; r < pts.size(); ++r)
                        for (std::size_t f = 0; f < x.cols; ++f)
                            x(r, f) = data.projection_trends(pts[r], f);
                    const auto stats = mc_dropout_stats(
                        models[c].mlp, models[c].scaler,
                        models[c].scaler.transform_features(x), pts, cfg.mc_passes,
                        mix_seed(cfg.seed, 0x0DA0), cfg.threads);
                    for (std::size_t r = 0; r < pts.size(); ++r) {
                        mean[pts[r]] = stats.mean[r];
                        stdv[pts[r]] = stats.std[r];
                    }
                }
                auto save = [&](const std::vector<double>& v, const std::string& name) {
                    Grd1Data d = from_field(field_from_ocean(data.mask, v), data.mask);
                    d.start_year = data.projection_window.start_year;
                    write_grd1(d, fs::path(args.out) / (name + ".grd1"));
                };
                save(mean, "mc_mean");
                save(stdv, "mc_std");
                std::cout << "uncertainty maps written\n";
                return 0;
            }

            // explain
            std::vector<ModelFn> fns;
            std::vector<Matrix> pts_scaled;
            std::vector<BackgroundSet> bgs;
            std::mt19937_64 bg_rng(mix_seed(cfg.seed, 0xBA26));
            for (int c = 0; c < partition.k; ++c) {
                const auto pts = partition.cluster_points(c);
                Matrix x(pts.size(), data.feature_trends.cols);
                for (std::size_t r = 0; r < pts.size(); ++r)
                    for (std::size_t f = 0; f < x.cols; ++f)
                        x(r, f) = data.feature_trends(pts[r], f);
                Matrix xs = models[c].scaler.transform_features(x);
                const Mlp* mlp = &models[c].mlp;
                fns.push_back(
                    [mlp](std::span<const double> row) { return forward(*mlp, row); });
                BackgroundSet bg;
                if (cfg.shap_background > 0 &&
                    static_cast<std::size_t>(cfg.shap_background) < xs.rows) {
                    std::vector<std::size_t> idx(xs.rows);
                    std::iota(idx.begin(), idx.end(), 0);
                    std::shuffle(idx.begin(), idx.end(), bg_rng);
                    idx.resize(cfg.shap_background);
                    bg.rows = Matrix(idx.size(), xs.cols);
                    for (std::size_t r = 0; r < idx.size(); ++r)
                        std::copy(xs.row(idx[r]).begin(), xs.row(idx[r]).end(),
                                  bg.rows.row(r).begin());
                } else {
                    bg.rows = xs;
                }
                bgs.push_back(std::move(bg));
                pts_scaled.push_back(std::move(xs));
            }
            const auto importance =
                cluster_importance(fns, pts_scaled, bgs, partition, cfg.threads);
            CsvWriter csv(fs::path(args.out) / "shap_importance.csv");
            csv.row({"cluster", "rank", "feature", "model", "mean_abs_phi"});
            for (const auto& fi : importance)
                for (std::size_t r = 0; r < fi.ranked.size(); ++r)
                    csv.row({csv_num(static_cast<long long>(fi.cluster)),
                             csv_num(static_cast<long long>(r)),
                             csv_num(static_cast<long long>(fi.ranked[r].first)),
                             cfg.models[fi.ranked[r].first].name,
                             csv_num(fi.ranked[r].second)});
            std::cout << "importance table written\n";
            return 0;
        }

        if (loo->parsed()) {
            const RunConfig cfg = make_config(loo_args);
            const PipelineData data = load_datasets(cfg);
            const Partition partition = make_partition(cfg, data);
            const LeaveOneOutTable table = run_leave_one_out(cfg, data, partition);
            fs::create_directories(loo_args.out);
            write_loo_csv(table, fs::path(loo_args.out) / "loo.csv");
            std::cout << "leave-one-out table written; average ml corr "
                      << table.average.ml_corr << "\n";
            return 0;
        }

        if (sweep->parsed()) {
            const RunConfig cfg = make_config(sweep_args);
            const PipelineData data = load_datasets(cfg);
            const auto rows = run_sweep(cfg, data, sweep_ks);
            fs::create_directories(sweep_args.out);
            write_sweep_csv(rows, fs::path(sweep_args.out) / "sweep.csv");
            std::cout << "sweep table written (" << rows.size() << " rows)\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
