#include "seatrend/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "seatrend/csvio.hpp"
#include "seatrend/errors.hpp"
#include "seatrend/grd1.hpp"
#include "seatrend/heatmap.hpp"
#include "seatrend/parallel.hpp"
#include "seatrend/rng.hpp"

namespace seatrend {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Seed-stream tags per stage; recorded in the run manifest.
constexpr std::uint64_t kSeedPartition = 0x5EC7;
constexpr std::uint64_t kSeedTrain = 0x7A11;
constexpr std::uint64_t kSeedKfold = 0xF01D;
constexpr std::uint64_t kSeedDropout = 0x0DA0;
constexpr std::uint64_t kSeedBackground = 0xBA26;
constexpr std::uint64_t kSeedLoo = 0x0100;

// Rethrow with a stage label, keeping the exception type where it matters.
template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
    auto tag = [&](const char* what) { return "[stage " + name + "] " + what; };
    try {
        return fn();
    } catch (ArgumentError& e) {
        throw ArgumentError(tag(e.what()));
    } catch (DegenerateInputError& e) {
        throw DegenerateInputError(tag(e.what()));
    } catch (FormatError& e) {
        throw FormatError(tag(e.what()));
    } catch (DataError& e) {
        throw DataError(tag(e.what()));
    } catch (CapabilityError& e) {
        throw CapabilityError(tag(e.what()));
    } catch (NumericalError& e) {
        throw NumericalError(tag(e.what()));
    } catch (TrainingDivergedError& e) {
        throw TrainingDivergedError(tag(e.what()), e.epoch);
    }
}

YearWindow window_from_json(const json& j) {
    return YearWindow{j.at("start_year").get<int>(), j.at("end_year").get<int>()};
}

TimeSeriesStack restrict_stack(const TimeSeriesStack& s, const OceanMask& shared) {
    if (s.mask == shared) return s;
    TimeSeriesStack out;
    out.mask = shared;
    out.n_months = s.n_months;
    out.start_year = s.start_year;
    out.values.reserve(shared.ocean_count() * static_cast<std::size_t>(s.n_months));
    std::size_t old_p = 0;
    for (int j = 0; j < s.mask.grid.n_lat; ++j)
        for (int i = 0; i < s.mask.grid.n_lon; ++i) {
            if (!s.mask.ocean(j, i)) continue;
            if (shared.ocean(j, i)) {
                const auto row = s.series(old_p);
                out.values.insert(out.values.end(), row.begin(), row.end());
            }
            ++old_p;
        }
    return out;
}

} // namespace

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::None: return "none";
        case Strategy::Spectral: return "spectral";
        case Strategy::Domain: return "domain";
    }
    return "none";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "none") return Strategy::None;
    if (s == "spectral") return Strategy::Spectral;
    if (s == "domain") return Strategy::Domain;
    throw ArgumentError("unknown strategy '" + s + "' (none|spectral|domain)");
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("config: cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError("config: " + std::string(e.what()));
    }

    RunConfig cfg;
    cfg.base_dir = fs::absolute(path).parent_path();
    cfg.observation = j.at("observation").get<std::string>();
    for (const auto& m : j.at("models"))
        cfg.models.push_back(ModelPaths{m.at("name").get<std::string>(),
                                        m.at("hindcast").get<std::string>(),
                                        m.at("projection").get<std::string>()});
    if (j.contains("hindcast_window")) cfg.hindcast_window = window_from_json(j["hindcast_window"]);
    if (j.contains("projection_window"))
        cfg.projection_window = window_from_json(j["projection_window"]);

    cfg.strategy = strategy_from_string(j.value("strategy", "spectral"));
    cfg.k = j.value("k", 4);
    cfg.sigma = j.value("sigma", 0.0);
    cfg.knn = j.value("knn", 0);

    if (j.contains("domain_boxes")) {
        const auto& b = j["domain_boxes"];
        auto box = [](const json& v) {
            return LatLonBox{v.at("lat_min").get<double>(), v.at("lat_max").get<double>(),
                             v.at("lon_min").get<double>(), v.at("lon_max").get<double>()};
        };
        if (b.contains("north_atlantic")) cfg.boxes.north_atlantic = box(b["north_atlantic"]);
        if (b.contains("north_pacific")) cfg.boxes.north_pacific = box(b["north_pacific"]);
        cfg.boxes.atlantic_notch_lon_max =
            b.value("atlantic_notch_lon_max", cfg.boxes.atlantic_notch_lon_max);
        cfg.boxes.atlantic_notch_lat_max =
            b.value("atlantic_notch_lat_max", cfg.boxes.atlantic_notch_lat_max);
        cfg.boxes.southern_lat_max = b.value("southern_lat_max", cfg.boxes.southern_lat_max);
    }

    auto read_train = [](const json& t, TrainConfig base) {
        base.learning_rate = t.value("learning_rate", base.learning_rate);
        base.epochs = t.value("epochs", base.epochs);
        base.batch_size = t.value("batch_size", base.batch_size);
        base.l2 = t.value("l2", base.l2);
        base.dropout = t.value("dropout", base.dropout);
        base.patience = t.value("patience", base.patience);
        base.val_fraction = t.value("val_fraction", base.val_fraction);
        return base;
    };
    if (j.contains("train")) cfg.train = read_train(j["train"], cfg.train);
    if (j.contains("candidates"))
        for (const auto& c : j["candidates"]) {
            Candidate cand;
            cand.hidden = c.at("hidden").get<std::vector<int>>();
            cand.cfg = c.contains("train") ? read_train(c["train"], cfg.train) : cfg.train;
            cfg.candidates.push_back(std::move(cand));
        }
    cfg.kfold = j.value("kfold", 5);
    if (j.contains("architecture")) {
        cfg.arch_large = j["architecture"].value("large", cfg.arch_large);
        cfg.arch_small = j["architecture"].value("small", cfg.arch_small);
    }

    cfg.mc_passes = j.value("mc_passes", 100);
    cfg.shap_background = j.value("shap_background", 100);
    cfg.seed = j.value("seed", 1234ULL);
    cfg.train.seed = cfg.seed;
    cfg.threads = j.value("threads", 1);
    return cfg;
}

PipelineData load_datasets(const RunConfig& cfg) {
    return stage("load", [&] {
        if (cfg.models.size() < 2)
            throw ArgumentError("config: need at least 2 model datasets");

        PipelineData data;
        const Grd1Data obs_raw = read_grd1(cfg.base_dir / cfg.observation);
        TimeSeriesStack obs = obs_raw.as_stack();

        std::vector<std::pair<TimeSeriesStack, TimeSeriesStack>> model_stacks;
        OceanMask shared = obs.mask;
        for (const auto& m : cfg.models) {
            TimeSeriesStack h = read_grd1(cfg.base_dir / m.hindcast).as_stack();
            TimeSeriesStack p = read_grd1(cfg.base_dir / m.projection).as_stack();
            if (h.mask.grid != obs.mask.grid || p.mask.grid != obs.mask.grid)
                throw ArgumentError("dataset '" + m.name + "' is on a different grid");
            for (std::size_t c = 0; c < shared.mask.size(); ++c)
                shared.mask[c] = shared.mask[c] && h.mask.mask[c] && p.mask.mask[c];
            model_stacks.emplace_back(std::move(h), std::move(p));
        }
        if (shared.ocean_count() == 0)
            throw DegenerateInputError("datasets share no ocean points");

        data.mask = shared;
        data.weights = area_weights(shared);
        data.observation = remove_global_mean(restrict_stack(obs, shared));
        for (std::size_t m = 0; m < cfg.models.size(); ++m) {
            ModelDataset ds;
            ds.name = cfg.models[m].name;
            ds.hindcast = remove_global_mean(restrict_stack(model_stacks[m].first, shared));
            ds.projection = remove_global_mean(restrict_stack(model_stacks[m].second, shared));
            data.models.push_back(std::move(ds));
        }

        YearWindow hw = cfg.hindcast_window;
        if (hw == YearWindow{})
            hw = YearWindow{data.observation.start_year,
                            data.observation.start_year + data.observation.n_months / 12 - 1};
        YearWindow pw = cfg.projection_window;
        if (pw == YearWindow{}) {
            const auto& p0 = data.models.front().projection;
            pw = YearWindow{p0.start_year, p0.start_year + p0.n_months / 12 - 1};
        }
        data.hindcast_window = hw;
        data.projection_window = pw;

        data.obs_trend = trend_map(data.observation, hw).slope;
        const std::size_t np = shared.ocean_count();
        data.feature_trends = Matrix(np, cfg.models.size());
        data.projection_trends = Matrix(np, cfg.models.size());
        for (std::size_t m = 0; m < data.models.size(); ++m) {
            const auto h = trend_map(data.models[m].hindcast, hw).slope;
            const auto p = trend_map(data.models[m].projection, pw).slope;
            for (std::size_t i = 0; i < np; ++i) {
                data.feature_trends(i, m) = h[i];
                data.projection_trends(i, m) = p[i];
            }
        }
        return data;
    });
}

Partition make_partition(const RunConfig& cfg, const PipelineData& data) {
    return stage("segmentation", [&] {
        switch (cfg.strategy) {
            case Strategy::None: {
                Partition p{data.mask,
                            std::vector<int>(data.mask.ocean_count(), 0), 1};
                validate_partition(p);
                return p;
            }
            case Strategy::Domain:
                return domain_partition(data.mask, cfg.boxes);
            case Strategy::Spectral: {
                const TimeSeriesStack anomalies = deseasonalize(data.observation);
                Matrix features(anomalies.n_points(),
                                static_cast<std::size_t>(anomalies.n_months));
                std::copy(anomalies.values.begin(), anomalies.values.end(),
                          features.data.begin());
                SpectralOptions opts;
                opts.sigma = cfg.sigma > 0.0 ? SigmaPolicy::fixed(cfg.sigma)
                                             : SigmaPolicy::median();
                opts.knn = cfg.knn;
                return spectral_cluster(data.mask, features, cfg.k,
                                        mix_seed(cfg.seed, kSeedPartition), opts);
            }
        }
        throw ArgumentError("unknown strategy");
    });
}

std::vector<int> resolve_architecture(const RunConfig& cfg, std::size_t cluster_size,
                                      std::size_t total_points) {
    if (total_points > 0 && 4 * cluster_size >= total_points) return cfg.arch_large;
    return cfg.arch_small;
}

namespace {

struct ClusterSlices {
    Matrix x;         // hindcast model trends
    Matrix x_future;  // projected model trends
    std::vector<double> y;
    LatWeights w;
    std::vector<std::size_t> points; // global ocean-point ids
};

ClusterSlices gather_cluster(const PipelineData& data, const Partition& part, int c) {
    ClusterSlices s;
    s.points = part.cluster_points(c);
    const std::size_t nf = data.feature_trends.cols;
    s.x = Matrix(s.points.size(), nf);
    s.x_future = Matrix(s.points.size(), nf);
    s.y.resize(s.points.size());
    s.w.w.resize(s.points.size());
    for (std::size_t r = 0; r < s.points.size(); ++r) {
        const std::size_t p = s.points[r];
        for (std::size_t f = 0; f < nf; ++f) {
            s.x(r, f) = data.feature_trends(p, f);
            s.x_future(r, f) = data.projection_trends(p, f);
        }
        s.y[r] = data.obs_trend[p];
        s.w.w[r] = data.weights[p];
    }
    return s;
}

BackgroundSet sample_background(const Matrix& x_scaled, int budget, std::uint64_t seed) {
    BackgroundSet bg;
    if (budget <= 0 || static_cast<std::size_t>(budget) >= x_scaled.rows) {
        bg.rows = x_scaled;
        return bg;
    }
    std::vector<std::size_t> idx(x_scaled.rows);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(budget);
    std::sort(idx.begin(), idx.end());
    bg.rows = Matrix(idx.size(), x_scaled.cols);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto src = x_scaled.row(idx[r]);
        std::copy(src.begin(), src.end(), bg.rows.row(r).begin());
    }
    return bg;
}

} // namespace

RunResult run_pipeline(const RunConfig& cfg, const PipelineData& data,
                       const RunStages& stages) {
    RunResult res;
    res.stages = stages;
    res.obs_trend = data.obs_trend;
    res.partition = make_partition(cfg, data);

    const std::size_t np = data.mask.ocean_count();
    const int k = res.partition.k;
    res.models.resize(k);
    res.cluster_info.resize(k);
    res.train_prediction.assign(np, 0.0);
    res.future_prediction.assign(np, 0.0);
    res.mc.mean.assign(np, 0.0);
    res.mc.std.assign(np, 0.0);

    std::vector<Matrix> x_scaled_per_cluster(k);
    std::vector<std::vector<std::size_t>> points_per_cluster(k);

    stage("train", [&] {
        parallel_for(k, cfg.threads, [&](std::size_t ci) {
            const int c = static_cast<int>(ci);
            ClusterSlices slice = gather_cluster(data, res.partition, c);

            auto scaled = scaler_fit_transform(slice.x, slice.y);
            TrainingSet set{scaled.X, scaled.y, slice.w};

            ClusterTrainInfo& info = res.cluster_info[c];
            info.cluster = c;
            info.points = slice.points.size();

            TrainConfig tc = cfg.train;
            if (!cfg.candidates.empty()) {
                const auto report = kfold_select(cfg.candidates, set, cfg.kfold,
                                                 mix_seed(cfg.seed, kSeedKfold, ci));
                info.kfold_choice = report.best_index;
                info.hidden = cfg.candidates[report.best_index].hidden;
                tc = cfg.candidates[report.best_index].cfg;
            } else {
                info.hidden = resolve_architecture(cfg, slice.points.size(), np);
            }

            info.seed = mix_seed(cfg.seed, kSeedTrain, ci);
            Mlp proto = make_mlp(static_cast<int>(set.X.cols), info.hidden, tc.dropout);
            init_weights(proto, info.seed);
            tc.seed = info.seed;
            TrainResult trained = train(proto, set, tc);

            // deterministic predictions on both periods
            const auto yhat_train = forward_batch(trained.model, set.X);
            const Matrix xf_scaled = scaled.scaler.transform_features(slice.x_future);
            const auto yhat_future = forward_batch(trained.model, xf_scaled);
            std::vector<double> pred_train(slice.points.size());
            for (std::size_t r = 0; r < slice.points.size(); ++r) {
                pred_train[r] = scaled.scaler.inverse_label(yhat_train[r]);
                res.train_prediction[slice.points[r]] = pred_train[r];
                res.future_prediction[slice.points[r]] =
                    scaled.scaler.inverse_label(yhat_future[r]);
            }
            info.train_rmse = weighted_rmse(pred_train, slice.y, slice.w);
            info.train_corr = weighted_pearson(pred_train, slice.y, slice.w);

            res.models[c] = ClusterModel{std::move(trained.model), scaled.scaler, info.seed};
            x_scaled_per_cluster[c] = std::move(scaled.X);
            points_per_cluster[c] = std::move(slice.points);
        });
        return 0;
    });

    stage("scores", [&] {
        res.train_rmse = weighted_rmse(res.train_prediction, data.obs_trend, data.weights);
        res.train_corr = weighted_pearson(res.train_prediction, data.obs_trend, data.weights);

        // variability of the mean-removed prediction
        std::vector<double> centered = res.future_prediction;
        const double mu = weighted_mean(centered, data.weights);
        for (auto& v : centered) v -= mu;
        res.future_rms = rms_variability(centered, data.weights);
        res.future_corr_past =
            weighted_pearson(res.future_prediction, data.obs_trend, data.weights);
        return 0;
    });

    if (stages.uncertainty) stage("uncertainty", [&] {
        const std::uint64_t mc_seed = mix_seed(cfg.seed, kSeedDropout);
        for (int c = 0; c < k; ++c) {
            const auto& pts = points_per_cluster[c];
            const Matrix xf_scaled =
                res.models[c].scaler.transform_features(gather_cluster(data, res.partition, c).x_future);
            const McStats stats = mc_dropout_stats(res.models[c].mlp, res.models[c].scaler,
                                                   xf_scaled, pts, cfg.mc_passes, mc_seed,
                                                   cfg.threads);
            for (std::size_t r = 0; r < pts.size(); ++r) {
                res.mc.mean[pts[r]] = stats.mean[r];
                res.mc.std[pts[r]] = stats.std[r];
            }
        }
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
            num += data.weights[i] * res.mc.std[i] * res.mc.std[i];
            den += data.weights[i];
        }
        res.uncertainty_rms = std::sqrt(num / den);
        return 0;
    });

    if (stages.importance) stage("explain", [&] {
        std::vector<ModelFn> fns;
        std::vector<Matrix> pts;
        std::vector<BackgroundSet> bgs;
        for (int c = 0; c < k; ++c) {
            const Mlp* mlp = &res.models[c].mlp;
            fns.push_back([mlp](std::span<const double> x) { return forward(*mlp, x); });
            bgs.push_back(sample_background(x_scaled_per_cluster[c], cfg.shap_background,
                                            mix_seed(cfg.seed, kSeedBackground, c)));
            pts.push_back(x_scaled_per_cluster[c]);
        }
        res.importance = cluster_importance(fns, pts, bgs, res.partition, cfg.threads);
        return 0;
    });

    return res;
}

LeaveOneOutTable run_leave_one_out(const RunConfig& cfg, const PipelineData& data,
                                   const Partition& partition) {
    return stage("leave-one-out", [&] {
        LeaveOneOutConfig lc;
        lc.hindcast_window = data.hindcast_window;
        lc.projection_window = data.projection_window;
        lc.train = cfg.train;
        lc.train.seed = mix_seed(cfg.seed, kSeedLoo);
        lc.threads = cfg.threads;
        const auto sizes = partition.cluster_sizes();
        for (int c = 0; c < partition.k; ++c)
            lc.hidden_per_cluster.push_back(
                resolve_architecture(cfg, sizes[c], data.mask.ocean_count()));
        return leave_one_out(data.models, partition, lc);
    });
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const PipelineData& data,
                                const std::vector<int>& ks) {
    std::vector<SweepRow> rows;
    for (int k : ks) {
        RunConfig kcfg = cfg;
        kcfg.strategy = k == 1 ? Strategy::None : Strategy::Spectral;
        kcfg.k = k;
        const RunResult res = run_pipeline(kcfg, data, RunStages{true, false});
        const LeaveOneOutTable loo = run_leave_one_out(kcfg, data, res.partition);

        SweepRow row;
        row.k = k;
        row.train_rmse = res.train_rmse;
        row.future_rms = res.future_rms;
        row.uncertainty_rms = res.uncertainty_rms;
        row.corr_past = res.future_corr_past;
        row.loo_avg_corr = loo.average.ml_corr;
        rows.push_back(row);
    }
    return rows;
}

void write_partition_csv(const Partition& p, const fs::path& path) {
    CsvWriter csv(path);
    csv.row({"lat_index", "lon_index", "label"});
    std::size_t point = 0;
    for (const auto& [j, i] : p.mask.ocean_cells())
        csv.row({csv_num(static_cast<long long>(j)), csv_num(static_cast<long long>(i)),
                 csv_num(static_cast<long long>(p.labels[point++]))});
}

Partition read_partition_csv(const fs::path& path, const OceanMask& mask) {
    std::ifstream in(path);
    if (!in) throw FormatError("partition: cannot open " + path.string());
    std::string line;
    std::getline(in, line); // header
    std::vector<int> label_at(mask.grid.cells(), -1);
    int max_label = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int j, i, l;
        if (std::sscanf(line.c_str(), "%d,%d,%d", &j, &i, &l) != 3)
            throw FormatError("partition: bad row '" + line + "'");
        label_at[mask.grid.cell_index(j, i)] = l;
        max_label = std::max(max_label, l);
    }
    Partition p{mask, {}, max_label + 1};
    for (const auto& [j, i] : mask.ocean_cells()) {
        const int l = label_at[mask.grid.cell_index(j, i)];
        if (l < 0)
            throw DataError("partition: missing label for ocean cell (" + std::to_string(j) +
                            ", " + std::to_string(i) + ")");
        p.labels.push_back(l);
    }
    validate_partition(p);
    return p;
}

void write_loo_csv(const LeaveOneOutTable& table, const fs::path& path) {
    CsvWriter csv(path);
    std::vector<std::string> header{"metric"};
    for (const auto& r : table.rows) header.push_back(r.held_out);
    header.push_back("average");
    csv.row(header);

    auto metric_row = [&](const std::string& name, auto getter) {
        std::vector<std::string> row{name};
        for (const auto& r : table.rows) row.push_back(csv_num(getter(r)));
        row.push_back(csv_num(getter(table.average)));
        csv.row(row);
    };
    metric_row("persistence_corr", [](const LeaveOneOutRow& r) { return r.persistence_corr; });
    metric_row("ml_corr", [](const LeaveOneOutRow& r) { return r.ml_corr; });
    metric_row("persistence_rmse", [](const LeaveOneOutRow& r) { return r.persistence_rmse; });
    metric_row("ml_rmse", [](const LeaveOneOutRow& r) { return r.ml_rmse; });
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const fs::path& path) {
    CsvWriter csv(path);
    csv.row({"n_clusters", "train_rmse", "future_rms", "uncertainty_rms",
             "corr_with_past", "loo_avg_corr"});
    for (const auto& r : rows)
        csv.row({csv_num(static_cast<long long>(r.k)), csv_num(r.train_rmse),
                 csv_num(r.future_rms), csv_num(r.uncertainty_rms), csv_num(r.corr_past),
                 csv_num(r.loo_avg_corr)});
}

namespace {

json window_json(const YearWindow& w) {
    return {{"start_year", w.start_year}, {"end_year", w.end_year}};
}

std::string file_hash(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FormatError("hash: cannot open " + p.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return buf;
}

} // namespace

void write_run_outputs(const RunConfig& cfg, const PipelineData& data, const RunResult& res,
                       const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const OceanMask& mask = data.mask;

    auto save_field = [&](const std::vector<double>& vals, const std::string& name,
                          int start_year) {
        const Field f = field_from_ocean(mask, vals);
        Grd1Data d = from_field(f, mask);
        d.start_year = start_year;
        write_grd1(d, out_dir / (name + ".grd1"));
        write_heatmap_pgm(f, mask, out_dir / (name + ".pgm"));
        write_heatmap_ppm(f, mask, out_dir / (name + ".ppm"));
    };

    const int hy = data.observation.start_year;
    const int py = data.models.front().projection.start_year;
    save_field(res.obs_trend, "obs_trend_hindcast", hy);
    save_field(res.train_prediction, "prediction_hindcast", hy);
    save_field(res.future_prediction, "prediction_future", py);
    if (res.stages.uncertainty) {
        save_field(res.mc.mean, "mc_mean", py);
        save_field(res.mc.std, "mc_std", py);
    }

    write_partition_csv(res.partition, out_dir / "partition.csv");
    write_partition_ppm(res.partition, out_dir / "partition.ppm");
    write_models(res.models, out_dir / "models.mdl1");

    {
        CsvWriter csv(out_dir / "scores.csv");
        csv.row({"metric", "scope", "value"});
        csv.row({"train_rmse", "overall", csv_num(res.train_rmse)});
        csv.row({"train_corr", "overall", csv_num(res.train_corr)});
        for (const auto& info : res.cluster_info) {
            const std::string scope = "cluster_" + std::to_string(info.cluster);
            csv.row({"train_rmse", scope, csv_num(info.train_rmse)});
            csv.row({"train_corr", scope, csv_num(info.train_corr)});
            csv.row({"points", scope, csv_num(static_cast<long long>(info.points))});
        }
        csv.row({"future_rms", "overall", csv_num(res.future_rms)});
        csv.row({"future_corr_with_past", "overall", csv_num(res.future_corr_past)});
        if (res.stages.uncertainty)
            csv.row({"uncertainty_rms", "overall", csv_num(res.uncertainty_rms)});
    }

    if (res.stages.importance) {
        CsvWriter csv(out_dir / "shap_importance.csv");
        csv.row({"cluster", "rank", "feature", "model", "mean_abs_phi"});
        for (const auto& fi : res.importance) {
            for (std::size_t r = 0; r < fi.ranked.size(); ++r) {
                const auto [feat, val] = fi.ranked[r];
                csv.row({csv_num(static_cast<long long>(fi.cluster)),
                         csv_num(static_cast<long long>(r)),
                         csv_num(static_cast<long long>(feat)), cfg.models[feat].name,
                         csv_num(val)});
            }
        }
    }

    json manifest;
    manifest["strategy"] = to_string(cfg.strategy);
    manifest["k"] = res.partition.k;
    manifest["seed"] = cfg.seed;
    manifest["threads"] = cfg.threads;
    manifest["windows"] = {{"hindcast", window_json(data.hindcast_window)},
                           {"projection", window_json(data.projection_window)}};
    manifest["segmentation"] = {
        {"sigma_policy", cfg.sigma > 0.0 ? "fixed" : "median"},
        {"sigma_value", cfg.sigma},
        {"knn", cfg.knn},
        {"boxes",
         {{"north_atlantic",
           {{"lat_min", cfg.boxes.north_atlantic.lat_min},
            {"lat_max", cfg.boxes.north_atlantic.lat_max},
            {"lon_min", cfg.boxes.north_atlantic.lon_min},
            {"lon_max", cfg.boxes.north_atlantic.lon_max}}},
          {"north_pacific",
           {{"lat_min", cfg.boxes.north_pacific.lat_min},
            {"lat_max", cfg.boxes.north_pacific.lat_max},
            {"lon_min", cfg.boxes.north_pacific.lon_min},
            {"lon_max", cfg.boxes.north_pacific.lon_max}}},
          {"atlantic_notch_lon_max", cfg.boxes.atlantic_notch_lon_max},
          {"atlantic_notch_lat_max", cfg.boxes.atlantic_notch_lat_max},
          {"southern_lat_max", cfg.boxes.southern_lat_max}}}};
    manifest["optimizer"] = {{"kind", "adam"},    {"beta1", 0.9},
                             {"beta2", 0.999},    {"epsilon", 1e-8},
                             {"learning_rate", cfg.train.learning_rate},
                             {"epochs", cfg.train.epochs},
                             {"batch_size", cfg.train.batch_size},
                             {"l2", cfg.train.l2},
                             {"dropout", cfg.train.dropout},
                             {"patience", cfg.train.patience},
                             {"val_fraction", cfg.train.val_fraction}};
    manifest["mc_passes"] = cfg.mc_passes;
    manifest["shap_background"] = cfg.shap_background;
    manifest["clusters"] = json::array();
    for (const auto& info : res.cluster_info)
        manifest["clusters"].push_back({{"cluster", info.cluster},
                                        {"points", info.points},
                                        {"hidden", info.hidden},
                                        {"seed", info.seed},
                                        {"kfold_choice", info.kfold_choice}});
    manifest["datasets"] = json::array();
    manifest["datasets"].push_back(
        {{"name", "observation"},
         {"path", cfg.observation},
         {"fnv1a64", file_hash(cfg.base_dir / cfg.observation)}});
    for (const auto& m : cfg.models) {
        manifest["datasets"].push_back({{"name", m.name + "_hindcast"},
                                        {"path", m.hindcast},
                                        {"fnv1a64", file_hash(cfg.base_dir / m.hindcast)}});
        manifest["datasets"].push_back({{"name", m.name + "_projection"},
                                        {"path", m.projection},
                                        {"fnv1a64", file_hash(cfg.base_dir / m.projection)}});
    }
    std::ofstream mf(out_dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
}

} // namespace seatrend
