#include "seatrend/evalmetrics.hpp"

#include <cmath>

#include "seatrend/errors.hpp"
#include "seatrend/parallel.hpp"
#include "seatrend/rng.hpp"

namespace seatrend {

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t w) {
    if (a != b || a != w)
        throw ArgumentError("weighted metric: value/weight lengths differ");
    if (a == 0) throw ArgumentError("weighted metric: empty input");
}

} // namespace

double weighted_rmse(std::span<const double> a, std::span<const double> b,
                     const LatWeights& w) {
    check_lengths(a.size(), b.size(), w.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        num += w[i] * d * d;
        den += w[i];
    }
    return std::sqrt(num / den);
}

double weighted_pearson(std::span<const double> a, std::span<const double> b,
                        const LatWeights& w) {
    check_lengths(a.size(), b.size(), w.size());
    double den = 0.0, ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        den += w[i];
        ma += w[i] * a[i];
        mb += w[i] * b[i];
    }
    ma /= den;
    mb /= den;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        cov += w[i] * da * db;
        va += w[i] * da * da;
        vb += w[i] * db * db;
    }
    if (va == 0.0 || vb == 0.0)
        throw DegenerateInputError("weighted_pearson: constant input field");
    return cov / std::sqrt(va * vb);
}

double rms_variability(std::span<const double> a, const LatWeights& w) {
    check_lengths(a.size(), a.size(), w.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += w[i] * a[i] * a[i];
        den += w[i];
    }
    return std::sqrt(num / den);
}

double weighted_rmse(const Field& a, const Field& b, const OceanMask& mask,
                     const LatWeights& w) {
    return weighted_rmse(ocean_values(a, mask), ocean_values(b, mask), w);
}

double weighted_pearson(const Field& a, const Field& b, const OceanMask& mask,
                        const LatWeights& w) {
    return weighted_pearson(ocean_values(a, mask), ocean_values(b, mask), w);
}

double rms_variability(const Field& a, const OceanMask& mask, const LatWeights& w) {
    return rms_variability(ocean_values(a, mask), w);
}

YearWindow following_window(const YearWindow& w) {
    const int span = w.end_year - w.start_year + 1;
    return YearWindow{w.end_year + 1, w.end_year + span};
}

TrendMap persistence(const TrendMap& past, const YearWindow& future) {
    return TrendMap{past.mask, past.slope, future};
}

LeaveOneOutTable leave_one_out(const std::vector<ModelDataset>& datasets,
                               const Partition& partition, const LeaveOneOutConfig& cfg) {
    const std::size_t n_models = datasets.size();
    if (n_models < 3)
        throw ArgumentError("leave_one_out: need at least 3 datasets so two features remain");
    for (const auto& d : datasets)
        if (d.hindcast.mask != partition.mask || d.projection.mask != partition.mask)
            throw ArgumentError("leave_one_out: dataset mask differs from partition mask");
    validate_partition(partition);

    const LatWeights w = area_weights(partition.mask);
    const std::size_t n_points = partition.mask.ocean_count();

    // one trend map per model and period
    std::vector<std::vector<double>> hind(n_models), proj(n_models);
    for (std::size_t d = 0; d < n_models; ++d) {
        hind[d] = trend_map(datasets[d].hindcast, cfg.hindcast_window).slope;
        proj[d] = trend_map(datasets[d].projection, cfg.projection_window).slope;
    }

    LeaveOneOutTable table;
    table.rows.resize(n_models);

    parallel_for(n_models, cfg.threads, [&](std::size_t d) {
        const std::size_t n_feat = n_models - 1;

        // feature columns keep the original model order, skipping the held-out
        Matrix x_hind(n_points, n_feat), x_proj(n_points, n_feat);
        for (std::size_t p = 0; p < n_points; ++p) {
            std::size_t col = 0;
            for (std::size_t m = 0; m < n_models; ++m) {
                if (m == d) continue;
                x_hind(p, col) = hind[m][p];
                x_proj(p, col) = proj[m][p];
                ++col;
            }
        }

        std::vector<double> prediction(n_points, 0.0);
        for (int c = 0; c < partition.k; ++c) {
            const auto pts = partition.cluster_points(c);

            Matrix cx(pts.size(), n_feat), px(pts.size(), n_feat);
            std::vector<double> cy(pts.size());
            LatWeights cw;
            cw.w.resize(pts.size());
            for (std::size_t r = 0; r < pts.size(); ++r) {
                for (std::size_t f = 0; f < n_feat; ++f) {
                    cx(r, f) = x_hind(pts[r], f);
                    px(r, f) = x_proj(pts[r], f);
                }
                cy[r] = hind[d][pts[r]];
                cw.w[r] = w[pts[r]];
            }

            auto scaled = scaler_fit_transform(cx, cy);
            TrainingSet set{std::move(scaled.X), std::move(scaled.y), std::move(cw)};

            const std::vector<int> hidden =
                c < static_cast<int>(cfg.hidden_per_cluster.size()) &&
                        !cfg.hidden_per_cluster[c].empty()
                    ? cfg.hidden_per_cluster[c]
                    : default_architecture(pts.size(), n_points);

            Mlp proto = make_mlp(static_cast<int>(n_feat), hidden, cfg.train.dropout);
            TrainConfig tc = cfg.train;
            tc.seed = mix_seed(cfg.train.seed, d, static_cast<std::uint64_t>(c));
            init_weights(proto, tc.seed);
            const TrainResult trained = train(proto, set, tc);

            const Matrix px_scaled = scaled.scaler.transform_features(px);
            const std::vector<double> yhat = forward_batch(trained.model, px_scaled);
            for (std::size_t r = 0; r < pts.size(); ++r)
                prediction[pts[r]] = scaled.scaler.inverse_label(yhat[r]);
        }

        LeaveOneOutRow row;
        row.held_out = datasets[d].name;
        row.ml_rmse = weighted_rmse(prediction, proj[d], w);
        row.ml_corr = weighted_pearson(prediction, proj[d], w);
        row.persistence_rmse = weighted_rmse(hind[d], proj[d], w);
        row.persistence_corr = weighted_pearson(hind[d], proj[d], w);
        table.rows[d] = std::move(row);
    });

    table.average.held_out = "average";
    for (const auto& r : table.rows) {
        table.average.ml_rmse += r.ml_rmse;
        table.average.ml_corr += r.ml_corr;
        table.average.persistence_rmse += r.persistence_rmse;
        table.average.persistence_corr += r.persistence_corr;
    }
    table.average.ml_rmse /= n_models;
    table.average.ml_corr /= n_models;
    table.average.persistence_rmse /= n_models;
    table.average.persistence_corr /= n_models;
    return table;
}

} // namespace seatrend
