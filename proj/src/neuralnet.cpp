#include "seatrend/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "seatrend/errors.hpp"
#include "seatrend/rng.hpp"

namespace seatrend {

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& w : weights) n += w.data.size();
    for (const auto& b : biases) n += b.size();
    return n;
}

Mlp make_mlp(int input_dim, const std::vector<int>& hidden, double dropout_rate,
             int dropout_layer) {
    if (input_dim < 1) throw ArgumentError("make_mlp: input dimension must be >= 1");
    for (int h : hidden)
        if (h < 1) throw ArgumentError("make_mlp: hidden sizes must be >= 1");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw ArgumentError("make_mlp: dropout rate must lie in [0, 1)");
    if (!hidden.empty() && (dropout_layer < 0 || dropout_layer >= static_cast<int>(hidden.size())))
        throw ArgumentError("make_mlp: dropout layer index out of range");

    Mlp m;
    m.layer_sizes.push_back(input_dim);
    m.layer_sizes.insert(m.layer_sizes.end(), hidden.begin(), hidden.end());
    m.layer_sizes.push_back(1);
    m.dropout_rate = dropout_rate;
    m.dropout_layer = dropout_layer;
    for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
        m.weights.emplace_back(m.layer_sizes[l + 1], m.layer_sizes[l]);
        m.biases.emplace_back(m.layer_sizes[l + 1], 0.0);
    }
    return m;
}

void init_weights(Mlp& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& w : m.weights) {
        const double sd = std::sqrt(2.0 / static_cast<double>(w.cols));
        std::normal_distribution<double> dist(0.0, sd);
        for (auto& v : w.data) v = dist(rng);
    }
    for (auto& b : m.biases) std::fill(b.begin(), b.end(), 0.0);
}

void Scaler::fit(const Matrix& X, std::span<const double> y) {
    if (X.rows == 0 || X.rows != y.size())
        throw ArgumentError("scaler: row/label counts disagree or empty");
    x_min.assign(X.cols, std::numeric_limits<double>::max());
    x_max.assign(X.cols, std::numeric_limits<double>::lowest());
    for (std::size_t r = 0; r < X.rows; ++r)
        for (std::size_t c = 0; c < X.cols; ++c) {
            x_min[c] = std::min(x_min[c], X(r, c));
            x_max[c] = std::max(x_max[c], X(r, c));
        }
    for (std::size_t c = 0; c < X.cols; ++c)
        if (x_max[c] == x_min[c])
            throw DegenerateInputError("scaler: feature column " + std::to_string(c) +
                                       " is constant");
    y_min = *std::min_element(y.begin(), y.end());
    y_max = *std::max_element(y.begin(), y.end());
    if (y_max == y_min)
        throw DegenerateInputError("scaler: label column is constant");
    fitted = true;
}

Matrix Scaler::transform_features(const Matrix& X) const {
    if (X.cols != x_min.size())
        throw ArgumentError("scaler: feature count does not match fit");
    Matrix out(X.rows, X.cols);
    for (std::size_t r = 0; r < X.rows; ++r)
        for (std::size_t c = 0; c < X.cols; ++c)
            out(r, c) = (X(r, c) - x_min[c]) / (x_max[c] - x_min[c]);
    return out;
}

std::vector<double> Scaler::transform_labels(std::span<const double> y) const {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = transform_label(y[i]);
    return out;
}

double Scaler::transform_label(double y) const { return (y - y_min) / (y_max - y_min); }

double Scaler::inverse_label(double y_scaled) const {
    return y_scaled * (y_max - y_min) + y_min;
}

ScaledData scaler_fit_transform(const Matrix& X_raw, std::span<const double> y_raw) {
    ScaledData out;
    out.scaler.fit(X_raw, y_raw);
    out.X = out.scaler.transform_features(X_raw);
    out.y = out.scaler.transform_labels(y_raw);
    return out;
}

namespace {

// y = x * W^T + b, x: [B x in], W: [out x in]
Matrix affine(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    Matrix y(x.rows, w.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto xr = x.row(r);
        auto yr = y.row(r);
        for (std::size_t o = 0; o < w.rows; ++o) {
            const auto wo = w.row(o);
            double acc = b[o];
            for (std::size_t c = 0; c < xr.size(); ++c) acc += xr[c] * wo[c];
            yr[o] = acc;
        }
    }
    return y;
}

struct ForwardCache {
    std::vector<Matrix> activations; // activations[0] = input, size L+1
    std::vector<Matrix> pre;         // pre-activations per weight layer
    Matrix dropout_scale;            // per-unit factors on the dropped layer (may be empty)
};

// use_dropout draws one mask per example per unit; with dropout_rate == 0 the
// stochastic path is identical to the deterministic one and draws nothing.
ForwardCache forward_all(const Mlp& m, const Matrix& X, bool use_dropout,
                         std::mt19937_64* rng) {
    const int L = m.n_weight_layers();
    ForwardCache cache;
    cache.activations.resize(L + 1);
    cache.pre.resize(L);
    cache.activations[0] = X;

    const bool drop = use_dropout && m.dropout_rate > 0.0;
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    for (int l = 0; l < L; ++l) {
        cache.pre[l] = affine(cache.activations[l], m.weights[l], m.biases[l]);
        if (l == L - 1) {
            cache.activations[l + 1] = cache.pre[l]; // linear output
            break;
        }
        Matrix a = cache.pre[l];
        for (auto& v : a.data) v = v > 0.0 ? v : 0.0;
        if (drop && l == m.dropout_layer) {
            const double keep_scale = 1.0 / (1.0 - m.dropout_rate);
            cache.dropout_scale = Matrix(a.rows, a.cols);
            for (std::size_t i = 0; i < a.data.size(); ++i) {
                const double f = uni(*rng) < m.dropout_rate ? 0.0 : keep_scale;
                cache.dropout_scale.data[i] = f;
                a.data[i] *= f;
            }
        }
        cache.activations[l + 1] = std::move(a);
    }
    return cache;
}

void check_input_dim(const Mlp& m, std::size_t dim) {
    if (static_cast<int>(dim) != m.input_dim())
        throw ArgumentError("forward: input has " + std::to_string(dim) +
                            " features, net expects " + std::to_string(m.input_dim()));
}

double batch_weight_sum(const TrainingSet& b) {
    double s = 0.0;
    for (double w : b.w.w) s += w;
    return s;
}

double squared_weight_norm(const Mlp& m) {
    double s = 0.0;
    for (const auto& w : m.weights)
        for (double v : w.data) s += v * v;
    return s;
}

Gradients backprop(const Mlp& m, const ForwardCache& cache, const TrainingSet& batch,
                   double l2) {
    const int L = m.n_weight_layers();
    const std::size_t B = batch.X.rows;
    const double w_sum = batch_weight_sum(batch);

    Gradients g;
    g.w.reserve(L);
    g.b.reserve(L);
    for (int l = 0; l < L; ++l) {
        g.w.emplace_back(m.weights[l].rows, m.weights[l].cols);
        g.b.emplace_back(m.biases[l].size(), 0.0);
    }

    // output delta: d(weighted MSE)/d(yhat)
    Matrix delta(B, 1);
    const auto& yhat = cache.activations[L];
    for (std::size_t i = 0; i < B; ++i)
        delta(i, 0) = 2.0 * batch.w[i] * (yhat(i, 0) - batch.y[i]) / w_sum;

    for (int l = L - 1; l >= 0; --l) {
        const Matrix& a_in = cache.activations[l];
        // dW = delta^T * a_in, db = column sums of delta
        for (std::size_t o = 0; o < g.w[l].rows; ++o) {
            auto grad_row = g.w[l].row(o);
            double db = 0.0;
            for (std::size_t i = 0; i < B; ++i) {
                const double d = delta(i, o);
                db += d;
                const auto ai = a_in.row(i);
                for (std::size_t c = 0; c < grad_row.size(); ++c) grad_row[c] += d * ai[c];
            }
            g.b[l][o] = db;
        }
        if (l2 != 0.0)
            for (std::size_t i = 0; i < g.w[l].data.size(); ++i)
                g.w[l].data[i] += 2.0 * l2 * m.weights[l].data[i];

        if (l == 0) break;

        // delta for the previous layer: (delta * W) gated by relu and dropout
        const Matrix& w = m.weights[l];
        Matrix prev(B, w.cols, 0.0);
        for (std::size_t i = 0; i < B; ++i) {
            const auto dr = delta.row(i);
            auto pr = prev.row(i);
            for (std::size_t o = 0; o < w.rows; ++o) {
                const double d = dr[o];
                if (d == 0.0) continue;
                const auto wo = w.row(o);
                for (std::size_t c = 0; c < w.cols; ++c) pr[c] += d * wo[c];
            }
        }
        const Matrix& z = cache.pre[l - 1];
        for (std::size_t i = 0; i < prev.data.size(); ++i)
            if (z.data[i] <= 0.0) prev.data[i] = 0.0;
        if (!cache.dropout_scale.empty() && l - 1 == m.dropout_layer)
            for (std::size_t i = 0; i < prev.data.size(); ++i)
                prev.data[i] *= cache.dropout_scale.data[i];
        delta = std::move(prev);
    }
    return g;
}

double objective_from_cache(const Mlp& m, const ForwardCache& cache,
                            const TrainingSet& batch, double l2) {
    const auto& yhat = cache.activations.back();
    double num = 0.0;
    const double w_sum = batch_weight_sum(batch);
    for (std::size_t i = 0; i < batch.X.rows; ++i) {
        const double r = yhat(i, 0) - batch.y[i];
        num += batch.w[i] * r * r;
    }
    return num / w_sum + l2 * squared_weight_norm(m);
}

TrainingSet subset(const TrainingSet& data, std::span<const std::size_t> idx) {
    TrainingSet out;
    out.X = Matrix(idx.size(), data.X.cols);
    out.y.resize(idx.size());
    out.w.w.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto src = data.X.row(idx[r]);
        std::copy(src.begin(), src.end(), out.X.row(r).begin());
        out.y[r] = data.y[idx[r]];
        out.w.w[r] = data.w[idx[r]];
    }
    return out;
}

void check_training_set(const TrainingSet& data) {
    if (data.X.rows == 0) throw ArgumentError("training set is empty");
    if (data.X.rows != data.y.size() || data.X.rows != data.w.size())
        throw ArgumentError("training set: row/label/weight counts disagree");
    for (double w : data.w.w)
        if (!(w > 0.0)) throw ArgumentError("training set: weights must be positive");
}

} // namespace

double forward(const Mlp& m, std::span<const double> x) {
    check_input_dim(m, x.size());
    Matrix X(1, x.size());
    std::copy(x.begin(), x.end(), X.data.begin());
    return forward_all(m, X, false, nullptr).activations.back()(0, 0);
}

std::vector<double> forward_batch(const Mlp& m, const Matrix& X) {
    check_input_dim(m, X.cols);
    const auto cache = forward_all(m, X, false, nullptr);
    const auto& yhat = cache.activations.back();
    std::vector<double> out(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) out[i] = yhat(i, 0);
    return out;
}

double forward_dropout(const Mlp& m, std::span<const double> x, std::mt19937_64& rng) {
    check_input_dim(m, x.size());
    Matrix X(1, x.size());
    std::copy(x.begin(), x.end(), X.data.begin());
    return forward_all(m, X, true, &rng).activations.back()(0, 0);
}

double weighted_mse(const Mlp& m, const TrainingSet& batch) { return loss(m, batch, 0.0); }

double loss(const Mlp& m, const TrainingSet& batch, double l2) {
    check_training_set(batch);
    check_input_dim(m, batch.X.cols);
    const auto cache = forward_all(m, batch.X, false, nullptr);
    return objective_from_cache(m, cache, batch, l2);
}

Gradients gradients(const Mlp& m, const TrainingSet& batch, double l2) {
    check_training_set(batch);
    check_input_dim(m, batch.X.cols);
    const auto cache = forward_all(m, batch.X, false, nullptr);
    return backprop(m, cache, batch, l2);
}

namespace {

struct AdamState {
    std::vector<Matrix> mw, vw;
    std::vector<std::vector<double>> mb, vb;
    long t = 0;

    explicit AdamState(const Mlp& m) {
        for (const auto& w : m.weights) {
            mw.emplace_back(w.rows, w.cols);
            vw.emplace_back(w.rows, w.cols);
        }
        for (const auto& b : m.biases) {
            mb.emplace_back(b.size(), 0.0);
            vb.emplace_back(b.size(), 0.0);
        }
    }

    void step(Mlp& m, const Gradients& g, double lr) {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        ++t;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        auto update = [&](double& p, double& mm, double& vv, double grad) {
            mm = beta1 * mm + (1.0 - beta1) * grad;
            vv = beta2 * vv + (1.0 - beta2) * grad * grad;
            // lr == 0 must leave parameters bitwise untouched
            if (lr != 0.0) p -= lr * (mm / c1) / (std::sqrt(vv / c2) + eps);
        };
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            for (std::size_t i = 0; i < m.weights[l].data.size(); ++i)
                update(m.weights[l].data[i], mw[l].data[i], vw[l].data[i], g.w[l].data[i]);
            for (std::size_t i = 0; i < m.biases[l].size(); ++i)
                update(m.biases[l][i], mb[l][i], vb[l][i], g.b[l][i]);
        }
    }
};

} // namespace

TrainResult train(const Mlp& start, const TrainingSet& data, const TrainConfig& cfg) {
    check_training_set(data);
    check_input_dim(start, data.X.cols);
    if (cfg.epochs < 1 || cfg.batch_size < 1)
        throw ArgumentError("train: epochs and batch size must be >= 1");
    if (cfg.learning_rate < 0.0 || cfg.l2 < 0.0 || cfg.patience < 0)
        throw ArgumentError("train: negative hyperparameter");
    if (cfg.dropout < 0.0 || cfg.dropout >= 1.0)
        throw ArgumentError("train: dropout must lie in [0, 1)");

    TrainResult res;
    res.model = start;
    res.model.dropout_rate = cfg.dropout;

    const std::size_t n = data.X.rows;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    // independent streams: validation split, epoch shuffles, dropout masks
    std::mt19937_64 split_rng(mix_seed(cfg.seed, 0));
    std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, 1));
    std::mt19937_64 dropout_rng(mix_seed(cfg.seed, 2));

    TrainingSet train_set;
    TrainingSet val_set;
    const bool early_stop = cfg.patience > 0 && n >= 2;
    if (early_stop) {
        std::vector<std::size_t> idx = order;
        std::shuffle(idx.begin(), idx.end(), split_rng);
        std::size_t n_val = static_cast<std::size_t>(std::round(cfg.val_fraction * n));
        n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
        val_set = subset(data, std::span(idx).subspan(n - n_val));
        train_set = subset(data, std::span(idx).first(n - n_val));
    } else {
        train_set = data;
    }

    const std::size_t nt = train_set.X.rows;
    std::vector<std::size_t> perm(nt);
    std::iota(perm.begin(), perm.end(), 0);

    AdamState adam(res.model);
    Mlp best_model = res.model;
    double best_val = std::numeric_limits<double>::max();
    int since_best = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), shuffle_rng);

        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t pos = 0; pos < nt; pos += cfg.batch_size) {
            const std::size_t len = std::min<std::size_t>(cfg.batch_size, nt - pos);
            const TrainingSet batch = subset(train_set, std::span(perm).subspan(pos, len));
            const auto cache = forward_all(res.model, batch.X, true, &dropout_rng);
            const double obj = objective_from_cache(res.model, cache, batch, cfg.l2);
            if (!std::isfinite(obj))
                throw TrainingDivergedError(
                    "train: non-finite loss at epoch " + std::to_string(epoch), epoch);
            epoch_loss += obj;
            ++n_batches;
            const Gradients g = backprop(res.model, cache, batch, cfg.l2);
            adam.step(res.model, g, cfg.learning_rate);
        }
        res.history.push_back(epoch_loss / n_batches);

        if (early_stop) {
            const double val = weighted_mse(res.model, val_set);
            res.val_history.push_back(val);
            if (val < best_val) {
                best_val = val;
                best_model = res.model;
                res.best_epoch = epoch;
                since_best = 0;
            } else if (++since_best >= cfg.patience) {
                break;
            }
        }
    }

    if (early_stop) res.model = std::move(best_model);
    return res;
}

KFoldReport kfold_select(const std::vector<Candidate>& candidates, const TrainingSet& data,
                         int k, std::uint64_t seed) {
    if (candidates.empty()) throw ArgumentError("kfold_select: no candidates");
    if (k < 2) throw ArgumentError("kfold_select: k must be >= 2");
    check_training_set(data);
    const std::size_t n = data.X.rows;
    if (n < static_cast<std::size_t>(k))
        throw ArgumentError("kfold_select: fewer rows than folds");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    // near-equal folds: the first n % k folds take one extra row
    std::vector<std::pair<std::size_t, std::size_t>> folds; // offset, length
    const std::size_t base = n / k, extra = n % k;
    std::size_t off = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        folds.emplace_back(off, len);
        off += len;
    }

    KFoldReport report;
    report.fold_scores = Matrix(candidates.size(), k);
    report.mean_scores.assign(candidates.size(), 0.0);

    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const auto& cand = candidates[ci];
        for (int f = 0; f < k; ++f) {
            std::vector<std::size_t> train_idx, val_idx;
            for (int g = 0; g < k; ++g) {
                auto [o, len] = folds[g];
                for (std::size_t i = o; i < o + len; ++i)
                    (g == f ? val_idx : train_idx).push_back(idx[i]);
            }
            const TrainingSet tr = subset(data, train_idx);
            const TrainingSet va = subset(data, val_idx);

            Mlp m = make_mlp(static_cast<int>(data.X.cols), cand.hidden, cand.cfg.dropout);
            const std::uint64_t fold_seed = mix_seed(seed, ci, static_cast<std::uint64_t>(f));
            init_weights(m, fold_seed);
            TrainConfig cfg = cand.cfg;
            cfg.seed = fold_seed;
            const TrainResult r = train(m, tr, cfg);
            report.fold_scores(ci, f) = weighted_mse(r.model, va);
        }
        double mean = 0.0;
        for (int f = 0; f < k; ++f) mean += report.fold_scores(ci, f);
        report.mean_scores[ci] = mean / k;
    }

    report.best_index = 0;
    for (std::size_t ci = 1; ci < candidates.size(); ++ci)
        if (report.mean_scores[ci] < report.mean_scores[report.best_index])
            report.best_index = static_cast<int>(ci);
    return report;
}

std::vector<int> default_architecture(std::size_t cluster_size, std::size_t total_points) {
    if (total_points > 0 && 4 * cluster_size >= total_points) return {1024, 512, 256};
    return {256, 128};
}

} // namespace seatrend
