// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <vector>

#include "fd_oracle.hpp"
#include "seatrend/evalmetrics.hpp"
#include "seatrend/explain.hpp"
#include "seatrend/grd1.hpp"
#include "seatrend/neuralnet.hpp"
#include "seatrend/pipeline.hpp"
#include "seatrend/segmentation.hpp"
#include "seatrend/synth.hpp"
#include "seatrend/trend.hpp"
#include "seatrend/uncertainty.hpp"

using namespace seatrend;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------- criterion 1
void check_ols_oracle() {
    std::mt19937_64 rng(101);
    std::normal_distribution<double> noise(0.0, 25.0);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);

    std::vector<double> t(360);
    for (int m = 0; m < 360; ++m) t[m] = month_center(1993, m);

    bool ok = true;
    double worst = 0.0;
    std::vector<std::vector<double>> series(1000, std::vector<double>(360));
    for (auto& y : series) {
        const double a = coef(rng), b = coef(rng);
        for (int m = 0; m < 360; ++m) y[m] = a + b * t[m] + noise(rng);
    }

    const auto t0 = Clock::now();
    std::vector<double> got(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) got[i] = fit_linear_trend(series[i], t);
    const double elapsed = seconds_since(t0);

    for (std::size_t i = 0; i < series.size(); ++i) {
        // independent route: raw normal equations via Cramer's rule. The
        // uncentered sums cancel catastrophically around year ~2000, so the
        // oracle accumulates in long double to stay trustworthy at 1e-10.
        const auto& y = series[i];
        long double st = 0.0L, stt = 0.0L, sy = 0.0L, sty = 0.0L;
        for (int m = 0; m < 360; ++m) {
            st += t[m];
            stt += static_cast<long double>(t[m]) * t[m];
            sy += y[m];
            sty += static_cast<long double>(t[m]) * y[m];
        }
        const double oracle =
            static_cast<double>((360.0L * sty - st * sy) / (360.0L * stt - st * st));
        const double rel = std::abs(got[i] - oracle) / std::max(1e-300, std::abs(oracle));
        worst = std::max(worst, rel);
        if (rel >= 1e-10) ok = false;
    }

    // exact line
    std::vector<double> line(360);
    for (int m = 0; m < 360; ++m) line[m] = 2.0 + 0.5 * t[m];
    const double slope = fit_linear_trend(line, t);
    if (std::abs(slope - 0.5) > 1e-12) ok = false;
    if (elapsed >= 1.0) ok = false;

    char detail[128];
    std::snprintf(detail, sizeof(detail), "worst rel err %.2e, %.3f s for 1000 fits", worst,
                  elapsed);
    report(1, "least-squares slope matches the normal equations", ok, detail);
}

// ---------------------------------------------------------------- criterion 2
void check_weighted_reductions() {
    const OceanMask mask = all_ocean(Grid{20, 12, 9.0, -82.5, 18.0, 15.0});
    const LatWeights w = area_weights(mask);
    const std::size_t n = mask.ocean_count();
    std::mt19937_64 rng(202);
    std::normal_distribution<double> dist(0.0, 3.0);

    bool ok = true;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = dist(rng);
        for (auto& v : b) v = dist(rng);

        double den = 0.0, sa = 0.0, sb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            den += w[i];
            sa += w[i] * a[i];
            sb += w[i] * b[i];
        }
        const double ma = sa / den, mb = sb / den;
        double se = 0.0, cov = 0.0, va = 0.0, vb = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            se += w[i] * (a[i] - b[i]) * (a[i] - b[i]);
            cov += w[i] * (a[i] - ma) * (b[i] - mb);
            va += w[i] * (a[i] - ma) * (a[i] - ma);
            vb += w[i] * (b[i] - mb) * (b[i] - mb);
            s2 += w[i] * a[i] * a[i];
        }
        auto close = [](double x, double y) {
            return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
        };
        if (!close(weighted_mean(a, w), ma)) ok = false;
        if (!close(weighted_rmse(a, b, w), std::sqrt(se / den))) ok = false;
        if (!close(weighted_pearson(a, b, w), cov / std::sqrt(va * vb))) ok = false;
        if (!close(rms_variability(a, w), std::sqrt(s2 / den))) ok = false;
    }

    // plain identities
    std::vector<double> a(n);
    for (auto& v : a) v = dist(rng);
    if (weighted_rmse(a, a, w) != 0.0) ok = false;

    const std::vector<double> c(n, -0.5); // dyadic constant: rms is exact
    if (rms_variability(c, w) != 0.5) ok = false;

    std::vector<double> doubled(n), negated(n);
    for (std::size_t i = 0; i < n; ++i) {
        doubled[i] = 2.0 * a[i];
        negated[i] = -a[i];
    }
    // exact modulo one correctly-rounded sqrt
    if (std::abs(weighted_pearson(a, doubled, w) - 1.0) > 1e-15) ok = false;
    if (std::abs(weighted_pearson(a, negated, w) + 1.0) > 1e-15) ok = false;

    report(2, "weighted reductions match independent loops", ok);
}

// ---------------------------------------------------------------- criterion 3
void check_global_mean_removal() {
    const OceanMask mask = all_ocean(Grid{24, 10, 7.5, -81.0, 15.0, 18.0});
    const LatWeights w = area_weights(mask);
    std::mt19937_64 rng(303);
    std::normal_distribution<double> dist(10.0, 40.0);

    bool ok = true;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        Field f = make_field(mask);
        for (std::size_t c = 0; c < f.values.size(); ++c)
            if (mask.mask[c]) f.values[c] = dist(rng);
        const Field out = remove_global_mean(f, mask);
        const double mu = std::abs(weighted_mean(ocean_values(out, mask), w));
        worst = std::max(worst, mu);
        if (mu >= 1e-10) ok = false;

        const Field twice = remove_global_mean(out, mask);
        const auto x = ocean_values(out, mask);
        const auto y = ocean_values(twice, mask);
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::abs(x[i] - y[i]) > 1e-12 * std::max(1.0, std::abs(x[i]))) ok = false;
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "worst residual mean %.2e", worst);
    report(3, "global-mean removal centers fields and is idempotent", ok, detail);
}

// ---------------------------------------------------------------- criterion 4
void check_spectral_recovery() {
    const auto t0 = Clock::now();
    const std::size_t half = 100, d = 60;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> amp(0.5, 2.0);
    Matrix f(2 * half, d);
    for (std::size_t i = 0; i < 2 * half; ++i) {
        const double a = amp(rng);
        for (std::size_t c = 0; c < d; ++c) {
            const double angle = 2.0 * 3.14159265358979323846 * (c + 0.5) / d * 4.0;
            f(i, c) = a * (i < half ? std::sin(angle) : std::cos(angle));
        }
    }

    bool ok = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto labels = spectral_labels(f, 2, seed);
        // exact recovery up to label swap
        const int l0 = labels[0];
        for (std::size_t i = 0; i < 2 * half; ++i) {
            const int want = i < half ? l0 : 1 - l0;
            if (labels[i] != want) ok = false;
        }
    }

    const Affinity aff = build_affinity(f);
    const SpectralEmbedding emb = spectral_embedding(aff, 2);
    if (emb.eigenvalues.front() < -1e-9 || emb.eigenvalues.front() > 1e-9) ok = false;
    if (emb.eigenvalues.back() > 2.0 + 1e-9) ok = false;

    const double elapsed = seconds_since(t0);
    if (elapsed >= 10.0) ok = false;
    char detail[64];
    std::snprintf(detail, sizeof(detail), "10/10 seeds, %.2f s", elapsed);
    report(4, "spectral clustering recovers the planted two-block structure", ok, detail);
}

// ---------------------------------------------------------------- criterion 5
void check_gradients() {
    bool ok = true;
    double worst = 0.0;
    int checked = 0, kinks = 0;
    const double h = 1e-5;
    const std::vector<std::vector<int>> archs{{8, 4}, {16, 8}};

    for (const auto& arch : archs) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Mlp m = make_mlp(6, arch);
            init_weights(m, seed);
            std::mt19937_64 rng(5000 + seed);
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            TrainingSet s;
            s.X = Matrix(10, 6);
            for (auto& v : s.X.data) v = uni(rng);
            s.y.resize(10);
            for (auto& v : s.y) v = uni(rng);
            s.w.w.resize(10);
            for (auto& v : s.w.w) v = 0.2 + uni(rng);

            const auto flat = fd_oracle::flatten(gradients(m, s, 5e-6));
            const auto params = fd_oracle::parameters(m);

            for (std::size_t p = 0; p < params.size(); ++p) {
                if (std::abs(flat[p]) <= 1e-8) continue;
                const auto fd = fd_oracle::central_difference(m, s, 5e-6, params[p], h);
                if (fd.at_kink) {
                    // the loss is not differentiable in this parameter at
                    // this point, so the difference quotient proves nothing
                    ++kinks;
                    continue;
                }
                ++checked;
                const double rel = std::abs(flat[p] - fd.value) / std::abs(flat[p]);
                worst = std::max(worst, rel);
                if (rel >= 1e-5) ok = false;
            }
        }
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d parameters, worst rel err %.2e (%d at kinks)",
                  checked, worst, kinks);
    report(5, "backpropagation matches central finite differences", ok, detail);
}

// ---------------------------------------------------------------- criterion 6
void check_overfit() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    TrainingSet s;
    s.X = Matrix(10, 6);
    for (auto& v : s.X.data) v = uni(rng);
    s.y.resize(10);
    for (std::size_t i = 0; i < 10; ++i) {
        double acc = 0.15;
        for (std::size_t c = 0; c < 6; ++c) acc += (0.12 * c - 0.3) * s.X(i, c);
        s.y[i] = acc;
    }
    s.w.w.assign(10, 1.0);

    Mlp proto = make_mlp(6, {16, 8}, 0.0);
    init_weights(proto, 9);
    TrainConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.epochs = 2000;
    cfg.batch_size = 10;
    cfg.l2 = 0.0;
    cfg.dropout = 0.0;
    cfg.patience = 0;
    cfg.seed = 44;

    const TrainResult a = train(proto, s, cfg);
    const TrainResult b = train(proto, s, cfg);
    const double mse = weighted_mse(a.model, s);

    bool identical = true;
    for (std::size_t l = 0; l < a.model.weights.size(); ++l) {
        if (a.model.weights[l].data != b.model.weights[l].data) identical = false;
        if (a.model.biases[l] != b.model.biases[l]) identical = false;
    }

    char detail[64];
    std::snprintf(detail, sizeof(detail), "final weighted mse %.2e", mse);
    report(6, "ten-point regression overfits and retrains bitwise-identically",
           mse < 1e-4 && identical, detail);
}

// ---------------------------------------------------------------- criterion 7
void check_shapley_equivalence() {
    bool ok = true;
    double worst_gap = 0.0, worst_eff = 0.0;
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    for (int rep = 0; rep < 50; ++rep) {
        Mlp net = make_mlp(6, {10, 5}, 0.0);
        init_weights(net, 700 + rep);
        const ModelFn f = [&](std::span<const double> x) { return forward(net, x); };

        std::vector<double> x(6);
        for (auto& v : x) v = uni(rng);
        BackgroundSet bg;
        bg.rows = Matrix(8 + rep % 5, 6);
        for (auto& v : bg.rows.data) v = uni(rng);

        const Attribution exact = exact_shapley(f, x, bg);
        const Attribution kern = kernel_shap(f, x, bg);
        for (int j = 0; j < 6; ++j)
            worst_gap = std::max(worst_gap, std::abs(exact.phi[j] - kern.phi[j]));

        double total = kern.phi0;
        for (double p : kern.phi) total += p;
        worst_eff = std::max(worst_eff, std::abs(total - f(x)));
    }
    if (worst_gap >= 1e-6 || worst_eff >= 1e-6) ok = false;

    // linear closed form
    std::vector<double> coef(6), x(6);
    for (auto& c : coef) c = uni(rng) * 4.0 - 2.0;
    for (auto& v : x) v = uni(rng);
    const ModelFn lin = [&](std::span<const double> row) {
        double acc = 0.8;
        for (int j = 0; j < 6; ++j) acc += coef[j] * row[j];
        return acc;
    };
    BackgroundSet bg;
    bg.rows = Matrix(30, 6);
    for (auto& v : bg.rows.data) v = uni(rng);
    const Attribution a = exact_shapley(lin, x, bg);
    for (int j = 0; j < 6; ++j) {
        double mean = 0.0;
        for (std::size_t b = 0; b < bg.rows.rows; ++b) mean += bg.rows(b, j);
        mean /= static_cast<double>(bg.rows.rows);
        if (std::abs(a.phi[j] - coef[j] * (x[j] - mean)) > 1e-8) ok = false;
    }

    char detail[96];
    std::snprintf(detail, sizeof(detail), "max |kernel-exact| %.2e, max efficiency gap %.2e",
                  worst_gap, worst_eff);
    report(7, "kernel regression equals exhaustive Shapley enumeration", ok, detail);
}

// ---------------------------------------------------------------- criterion 8
void check_mc_dropout() {
    bool ok = true;

    Scaler identity;
    identity.x_min = {0.0};
    identity.x_max = {1.0};
    identity.y_min = 0.0;
    identity.y_max = 1.0;
    identity.fitted = true;

    // dropout off: zero spread
    {
        Mlp m = make_mlp(1, {6, 3}, 0.0);
        init_weights(m, 8);
        Matrix x(5, 1, 0.7);
        const std::vector<std::size_t> ids{0, 1, 2, 3, 4};
        const auto stats = mc_dropout_stats(m, identity, x, ids, 64, 5);
        for (double s : stats.std)
            if (s != 0.0) ok = false;
    }

    // single hidden unit: empirical mean within 3 standard errors
    const double p = 0.25, wgt = 1.3, bias = 0.2, out_w = 1.7, out_b = -0.4, x_in = 1.1;
    Mlp m = make_mlp(1, {1}, p);
    m.weights[0](0, 0) = wgt;
    m.biases[0][0] = bias;
    m.weights[1](0, 0) = out_w;
    m.biases[1][0] = out_b;

    const double hidden = std::max(0.0, wgt * x_in + bias);
    const double expect_mean = out_w * hidden + out_b;
    const double expect_var = out_w * out_w * hidden * hidden * p / (1.0 - p);

    const int passes = 100000;
    Matrix x(1, 1, x_in);
    const std::vector<std::size_t> ids{0};
    const auto stats = mc_dropout_stats(m, identity, x, ids, passes, 80808);
    const double se = std::sqrt(expect_var / passes);
    const double gap = std::abs(stats.mean[0] - expect_mean);
    if (gap >= 3.0 * se) ok = false;

    char detail[96];
    std::snprintf(detail, sizeof(detail), "|mean-analytic| %.2e vs 3se %.2e", gap, 3.0 * se);
    report(8, "dropout ensemble matches the Bernoulli expectation", ok, detail);
}

// ------------------------------------------------------------ criteria 9 - 11
struct SyntheticRuns {
    fs::path dir;
    RunConfig cfg;
    PipelineData data;
    SynthData truth;
};

SyntheticRuns prepare_synthetic() {
    SyntheticRuns s;
    s.dir = fs::temp_directory_path() / "seatrend_acceptance";
    fs::remove_all(s.dir);

    SynthSpec spec; // 36x18 grid, 6 models, 72-month windows
    s.truth = gen_synth(spec);
    const fs::path cfg_path = write_synth_dir(s.truth, spec, s.dir / "synth");
    s.cfg = load_config(cfg_path);
    s.data = load_datasets(s.cfg);
    return s;
}

void check_end_to_end(SyntheticRuns& s) {
    bool ok = true;
    const auto t0 = Clock::now();

    RunConfig cfg = s.cfg;
    cfg.strategy = Strategy::None;
    const RunResult none = run_pipeline(cfg, s.data);
    write_run_outputs(cfg, s.data, none, s.dir / "run_none");

    cfg.strategy = Strategy::Domain;
    const RunResult dom = run_pipeline(cfg, s.data);
    write_run_outputs(cfg, s.data, dom, s.dir / "run_domain");

    cfg.strategy = Strategy::Spectral;
    cfg.k = 4;
    const RunResult spec4 = run_pipeline(cfg, s.data);
    write_run_outputs(cfg, s.data, spec4, s.dir / "run_spectral");

    const double elapsed = seconds_since(t0);
    if (elapsed >= 300.0) ok = false;

    // spectral k=1 equals no clustering, bitwise
    cfg.k = 1;
    const RunResult k1 = run_pipeline(cfg, s.data);
    if (k1.future_prediction != none.future_prediction) ok = false;
    if (k1.mc.std != none.mc.std) ok = false;

    // every strategy emitted its artifact set
    for (const char* run : {"run_none", "run_domain", "run_spectral"})
        for (const char* f : {"manifest.json", "scores.csv", "prediction_future.grd1",
                              "mc_std.grd1", "partition.csv", "shap_importance.csv"})
            if (!fs::exists(s.dir / run / f)) ok = false;

    // informative models: the learned map beats persistence against the
    // planted future trend
    const LatWeights& w = s.data.weights;
    const double ml_err = weighted_rmse(spec4.future_prediction, s.truth.planted_future, w);
    const double persist_err =
        weighted_rmse(s.data.obs_trend, s.truth.planted_future, w);
    if (ml_err >= persist_err) ok = false;

    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "3 strategies in %.1f s; ml rmse %.3f vs persistence %.3f", elapsed,
                  ml_err, persist_err);
    report(9, "synthetic end-to-end runs complete and beat persistence", ok, detail);
}

void check_leave_one_out(SyntheticRuns& s) {
    bool ok = true;

    // fixed point: every projection is its own hindcast
    {
        std::vector<ModelDataset> fixed = s.data.models;
        for (auto& d : fixed) d.projection = d.hindcast;
        RunConfig cfg = s.cfg;
        cfg.projection_window = s.data.hindcast_window;
        PipelineData pd = s.data;
        pd.models = fixed;
        pd.projection_window = pd.hindcast_window;
        Partition whole{pd.mask, std::vector<int>(pd.mask.ocean_count(), 0), 1};
        const LeaveOneOutTable t = run_leave_one_out(cfg, pd, whole);
        for (const auto& r : t.rows) {
            if (r.persistence_rmse != 0.0) ok = false;
            if (std::abs(r.persistence_corr - 1.0) > 1e-12) ok = false;
        }
    }

    // learnable: held-out correlation clears 0.9 on the shared-pattern suite
    double min_corr = 1.0;
    LeaveOneOutTable table;
    {
        const Partition part = make_partition(s.cfg, s.data);
        table = run_leave_one_out(s.cfg, s.data, part);
        for (const auto& r : table.rows) min_corr = std::min(min_corr, r.ml_corr);
        if (min_corr <= 0.9) ok = false;
    }

    // table schema: six model columns plus the average
    if (table.rows.size() != 6) ok = false;
    if (table.average.held_out != "average") ok = false;
    write_loo_csv(table, s.dir / "loo.csv");
    const std::string head = slurp(s.dir / "loo.csv");
    if (head.find("metric,model0,model1,model2,model3,model4,model5,average") != 0)
        ok = false;

    char detail[64];
    std::snprintf(detail, sizeof(detail), "min held-out corr %.3f", min_corr);
    report(10, "leave-one-out harness matches its constructions", ok, detail);
}

void check_sweep(SyntheticRuns& s) {
    bool ok = true;
    const std::vector<int> ks{2, 4, 8, 16};
    const auto rows = run_sweep(s.cfg, s.data, ks);
    if (rows.size() != 4) ok = false;
    write_sweep_csv(rows, s.dir / "sweep.csv");

    const std::string csv = slurp(s.dir / "sweep.csv");
    if (csv.find("n_clusters,train_rmse,future_rms,uncertainty_rms,corr_with_past,"
                 "loo_avg_corr") != 0)
        ok = false;

    // Spearman rank correlation between k and training error
    std::vector<double> rmse;
    for (const auto& r : rows) rmse.push_back(r.train_rmse);
    std::vector<double> rank(rmse.size());
    {
        std::vector<std::size_t> order(rmse.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return rmse[a] < rmse[b]; });
        for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;
    }
    const double n = static_cast<double>(rmse.size());
    const double mean_rank = (n - 1.0) / 2.0;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < rmse.size(); ++i) {
        const double a = static_cast<double>(i) - mean_rank; // k ranks are 0..n-1
        const double b = rank[i] - mean_rank;
        num += a * b;
        da += a * a;
        db += b * b;
    }
    const double spearman = num / std::sqrt(da * db);
    if (spearman > 0.0) ok = false;

    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "train rmse by k: %.3f %.3f %.3f %.3f (spearman %.2f)",
                  rows[0].train_rmse, rows[1].train_rmse, rows[2].train_rmse,
                  rows[3].train_rmse, spearman);
    report(11, "cluster sweep shows the training-error overfitting trend", ok, detail);
}

// --------------------------------------------------------------- criterion 12
void check_grd1_roundtrip() {
    const fs::path dir = fs::temp_directory_path() / "seatrend_acceptance_grd1";
    fs::create_directories(dir);
    std::mt19937_64 rng(1212);
    std::uniform_int_distribution<int> lon(1, 30), lat(1, 15), months(2, 40);
    std::uniform_real_distribution<double> val(-500.0, 500.0);
    std::bernoulli_distribution land(0.25);

    bool ok = true;
    for (int rep = 0; rep < 20; ++rep) {
        Grd1Data d;
        // mix in the edge shapes: single slice and single-row grids
        if (rep == 0) {
            d.grid = Grid{12, 6, 0.0, -60.0, 30.0, 24.0};
            d.n_time = 1;
        } else if (rep == 1) {
            d.grid = Grid{25, 1, 0.0, 10.0, 14.0, 2.0};
            d.n_time = 7;
        } else {
            const int nl = lat(rng);
            d.grid = Grid{lon(rng), nl, 0.5, -50.0, 1.0, 99.0 / nl};
            d.n_time = months(rng);
        }
        d.start_year = 1990 + rep;
        d.values.resize(d.grid.cells() * d.n_time);
        std::vector<bool> is_land(d.grid.cells());
        for (std::size_t c = 0; c < d.grid.cells(); ++c) is_land[c] = land(rng);
        is_land[0] = false;
        for (int t = 0; t < d.n_time; ++t)
            for (std::size_t c = 0; c < d.grid.cells(); ++c)
                d.values[t * d.grid.cells() + c] = is_land[c] ? d.fill_value : val(rng);

        const fs::path pa = dir / ("a_" + std::to_string(rep) + ".grd1");
        const fs::path pb = dir / ("b_" + std::to_string(rep) + ".grd1");
        write_grd1(d, pa);
        const Grd1Data back = read_grd1(pa);
        write_grd1(back, pb);
        if (back.values != d.values) ok = false;
        if (!(back.grid == d.grid)) ok = false;
        if (slurp(pa) != slurp(pb)) ok = false;
    }
    report(12, "gridded container round trips bitwise across 20 datasets", ok);
}

} // namespace

int main() {
    std::printf("acceptance suite\n================\n");
    check_ols_oracle();
    check_weighted_reductions();
    check_global_mean_removal();
    check_spectral_recovery();
    check_gradients();
    check_overfit();
    check_shapley_equivalence();
    check_mc_dropout();

    SyntheticRuns s = prepare_synthetic();
    check_end_to_end(s);
    check_leave_one_out(s);
    check_sweep(s);

    check_grd1_roundtrip();

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
