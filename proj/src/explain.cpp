#include "seatrend/explain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "seatrend/errors.hpp"
#include "seatrend/parallel.hpp"
#include "seatrend/rng.hpp"

namespace seatrend {

int Coalition::size() const { return std::popcount(bits); }

double coalition_value(const ModelFn& f, std::span<const double> x, const Coalition& s,
                       const BackgroundSet& bg) {
    const std::size_t m = x.size();
    if (bg.rows.rows == 0 || bg.rows.cols != m)
        throw ArgumentError("coalition_value: background shape does not match input");

    std::vector<double> row(m);
    double acc = 0.0;
    for (std::size_t b = 0; b < bg.rows.rows; ++b) {
        const auto bgr = bg.rows.row(b);
        for (std::size_t j = 0; j < m; ++j)
            row[j] = s.includes(static_cast<int>(j)) ? x[j] : bgr[j];
        acc += f(row);
    }
    return acc / static_cast<double>(bg.rows.rows);
}

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double choose(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - i + 1) / i;
    return r;
}

std::vector<double> shapley_from_table(std::span<const double> v, int m) {
    // phi_i = sum over S not containing i of
    //         |S|! (m-|S|-1)! / m! * (v(S+i) - v(S))
    std::vector<double> weight(m);
    const double mfact = factorial(m);
    for (int s = 0; s < m; ++s) weight[s] = factorial(s) * factorial(m - s - 1) / mfact;

    std::vector<double> phi(m, 0.0);
    const std::uint32_t n_masks = 1u << m;
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        const int s = std::popcount(mask);
        for (int i = 0; i < m; ++i) {
            if (mask & (1u << i)) continue;
            phi[i] += weight[s] * (v[mask | (1u << i)] - v[mask]);
        }
    }
    return phi;
}

} // namespace

std::vector<double> shapley_from_game(const std::function<double(std::uint32_t)>& v, int m) {
    if (m < 1 || m > 16)
        throw CapabilityError("shapley_from_game: supports 1..16 players");
    const std::uint32_t n_masks = 1u << m;
    std::vector<double> table(n_masks);
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) table[mask] = v(mask);
    return shapley_from_table(table, m);
}

Attribution exact_shapley(const ModelFn& f, std::span<const double> x,
                          const BackgroundSet& bg) {
    const int m = static_cast<int>(x.size());
    if (m < 1) throw ArgumentError("exact_shapley: empty input");
    if (m > 16)
        throw CapabilityError("exact_shapley: more than 16 features; use kernel_shap");

    const std::uint32_t n_masks = 1u << m;
    std::vector<double> v(n_masks);
    for (std::uint32_t mask = 0; mask < n_masks; ++mask)
        v[mask] = coalition_value(f, x, Coalition{mask, m}, bg);

    Attribution out;
    out.phi = shapley_from_table(v, m);
    out.phi0 = v[0];
    return out;
}

double shapley_kernel_weight(int m, int subset_size) {
    if (subset_size <= 0 || subset_size >= m)
        throw ArgumentError("shapley_kernel_weight: size must be interior (0 < s < m)");
    return (m - 1) / (choose(m, subset_size) * subset_size * (m - subset_size));
}

namespace {

// Solve the kernel-weighted least squares with the empty/full coalitions as
// equality constraints: phi0 = v(empty), sum(phi) = v(full) - phi0. The last
// feature is eliminated through the efficiency constraint, leaving an
// (m-1)-dimensional normal system.
Attribution solve_kernel_system(std::span<const std::uint32_t> masks,
                                std::span<const double> values,
                                std::span<const double> weights, int m, double v_empty,
                                double v_full) {
    const int dim = m - 1;
    Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd atb = Eigen::VectorXd::Zero(dim);

    std::vector<double> row(dim);
    for (std::size_t r = 0; r < masks.size(); ++r) {
        const std::uint32_t z = masks[r];
        const double z_last = (z >> (m - 1)) & 1u ? 1.0 : 0.0;
        for (int j = 0; j < dim; ++j)
            row[j] = (((z >> j) & 1u) ? 1.0 : 0.0) - z_last;
        const double target = values[r] - v_empty - z_last * (v_full - v_empty);
        const double w = weights[r];
        for (int a = 0; a < dim; ++a) {
            for (int b = a; b < dim; ++b) ata(a, b) += w * row[a] * row[b];
            atb(a) += w * row[a] * target;
        }
    }
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < a; ++b) ata(a, b) = ata(b, a);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(ata);
    if (lu.rank() < dim)
        throw NumericalError("kernel_shap: singular regression system");
    const Eigen::VectorXd sol = lu.solve(atb);

    Attribution out;
    out.phi.assign(m, 0.0);
    double partial = 0.0;
    for (int j = 0; j < dim; ++j) {
        out.phi[j] = sol(j);
        partial += sol(j);
    }
    out.phi[m - 1] = (v_full - v_empty) - partial;
    out.phi0 = v_empty;
    return out;
}

} // namespace

Attribution kernel_shap(const ModelFn& f, std::span<const double> x, const BackgroundSet& bg,
                        const KernelShapOptions& opts) {
    const int m = static_cast<int>(x.size());
    if (m < 2) throw ArgumentError("kernel_shap: need at least 2 features");
    if (m > 16 && opts.n_samples == 0)
        throw CapabilityError("kernel_shap: enumeration infeasible beyond 16 features; "
                              "set n_samples");

    const double v_empty = coalition_value(f, x, Coalition::empty(m), bg);
    const double v_full = coalition_value(f, x, Coalition::full(m), bg);

    std::vector<std::uint32_t> masks;
    std::vector<double> values;
    std::vector<double> weights;

    if (opts.n_samples <= 0) {
        // every interior coalition, Shapley-kernel weighted
        const std::uint32_t n_masks = 1u << m;
        for (std::uint32_t z = 1; z + 1 < n_masks; ++z) {
            masks.push_back(z);
            values.push_back(coalition_value(f, x, Coalition{z, m}, bg));
            weights.push_back(shapley_kernel_weight(m, std::popcount(z)));
        }
    } else {
        // sample coalitions from the kernel distribution over sizes; the
        // kernel weight is then absorbed by the sampling frequencies
        std::vector<double> size_prob(m, 0.0);
        double total = 0.0;
        for (int s = 1; s < m; ++s) {
            size_prob[s] = static_cast<double>(m - 1) / (s * (m - s));
            total += size_prob[s];
        }
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::vector<int> order(m);
        for (int draw = 0; draw < opts.n_samples; ++draw) {
            double u = uni(rng) * total;
            int s = 1;
            for (; s < m - 1; ++s) {
                u -= size_prob[s];
                if (u <= 0.0) break;
            }
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);
            std::uint32_t z = 0;
            for (int j = 0; j < s; ++j) z |= 1u << order[j];
            masks.push_back(z);
            values.push_back(coalition_value(f, x, Coalition{z, m}, bg));
            weights.push_back(1.0);
        }
    }
    return solve_kernel_system(masks, values, weights, m, v_empty, v_full);
}

std::vector<FeatureImportance> cluster_importance(
    const std::vector<ModelFn>& model_per_cluster,
    const std::vector<Matrix>& points_per_cluster,
    const std::vector<BackgroundSet>& bg_per_cluster, const Partition& partition,
    int threads) {
    const int k = partition.k;
    if (static_cast<int>(model_per_cluster.size()) != k ||
        static_cast<int>(points_per_cluster.size()) != k ||
        static_cast<int>(bg_per_cluster.size()) != k)
        throw ArgumentError("cluster_importance: one model/points/background set per cluster");

    std::vector<FeatureImportance> out;
    out.reserve(k);
    for (int c = 0; c < k; ++c) {
        const Matrix& pts = points_per_cluster[c];
        const int m = static_cast<int>(pts.cols);
        std::vector<std::vector<double>> phis(pts.rows);
        parallel_for(pts.rows, threads, [&](std::size_t r) {
            phis[r] = kernel_shap(model_per_cluster[c], pts.row(r), bg_per_cluster[c]).phi;
        });

        std::vector<double> mean_abs(m, 0.0);
        for (const auto& phi : phis)
            for (int j = 0; j < m; ++j) mean_abs[j] += std::abs(phi[j]);
        for (int j = 0; j < m; ++j) mean_abs[j] /= std::max<std::size_t>(pts.rows, 1);

        FeatureImportance fi;
        fi.cluster = c;
        for (int j = 0; j < m; ++j) fi.ranked.emplace_back(j, mean_abs[j]);
        std::sort(fi.ranked.begin(), fi.ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        out.push_back(std::move(fi));
    }
    return out;
}

} // namespace seatrend
