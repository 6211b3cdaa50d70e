#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "seatrend/matrix.hpp"
#include "seatrend/segmentation.hpp"

namespace seatrend {

// Scalar prediction function over a feature row (scaled units).
using ModelFn = std::function<double(std::span<const double>)>;

// Subset of features, bit i set = feature i present.
struct Coalition {
    std::uint32_t bits = 0;
    int n_features = 0;

    bool includes(int i) const { return (bits >> i) & 1u; }
    int size() const;
    static Coalition full(int m) { return {(m >= 32 ? ~0u : (1u << m) - 1u), m}; }
    static Coalition empty(int m) { return {0u, m}; }
};

// Rows used to integrate out absent features.
struct BackgroundSet {
    Matrix rows; // [B x M], scaled units
};

// Additive explanation of one prediction: f(x) ~= phi0 + sum(phi).
struct Attribution {
    std::vector<double> phi;
    double phi0 = 0.0;
    std::size_t point_id = 0;
};

// Value of a coalition: average of f over the background rows with the
// present features replaced by x.
double coalition_value(const ModelFn& f, std::span<const double> x, const Coalition& s,
                       const BackgroundSet& bg);

// Shapley values of an arbitrary set game v over m <= 16 players.
std::vector<double> shapley_from_game(const std::function<double(std::uint32_t)>& v, int m);

// Full enumeration over all coalitions. Throws CapabilityError above 16
// features (use kernel_shap there).
Attribution exact_shapley(const ModelFn& f, std::span<const double> x, const BackgroundSet& bg);

struct KernelShapOptions {
    int n_samples = 0; // 0 = enumerate every coalition (exact for small M)
    std::uint64_t seed = 0;
};

// Weighted-least-squares approximation with the Shapley kernel
// pi(s) = (M-1) / (C(M,s) * s * (M-s)); the empty and full coalitions are
// handled as equality constraints. With full enumeration the result matches
// exact_shapley.
Attribution kernel_shap(const ModelFn& f, std::span<const double> x, const BackgroundSet& bg,
                        const KernelShapOptions& opts = {});

double shapley_kernel_weight(int m, int subset_size);

// Mean absolute attribution per feature over a cluster's points, largest
// first.
struct FeatureImportance {
    int cluster = 0;
    std::vector<std::pair<int, double>> ranked; // (feature index, mean |phi|)
};

std::vector<FeatureImportance> cluster_importance(
    const std::vector<ModelFn>& model_per_cluster,
    const std::vector<Matrix>& points_per_cluster,
    const std::vector<BackgroundSet>& bg_per_cluster, const Partition& partition,
    int threads = 1);

} // namespace seatrend
