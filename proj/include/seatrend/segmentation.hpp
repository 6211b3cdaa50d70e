#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "seatrend/grid.hpp"
#include "seatrend/matrix.hpp"

namespace seatrend {

// Assignment of every ocean point to exactly one of k clusters.
struct Partition {
    OceanMask mask;
    std::vector<int> labels; // per ocean point, canonical order, in 0..k-1
    int k = 0;

    std::vector<std::size_t> cluster_points(int label) const;
    std::vector<std::size_t> cluster_sizes() const;
};

// Throws unless labels cover every ocean point and every label is nonempty.
void validate_partition(const Partition& p);

// Symmetric nonnegative pairwise-similarity matrix.
struct Affinity {
    std::size_t n = 0;
    std::vector<double> a; // dense n*n

    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

// Gaussian-kernel bandwidth: median of pairwise distances, or a fixed value.
struct SigmaPolicy {
    double value = 0.0; // <= 0 selects the median heuristic

    static SigmaPolicy median() { return {0.0}; }
    static SigmaPolicy fixed(double sigma) { return {sigma}; }
};

// a[i][j] = exp(-||zi - zj||^2 / (2 sigma^2)) on per-row z-scored features
// (constant rows become zero vectors). knn > 0 keeps only each row's knn
// strongest off-diagonal links, symmetrized by union.
Affinity build_affinity(const Matrix& features, SigmaPolicy sigma = SigmaPolicy::median(),
                        int knn = 0);

// Eigen-decomposition of the normalized symmetric Laplacian
// L = I - D^-1/2 A D^-1/2.
struct SpectralEmbedding {
    Matrix rows;                    // n x k, row-normalized to unit length
    std::vector<double> eigenvalues; // all n, ascending
};

SpectralEmbedding spectral_embedding(const Affinity& a, int k);

struct SpectralOptions {
    SigmaPolicy sigma = SigmaPolicy::median();
    int knn = 0;
    int kmeans_max_iter = 300;
    double kmeans_tol = 1e-8;
};

// Labels for arbitrary feature rows (no geography attached).
std::vector<int> spectral_labels(const Matrix& features, int k, std::uint64_t seed,
                                 const SpectralOptions& opts = {});

// Cluster ocean points from per-point feature rows (one row per ocean point,
// canonical order).
Partition spectral_cluster(const OceanMask& mask, const Matrix& features, int k,
                           std::uint64_t seed, const SpectralOptions& opts = {});

// Axis-aligned lat/lon region; lon half-open [lon_min, lon_max) in [0, 360),
// lat half-open (lat_min, lat_max].
struct LatLonBox {
    double lat_min = 0.0, lat_max = 0.0;
    double lon_min = 0.0, lon_max = 0.0;

    bool contains(double lat, double lon) const;
};

// Fixed four-region split: North Atlantic, North Pacific, the southern belt,
// and everything else. Box edges are configurable.
struct DomainBoxes {
    LatLonBox north_atlantic{0.0, 70.0, 260.0, 360.0};
    // Corner of the Atlantic box west of 280E below this latitude drains to
    // the Pacific side and is excluded from the Atlantic region.
    double atlantic_notch_lon_max = 280.0;
    double atlantic_notch_lat_max = 18.0;
    LatLonBox north_pacific{0.0, 66.0, 100.0, 260.0};
    double southern_lat_max = -30.0;
};

// Labels: 0 North Atlantic, 1 North Pacific, 2 southern belt, 3 remainder,
// assigned in that priority order.
Partition domain_partition(const OceanMask& mask, const DomainBoxes& boxes = {});

namespace detail {

struct KMeansResult {
    std::vector<int> labels;
    Matrix centers;
    int iterations = 0;
    int repairs = 0;
};

// Lloyd iterations with k-means++ seeding. Nearest-center ties break toward
// the lowest center index; an empty cluster is reseeded at the point farthest
// from its center, at most five times.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed,
                    int max_iter = 300, double tol = 1e-8);

} // namespace detail

} // namespace seatrend
