#include "seatrend/segmentation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seatrend/errors.hpp"
#include "seatrend/rng.hpp"

namespace seatrend {

std::vector<std::size_t> Partition::cluster_points(int label) const {
    std::vector<std::size_t> pts;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) pts.push_back(i);
    return pts;
}

std::vector<std::size_t> Partition::cluster_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (int l : labels) ++sizes[l];
    return sizes;
}

void validate_partition(const Partition& p) {
    if (p.k < 1) throw ArgumentError("partition: k must be >= 1");
    if (p.labels.size() != p.mask.ocean_count())
        throw ArgumentError("partition: label count does not match ocean count");
    std::vector<std::size_t> sizes(p.k, 0);
    for (int l : p.labels) {
        if (l < 0 || l >= p.k)
            throw ArgumentError("partition: label out of range");
        ++sizes[l];
    }
    for (int c = 0; c < p.k; ++c)
        if (sizes[c] == 0)
            throw DegenerateInputError("partition: cluster " + std::to_string(c) + " is empty");
}

namespace {

// Per-row z-scoring; constant rows map to zero vectors.
Matrix zscore_rows(const Matrix& features) {
    Matrix z(features.rows, features.cols);
    for (std::size_t i = 0; i < features.rows; ++i) {
        const auto row = features.row(i);
        double mu = 0.0;
        for (double v : row) mu += v;
        mu /= row.size();
        double var = 0.0;
        for (double v : row) var += (v - mu) * (v - mu);
        var /= row.size();
        const double sd = std::sqrt(var);
        if (sd > 0.0)
            for (std::size_t j = 0; j < row.size(); ++j)
                z(i, j) = (row[j] - mu) / sd;
        // sd == 0: leave the zero vector
    }
    return z;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

} // namespace

Affinity build_affinity(const Matrix& features, SigmaPolicy sigma, int knn) {
    const std::size_t n = features.rows;
    if (n < 2) throw ArgumentError("build_affinity: need at least 2 rows");

    const Matrix z = zscore_rows(features);

    std::vector<double> d2(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = sq_dist(z.row(i), z.row(j));
            d2[i * n + j] = d;
            d2[j * n + i] = d;
        }

    double s = sigma.value;
    if (s <= 0.0) {
        // median of the n(n-1)/2 pairwise distances
        std::vector<double> dists;
        dists.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dists.push_back(std::sqrt(d2[i * n + j]));
        auto mid = dists.begin() + dists.size() / 2;
        std::nth_element(dists.begin(), mid, dists.end());
        s = *mid;
    }
    if (s <= 0.0)
        throw DegenerateInputError("build_affinity: zero bandwidth (all rows identical)");

    Affinity aff{n, std::vector<double>(n * n)};
    const double inv = 1.0 / (2.0 * s * s);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            aff.a[i * n + j] = std::exp(-d2[i * n + j] * inv);

    if (knn > 0 && static_cast<std::size_t>(knn) < n - 1) {
        // keep each row's knn strongest off-diagonal links, union-symmetrized
        std::vector<std::uint8_t> keep(n * n, 0);
        std::vector<std::pair<double, std::size_t>> order(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t m = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) order[m++] = {aff.at(i, j), j};
            std::partial_sort(order.begin(), order.begin() + knn, order.end(),
                              [](const auto& a, const auto& b) {
                                  if (a.first != b.first) return a.first > b.first;
                                  return a.second < b.second;
                              });
            for (int t = 0; t < knn; ++t) {
                const std::size_t j = order[t].second;
                keep[i * n + j] = 1;
                keep[j * n + i] = 1;
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && !keep[i * n + j]) aff.at(i, j) = 0.0;
    }
    return aff;
}

SpectralEmbedding spectral_embedding(const Affinity& aff, int k) {
    const std::size_t n = aff.n;
    if (k < 1) throw ArgumentError("spectral_embedding: k must be >= 1");
    if (static_cast<std::size_t>(k) > n)
        throw ArgumentError("spectral_embedding: k exceeds point count");

    Eigen::VectorXd deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d += aff.at(i, j);
        if (d <= 0.0)
            throw DegenerateInputError("spectral_embedding: isolated vertex at point " +
                                       std::to_string(i));
        deg[i] = 1.0 / std::sqrt(d);
    }

    Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            lap(i, j) -= deg[i] * aff.at(i, j) * deg[j];

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    if (solver.info() != Eigen::Success)
        throw NumericalError("spectral_embedding: eigendecomposition failed");

    SpectralEmbedding emb;
    emb.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);

    emb.rows = Matrix(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (int c = 0; c < k; ++c) {
            const double v = solver.eigenvectors()(i, c);
            emb.rows(i, c) = v;
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (int c = 0; c < k; ++c) emb.rows(i, c) /= norm;
    }
    return emb;
}

namespace detail {

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iter,
                    double tol) {
    const std::size_t n = points.rows;
    const std::size_t d = points.cols;
    if (k < 1) throw ArgumentError("kmeans: k must be >= 1");
    if (static_cast<std::size_t>(k) > n)
        throw ArgumentError("kmeans: k exceeds point count");

    std::mt19937_64 rng(seed);
    Matrix centers(k, d);

    // k-means++ seeding
    {
        std::uniform_int_distribution<std::size_t> uni(0, n - 1);
        std::size_t first = uni(rng);
        for (std::size_t c = 0; c < d; ++c) centers(0, c) = points(first, c);

        std::vector<double> best(n, std::numeric_limits<double>::max());
        for (int centre = 1; centre < k; ++centre) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dst = sq_dist(points.row(i), centers.row(centre - 1));
                if (dst < best[i]) best[i] = dst;
                total += best[i];
            }
            std::size_t pick = 0;
            if (total > 0.0) {
                std::uniform_real_distribution<double> uni01(0.0, 1.0);
                const double target = uni01(rng) * total;
                double acc = 0.0;
                pick = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += best[i];
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = uni(rng); // all points coincide with chosen centers
            }
            for (std::size_t c = 0; c < d; ++c) centers(centre, c) = points(pick, c);
        }
    }

    KMeansResult res;
    res.labels.assign(n, 0);
    int repairs = 0;

    for (int iter = 0; iter < max_iter; ++iter) {
        res.iterations = iter + 1;

        // assignment; ties go to the lowest center index
        for (std::size_t i = 0; i < n; ++i) {
            double best_d = std::numeric_limits<double>::max();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                const double dst = sq_dist(points.row(i), centers.row(c));
                if (dst < best_d) {
                    best_d = dst;
                    best_c = c;
                }
            }
            res.labels[i] = best_c;
        }

        // reseed empty clusters at the point farthest from their center;
        // repairing can empty another cluster, so recheck until stable
        std::vector<std::size_t> counts(k, 0);
        for (int l : res.labels) ++counts[l];
        for (bool dirty = true; dirty;) {
            dirty = false;
            for (int c = 0; c < k; ++c) {
                if (counts[c] > 0) continue;
                if (++repairs > 5)
                    throw NumericalError("kmeans: empty-cluster repair limit exceeded");
                double far_d = -1.0;
                std::size_t far_i = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double dst = sq_dist(points.row(i), centers.row(c));
                    if (dst > far_d) {
                        far_d = dst;
                        far_i = i;
                    }
                }
                for (std::size_t cc = 0; cc < d; ++cc) centers(c, cc) = points(far_i, cc);
                --counts[res.labels[far_i]];
                res.labels[far_i] = c;
                counts[c] = 1;
                dirty = true;
            }
        }

        // recompute centers in point-index order
        Matrix next(k, d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = res.labels[i];
            for (std::size_t cc = 0; cc < d; ++cc) next(c, cc) += points(i, cc);
        }
        double movement = 0.0;
        for (int c = 0; c < k; ++c) {
            double move2 = 0.0;
            for (std::size_t cc = 0; cc < d; ++cc) {
                next(c, cc) /= counts[c];
                const double diff = next(c, cc) - centers(c, cc);
                move2 += diff * diff;
            }
            movement = std::max(movement, std::sqrt(move2));
        }
        centers = std::move(next);
        if (movement < tol) break;
    }

    res.centers = std::move(centers);
    res.repairs = repairs;
    return res;
}

} // namespace detail

std::vector<int> spectral_labels(const Matrix& features, int k, std::uint64_t seed,
                                 const SpectralOptions& opts) {
    if (k == 1) return std::vector<int>(features.rows, 0);
    const Affinity aff = build_affinity(features, opts.sigma, opts.knn);
    const SpectralEmbedding emb = spectral_embedding(aff, k);
    return detail::kmeans(emb.rows, k, seed, opts.kmeans_max_iter, opts.kmeans_tol).labels;
}

Partition spectral_cluster(const OceanMask& mask, const Matrix& features, int k,
                           std::uint64_t seed, const SpectralOptions& opts) {
    if (features.rows != mask.ocean_count())
        throw ArgumentError("spectral_cluster: one feature row per ocean point required");
    Partition p{mask, spectral_labels(features, k, seed, opts), k};
    validate_partition(p);
    return p;
}

bool LatLonBox::contains(double lat, double lon) const {
    // lower latitude edge is exclusive: the equator itself belongs to the
    // remainder region, not to the named basins
    return lat > lat_min && lat <= lat_max && lon >= lon_min && lon < lon_max;
}

namespace {

double wrap_lon(double lon) {
    double x = std::fmod(lon, 360.0);
    if (x < 0.0) x += 360.0;
    return x;
}

} // namespace

Partition domain_partition(const OceanMask& mask, const DomainBoxes& boxes) {
    Partition p{mask, {}, 4};
    p.labels.reserve(mask.ocean_count());
    for (const auto& [j, i] : mask.ocean_cells()) {
        const double lat = mask.grid.lat(j);
        const double lon = wrap_lon(mask.grid.lon(i));
        int label = 3;
        const bool in_notch = lon >= boxes.north_atlantic.lon_min &&
                              lon < boxes.atlantic_notch_lon_max &&
                              lat < boxes.atlantic_notch_lat_max;
        if (boxes.north_atlantic.contains(lat, lon) && !in_notch)
            label = 0;
        else if (boxes.north_pacific.contains(lat, lon))
            label = 1;
        else if (lat <= boxes.southern_lat_max)
            label = 2;
        p.labels.push_back(label);
    }
    validate_partition(p);
    return p;
}

} // namespace seatrend
