#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "seatrend/errors.hpp"
#include "seatrend/explain.hpp"
#include "seatrend/neuralnet.hpp"

using namespace seatrend;

namespace {

BackgroundSet random_background(std::size_t rows, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    BackgroundSet bg;
    bg.rows = Matrix(rows, m);
    for (auto& v : bg.rows.data) v = uni(rng);
    return bg;
}

// Average marginal contribution over every player ordering; the textbook
// definition, independent of the subset-weight formula.
std::vector<double> permutation_shapley(const std::function<double(std::uint32_t)>& v,
                                        int m) {
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phi(m, 0.0);
    std::size_t n_orders = 0;
    do {
        std::uint32_t mask = 0;
        for (int i : order) {
            const double before = v(mask);
            mask |= 1u << i;
            phi[i] += v(mask) - before;
        }
        ++n_orders;
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& p : phi) p /= static_cast<double>(n_orders);
    return phi;
}

double harmonic(int n) {
    double h = 0.0;
    for (int i = 1; i <= n; ++i) h += 1.0 / i;
    return h;
}

double choose(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - i + 1) / i;
    return r;
}

} // namespace

TEST_SUITE("explain") {

TEST_CASE("coalition value") {
    const int m = 4;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> coef(m);
    for (auto& c : coef) c = uni(rng);
    const ModelFn f = [&](std::span<const double> x) {
        double acc = 0.3;
        for (int j = 0; j < m; ++j) acc += coef[j] * x[j] + 0.2 * x[j] * x[j];
        return acc;
    };
    std::vector<double> x{0.9, -0.2, 0.5, 1.4};
    const BackgroundSet bg = random_background(5, m, 8);

    SUBCASE("full coalition returns f(x) exactly") {
        CHECK(coalition_value(f, x, Coalition::full(m), bg) == doctest::Approx(f(x)));
    }
    SUBCASE("empty coalition with one background row returns f(bg)") {
        BackgroundSet one;
        one.rows = Matrix(1, m);
        std::copy(bg.rows.row(2).begin(), bg.rows.row(2).end(), one.rows.row(0).begin());
        CHECK(coalition_value(f, x, Coalition::empty(m), one) ==
              doctest::Approx(f(one.rows.row(0))));
    }
    SUBCASE("matches a literal loop") {
        const Coalition s{0b1011u, m}; // features 0, 1, 3 present
        double acc = 0.0;
        for (std::size_t b = 0; b < bg.rows.rows; ++b) {
            std::vector<double> row(m);
            for (int j = 0; j < m; ++j)
                row[j] = (s.bits >> j) & 1u ? x[j] : bg.rows(b, j);
            acc += f(row);
        }
        acc /= static_cast<double>(bg.rows.rows);
        CHECK(coalition_value(f, x, s, bg) == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("exact enumeration") {
    SUBCASE("constant model attributes nothing") {
        const ModelFn f = [](std::span<const double>) { return 4.2; };
        const std::vector<double> x{0.1, 0.5, 0.9};
        const Attribution a = exact_shapley(f, x, random_background(4, 3, 2));
        for (double p : a.phi) CHECK(p == doctest::Approx(0.0));
        CHECK(a.phi0 == doctest::Approx(4.2));
    }
    SUBCASE("linear model closed form") {
        const int m = 6;
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        std::vector<double> coef(m), x(m);
        for (auto& c : coef) c = uni(rng);
        for (auto& v : x) v = uni(rng);
        const ModelFn f = [&](std::span<const double> row) {
            double acc = 1.5;
            for (int j = 0; j < m; ++j) acc += coef[j] * row[j];
            return acc;
        };
        const BackgroundSet bg = random_background(20, m, 4);
        const Attribution a = exact_shapley(f, x, bg);
        for (int j = 0; j < m; ++j) {
            double col_mean = 0.0;
            for (std::size_t b = 0; b < bg.rows.rows; ++b) col_mean += bg.rows(b, j);
            col_mean /= static_cast<double>(bg.rows.rows);
            CHECK(a.phi[j] == doctest::Approx(coef[j] * (x[j] - col_mean)).epsilon(1e-8));
        }
    }
    SUBCASE("three-player hand game") {
        // v({}) = 0, v({1}) = 1, v({2}) = v({3}) = 0,
        // v({1,2}) = 2, v({1,3}) = 1, v({2,3}) = 0, v(F) = 3
        const auto v = [](std::uint32_t mask) -> double {
            switch (mask) {
                case 0b000: return 0.0;
                case 0b001: return 1.0;
                case 0b010: return 0.0;
                case 0b100: return 0.0;
                case 0b011: return 2.0;
                case 0b101: return 1.0;
                case 0b110: return 0.0;
                case 0b111: return 3.0;
            }
            return 0.0;
        };
        const auto phi = shapley_from_game(v, 3);
        // worked out over the six orderings
        CHECK(phi[0] == doctest::Approx(11.0 / 6.0).epsilon(1e-12));
        CHECK(phi[1] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
        CHECK(phi[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

        const auto oracle = permutation_shapley(v, 3);
        for (int j = 0; j < 3; ++j)
            CHECK(phi[j] == doctest::Approx(oracle[j]).epsilon(1e-12));
    }
    SUBCASE("subset-weight and permutation routes agree on random games") {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> uni(-3.0, 3.0);
        for (int rep = 0; rep < 5; ++rep) {
            const int m = 5;
            std::vector<double> table(1u << m);
            for (auto& t : table) t = uni(rng);
            const auto v = [&](std::uint32_t mask) { return table[mask]; };
            const auto a = shapley_from_game(v, m);
            const auto b = permutation_shapley(v, m);
            for (int j = 0; j < m; ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-10));
        }
    }
    SUBCASE("too many features point at the approximation") {
        const ModelFn f = [](std::span<const double>) { return 0.0; };
        const std::vector<double> x(17, 0.0);
        CHECK_THROWS_AS(exact_shapley(f, x, random_background(2, 17, 1)), CapabilityError);
    }
}

TEST_CASE("kernel regression route") {
    SUBCASE("matches exact enumeration on random nets") {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            Mlp net = make_mlp(6, {10, 5}, 0.0);
            init_weights(net, seed);
            const ModelFn f = [&](std::span<const double> x) { return forward(net, x); };

            std::mt19937_64 rng(seed + 70);
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            std::vector<double> x(6);
            for (auto& v : x) v = uni(rng);
            const BackgroundSet bg = random_background(12, 6, seed + 200);

            const Attribution exact = exact_shapley(f, x, bg);
            const Attribution kern = kernel_shap(f, x, bg);
            CHECK(kern.phi0 == doctest::Approx(exact.phi0).epsilon(1e-9));
            for (int j = 0; j < 6; ++j)
                CHECK(std::abs(kern.phi[j] - exact.phi[j]) < 1e-6);

            // local accuracy
            double total = kern.phi0;
            for (double p : kern.phi) total += p;
            CHECK(std::abs(total - f(x)) < 1e-6);
        }
    }
    SUBCASE("constant model") {
        const ModelFn f = [](std::span<const double>) { return -1.25; };
        const std::vector<double> x{0.2, 0.8};
        const Attribution a = kernel_shap(f, x, random_background(3, 2, 5));
        CHECK(a.phi0 == doctest::Approx(-1.25));
        for (double p : a.phi) CHECK(std::abs(p) < 1e-12);
    }
    SUBCASE("degenerate sampling is reported as singular") {
        const ModelFn f = [](std::span<const double> x) { return x[0]; };
        const std::vector<double> x{0.4, 0.6, 0.1, 0.9};
        KernelShapOptions opts;
        opts.n_samples = 1; // one coalition cannot pin down three free values
        opts.seed = 3;
        CHECK_THROWS_AS(kernel_shap(f, x, random_background(2, 4, 6), opts),
                        NumericalError);
    }
    SUBCASE("dummy feature gets exactly nothing") {
        const ModelFn f = [](std::span<const double> x) {
            return 2.0 * x[0] + x[1] * x[2];
        };
        const std::vector<double> x{0.3, 0.7, 0.2, 0.95}; // feature 3 unused
        const BackgroundSet bg = random_background(10, 4, 9);
        const Attribution e = exact_shapley(f, x, bg);
        CHECK(std::abs(e.phi[3]) < 1e-9);
        const Attribution k = kernel_shap(f, x, bg);
        CHECK(std::abs(k.phi[3]) < 1e-9);
    }
    SUBCASE("symmetric duplicated features share credit") {
        const ModelFn f = [](std::span<const double> x) {
            return std::sin(x[0] + x[1]) + 0.5 * x[2];
        };
        std::vector<double> x{0.6, 0.6, 0.3};
        BackgroundSet bg = random_background(8, 3, 12);
        for (std::size_t b = 0; b < bg.rows.rows; ++b) bg.rows(b, 1) = bg.rows(b, 0);
        const Attribution a = kernel_shap(f, x, bg);
        CHECK(std::abs(a.phi[0] - a.phi[1]) < 1e-6);
    }
}

TEST_CASE("kernel weights sum to the harmonic closed form") {
    for (int m = 2; m <= 8; ++m) {
        double direct = 0.0;
        for (int s = 1; s < m; ++s) direct += choose(m, s) * shapley_kernel_weight(m, s);
        const double closed = 2.0 * (m - 1) / m * harmonic(m - 1);
        CHECK(direct == doctest::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("cluster importance") {
    const OceanMask mask = all_ocean(Grid{4, 2, 0.0, -20.0, 90.0, 40.0});

    SUBCASE("a single point per cluster reproduces its own |phi| order") {
        Partition part{mask, {0, 1, 0, 1, 0, 1, 0, 1}, 2};
        const ModelFn f = [](std::span<const double> x) {
            return 3.0 * x[0] - 1.0 * x[1] + 0.2 * x[2];
        };
        std::vector<Matrix> pts(2, Matrix(1, 3));
        pts[0](0, 0) = 0.9;
        pts[0](0, 1) = 0.8;
        pts[0](0, 2) = 0.1;
        pts[1] = pts[0];
        std::vector<BackgroundSet> bgs{random_background(6, 3, 1),
                                       random_background(6, 3, 2)};
        const auto imp = cluster_importance({f, f}, pts, bgs, part);
        REQUIRE(imp.size() == 2);
        for (const auto& fi : imp) {
            const Attribution a = kernel_shap(f, pts[fi.cluster].row(0),
                                              bgs[fi.cluster]);
            std::vector<std::pair<int, double>> want;
            for (int j = 0; j < 3; ++j) want.emplace_back(j, std::abs(a.phi[j]));
            std::sort(want.begin(), want.end(), [](const auto& l, const auto& r) {
                if (l.second != r.second) return l.second > r.second;
                return l.first < r.first;
            });
            for (int j = 0; j < 3; ++j) {
                CHECK(fi.ranked[j].first == want[j].first);
                CHECK(fi.ranked[j].second == doctest::Approx(want[j].second));
            }
        }
    }
    SUBCASE("a feature that drives the labels ranks first everywhere") {
        Partition part{mask, {0, 0, 1, 1, 0, 0, 1, 1}, 2};
        const ModelFn f = [](std::span<const double> x) { return x[3]; };
        std::mt19937_64 rng(44);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        std::vector<Matrix> pts(2, Matrix(4, 6));
        for (auto& m : pts)
            for (auto& v : m.data) v = uni(rng);
        std::vector<BackgroundSet> bgs{random_background(10, 6, 5),
                                       random_background(10, 6, 6)};
        const auto imp = cluster_importance({f, f}, pts, bgs, part);
        for (const auto& fi : imp) CHECK(fi.ranked.front().first == 3);
    }
}

} // TEST_SUITE
