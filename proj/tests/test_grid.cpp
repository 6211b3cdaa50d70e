#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "seatrend/errors.hpp"
#include "seatrend/grid.hpp"

using namespace seatrend;

namespace {

OceanMask two_point_mask() {
    // one column, two rows at lat 0 and lat 60
    return all_ocean(Grid{1, 2, 0.0, 0.0, 1.0, 60.0});
}

Field random_field(const OceanMask& mask, std::uint64_t seed, double lo = -5.0,
                   double hi = 5.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(lo, hi);
    Field f = make_field(mask);
    for (std::size_t c = 0; c < f.values.size(); ++c)
        if (mask.mask[c]) f.values[c] = uni(rng);
    return f;
}

} // namespace

TEST_SUITE("grid") {

TEST_CASE("grid validation") {
    CHECK_NOTHROW(validate(Grid::two_degree_global()));
    CHECK_THROWS_AS(validate(Grid{0, 4, 0, 0, 1, 1}), ArgumentError);
    CHECK_THROWS_AS(validate(Grid{4, 4, 0, 0, -1, 1}), ArgumentError);
    // a cell center on the pole is rejected
    CHECK_THROWS_AS(validate(Grid{4, 2, 0, 0.0, 90.0, 90.0}), ArgumentError);
}

TEST_CASE("area weights are cosines of latitude") {
    const OceanMask mask = two_point_mask();
    const LatWeights w = area_weights(mask);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-15)); // lat 0
    CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12)); // lat 60
}

TEST_CASE("area weights match a direct cosine table on the full two-degree grid") {
    const OceanMask mask = all_ocean(Grid::two_degree_global());
    const LatWeights w = area_weights(mask);
    REQUIRE(w.size() == 180u * 90u);
    std::size_t p = 0;
    for (int j = 0; j < 90; ++j) {
        const double lat = -89.0 + 2.0 * j;
        const double expect = std::cos(lat * std::numbers::pi / 180.0);
        for (int i = 0; i < 180; ++i, ++p) {
            REQUIRE(w[p] == doctest::Approx(expect).epsilon(1e-15));
            REQUIRE(w[p] > 0.0);
        }
    }
}

TEST_CASE("weighted mean") {
    const OceanMask mask = two_point_mask();
    const LatWeights w = area_weights(mask);

    SUBCASE("constant field") {
        const std::vector<double> x{3.25, 3.25};
        CHECK(weighted_mean(x, w) == doctest::Approx(3.25).epsilon(1e-15));
    }
    SUBCASE("two-point hand value") {
        // (1*1 - 1*0.5) / 1.5 = 1/3
        const std::vector<double> x{1.0, -1.0};
        CHECK(weighted_mean(x, w) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("matches plain summation on 1000 random points") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(-10.0, 10.0);
        LatWeights rw;
        std::vector<double> x;
        for (int i = 0; i < 1000; ++i) {
            rw.w.push_back(0.05 + 0.95 * std::abs(uni(rng)) / 10.0);
            x.push_back(uni(rng));
        }
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 1000; ++i) {
            num += rw.w[i] * x[i];
            den += rw.w[i];
        }
        const double oracle = num / den;
        CHECK(weighted_mean(x, rw) == doctest::Approx(oracle).epsilon(1e-12));
    }
    SUBCASE("length mismatch") {
        const std::vector<double> x{1.0};
        CHECK_THROWS_AS(weighted_mean(x, w), ArgumentError);
    }
}

TEST_CASE("remove_global_mean") {
    const OceanMask mask = all_ocean(Grid{12, 8, 15.0, -78.75, 30.0, 22.5});
    const LatWeights w = area_weights(mask);

    SUBCASE("constant becomes zero") {
        const Field f = make_field(mask, 4.5);
        const Field out = remove_global_mean(f, mask);
        for (double v : ocean_values(out, mask)) CHECK(v == doctest::Approx(0.0));
    }
    SUBCASE("random field ends up mean-free and the op is idempotent") {
        const Field f = random_field(mask, 99);
        const Field out = remove_global_mean(f, mask);
        CHECK(std::abs(weighted_mean(ocean_values(out, mask), w)) < 1e-10);

        const Field twice = remove_global_mean(out, mask);
        const auto a = ocean_values(out, mask);
        const auto b = ocean_values(twice, mask);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
    }
    SUBCASE("land cells stay missing") {
        OceanMask holey = mask;
        holey.mask[5] = 0;
        const Field f = random_field(holey, 3);
        const Field out = remove_global_mean(f, holey);
        CHECK(std::isnan(out.values[5]));
    }
}

TEST_CASE("coarsen") {
    SUBCASE("factor 1 is the identity") {
        const OceanMask mask = all_ocean(Grid{8, 4, 0.0, -60.0, 45.0, 40.0});
        const Field f = random_field(mask, 11);
        const Field out = coarsen(f, 1);
        CHECK(out.values == f.values);
    }
    SUBCASE("2x2 block average") {
        const OceanMask mask = all_ocean(Grid{2, 2, 0.0, -30.0, 180.0, 60.0});
        Field f = make_field(mask);
        f.at(0, 0) = 1.0;
        f.at(0, 1) = 2.0;
        f.at(1, 0) = 3.0;
        f.at(1, 1) = 4.0;
        const Field out = coarsen(f, 2);
        REQUIRE(out.grid.n_lon == 1);
        REQUIRE(out.grid.n_lat == 1);
        CHECK(out.at(0, 0) == doctest::Approx(2.5).epsilon(1e-15));
        // coarse cell center sits between the fine centers
        CHECK(out.grid.lon0 == doctest::Approx(90.0));
        CHECK(out.grid.lat0 == doctest::Approx(0.0));
    }
    SUBCASE("matches a nested-loop oracle at 4x on a large random field") {
        const OceanMask mask = all_ocean(Grid{360, 180, 0.5, -89.5, 1.0, 1.0});
        Field f = random_field(mask, 21);
        // punch some land into it
        std::mt19937_64 rng(22);
        std::uniform_int_distribution<std::size_t> cell(0, f.values.size() - 1);
        for (int h = 0; h < 20000; ++h) f.values[cell(rng)] = kMissing;

        const Field out = coarsen(f, 4);
        for (int J = 0; J < 45; ++J) {
            for (int I = 0; I < 90; ++I) {
                double sum = 0.0;
                int valid = 0;
                for (int j = 4 * J; j < 4 * J + 4; ++j)
                    for (int i = 4 * I; i < 4 * I + 4; ++i)
                        if (!std::isnan(f.at(j, i))) {
                            sum += f.at(j, i);
                            ++valid;
                        }
                if (valid * 2 >= 16) {
                    REQUIRE(out.at(J, I) == doctest::Approx(sum / valid).epsilon(1e-12));
                } else {
                    REQUIRE(std::isnan(out.at(J, I)));
                }
            }
        }
    }
    SUBCASE("majority mask rule on the mask overload") {
        OceanMask mask = all_ocean(Grid{4, 4, 0.0, -60.0, 90.0, 40.0});
        // top-left 2x2 block: 1 ocean cell of 4 -> land; top-right: 2 of 4 -> ocean
        mask.mask[mask.grid.cell_index(2, 0)] = 0;
        mask.mask[mask.grid.cell_index(2, 1)] = 0;
        mask.mask[mask.grid.cell_index(3, 0)] = 0;
        mask.mask[mask.grid.cell_index(3, 2)] = 0;
        mask.mask[mask.grid.cell_index(3, 3)] = 0;
        const OceanMask out = coarsen(mask, 2);
        CHECK(!out.ocean(1, 0));
        CHECK(out.ocean(1, 1));
        CHECK(out.ocean(0, 0));
    }
    SUBCASE("non-divisible factor rejected") {
        const OceanMask mask = all_ocean(Grid{6, 4, 0.0, -60.0, 60.0, 40.0});
        CHECK_THROWS_AS(coarsen(make_field(mask), 4), ArgumentError);
    }
    SUBCASE("adding a constant commutes exactly on dyadic values") {
        const OceanMask mask = all_ocean(Grid{8, 8, 0.0, -70.0, 45.0, 20.0});
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<int> q(-64, 64);
        Field f = make_field(mask);
        for (auto& v : f.values) v = q(rng) / 16.0; // exactly representable
        const double c = 2.25;
        Field shifted = f;
        for (auto& v : shifted.values) v += c;
        const Field a = coarsen(shifted, 2);
        Field b = coarsen(f, 2);
        for (auto& v : b.values) v += c;
        CHECK(a.values == b.values); // bitwise
    }
}

TEST_CASE("weights permute with points at equal latitude") {
    // two masks with different ocean columns on the same latitude row carry
    // identical weight multisets
    OceanMask a = all_ocean(Grid{6, 1, 0.0, 42.0, 60.0, 2.0});
    OceanMask b = a;
    a.mask = {1, 1, 0, 1, 0, 1};
    b.mask = {0, 1, 1, 1, 1, 0};
    const LatWeights wa = area_weights(a);
    const LatWeights wb = area_weights(b);
    REQUIRE(wa.size() == 4);
    REQUIRE(wb.size() == 4);
    for (std::size_t i = 0; i < wa.size(); ++i) CHECK(wa.w[i] == wb.w[i]);
}

} // TEST_SUITE
