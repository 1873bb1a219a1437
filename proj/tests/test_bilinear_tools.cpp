#include <doctest.h>

#include "parasharp/bilinear_tools.hpp"
#include "parasharp/quadrature.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

using namespace parasharp;

TEST_SUITE("bilinear_tools") {

TEST_CASE("relation on small generations") {
    CHECK_FALSE(whitney_related(0, 0, 0));
    CHECK_FALSE(whitney_related(1, 0, 1));  // siblings
    CHECK(whitney_related(2, 0, 2));
    CHECK(whitney_related(2, 0, 3));
    CHECK(whitney_related(2, 1, 3));
    CHECK_FALSE(whitney_related(2, 1, 2));  // adjacent
    CHECK_FALSE(whitney_related(3, 0, 4));  // parents 0 and 2 not adjacent
    CHECK_FALSE(whitney_related(2, 0, 4));  // out of range
    CHECK(whitney_decompose(0).empty());
    CHECK(whitney_decompose(1).empty());
    CHECK(whitney_decompose(2).size() == 6);
    CHECK_THROWS_AS(whitney_decompose(21), std::invalid_argument);
    CHECK_THROWS_AS(whitney_decompose(-1), std::invalid_argument);
}

TEST_CASE("frozen pair counts and depth-6 exhaustive checks") {
    const WhitneyReport rep = whitney_check(6);
    const std::vector<std::size_t> frozen = {0, 0, 6, 18, 42, 90, 186};
    CHECK(rep.pairs_per_generation == frozen);
    CHECK(rep.pair_count == 342);
    CHECK(rep.max_partners <= 4);
    CHECK(rep.max_partners == 3);
    CHECK(rep.symmetric);
    CHECK(rep.separation_ok);
    CHECK(rep.grid_points == 64 * 63);
    CHECK(rep.uncovered == 0);
    CHECK(rep.max_cover == 1);
    CHECK(rep.pass());
    // 3 * 2^j - 6 ordered pairs per generation
    const auto deep = whitney_check(12, 16);
    for (int j = 2; j <= 12; ++j) CHECK(deep.pairs_per_generation[static_cast<std::size_t>(j)] == 3 * (std::size_t{1} << j) - 6);
}

TEST_CASE("pairs are symmetric and separated") {
    const auto pairs = whitney_decompose(8);
    std::set<std::tuple<int, long, long>> seen;
    for (const auto& p : pairs) seen.insert({p.j, p.k, p.kp});
    for (const auto& p : pairs) {
        CHECK(seen.count({p.j, p.kp, p.k}) == 1);
        const double w = std::ldexp(1.0, -p.j);
        CHECK(p.separation() >= w);
        CHECK(p.separation() <= 4 * w);
        CHECK(p.hi() - p.lo() == w);
    }
}

TEST_CASE("covering multiplicity") {
    // a point whose coordinates are 2^-depth+2 apart is covered exactly once
    for (int depth : {3, 6, 10})
        for (double s1 : {1.01, 1.37, 1.5, 1.93}) {
            const double s2 = s1 + std::ldexp(1.0, -depth + 2) * (s1 < 1.5 ? 1 : -1);
            CHECK(whitney_cover_count(depth, s1, s2) == 1);
        }
    CHECK(whitney_cover_count(6, 1.3, 1.3) == 0);
}

TEST_CASE("arc convolution sup") {
    const WhitneyPair near{5, 4, 6};
    CHECK(arc_convolution_sup(5, near) == doctest::Approx(std::ldexp(1.0, 4)).epsilon(1e-12));
    std::vector<double> x, y;
    for (int j = 2; j <= 8; ++j) {
        double lo = INFINITY, hi = 0.0;
        for (const auto& p : whitney_decompose(j)) {
            if (p.j != j) continue;
            const double s = arc_convolution_sup(j, p);
            CHECK(s <= std::ldexp(1.0, j - 1) * (1 + 1e-12));
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        CHECK(hi <= 4 * lo);
        x.push_back(j);
        y.push_back(std::log2(hi));
    }
    CHECK(fit_line(x, y).slope == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(arc_convolution_sup(5, WhitneyPair{5, 4, 5}), std::invalid_argument);
    CHECK_THROWS_AS(arc_convolution_sup(4, near), std::invalid_argument);
}

TEST_CASE("quasi-orthogonality") {
    QuasiOrthoOptions o;
    o.seed = 2024;
    const QuasiOrthoResult r = quasi_orthogonality_defect(4, o);
    CHECK(r.pairs == 21);
    CHECK(r.ratios.size() == 16);
    // frozen baseline for seed 2024
    CHECK(r.max_ratio == doctest::Approx(1.2382).epsilon(1e-3));
    CHECK(r.max_ratio <= 8.0);
    for (std::uint64_t seed : {1ULL, 99ULL}) {
        o.seed = seed;
        CHECK(quasi_orthogonality_defect(4, o).max_ratio <= 1.5 * 1.2382);
    }

    QuasiOrthoOptions one;
    one.active = {{0, 2}};
    one.trials = 3;
    for (double v : quasi_orthogonality_defect(4, one).ratios) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));

    // t-frequencies s1^2 + s2^2 of the two pairs are disjoint
    QuasiOrthoOptions apart;
    apart.active = {{0, 2}, {13, 15}};
    for (double v : quasi_orthogonality_defect(4, apart).ratios) CHECK(v == doctest::Approx(1.0).epsilon(1e-3));

    CHECK_THROWS_AS(quasi_orthogonality_defect(11), std::invalid_argument);
    QuasiOrthoOptions bad;
    bad.active = {{3, 3}};
    CHECK_THROWS_AS(quasi_orthogonality_defect(4, bad), std::invalid_argument);
}

}  // TEST_SUITE
