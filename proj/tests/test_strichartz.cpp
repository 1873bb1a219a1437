#include <doctest.h>

#include "parasharp/strichartz.hpp"

#include <cmath>
#include <stdexcept>

using namespace parasharp;

namespace {

StrichartzGrid short_grid() {
    StrichartzGrid g;
    g.max_up = 5;
    return g;
}

}  // namespace

TEST_SUITE("strichartz") {

TEST_CASE("frequency bands") {
    const FrequencyBand b = smooth_band(4.0);
    CHECK(b.spectrum.s_lo == 4.0);
    CHECK(b.spectrum.s_hi == 8.0);
    CHECK_NOTHROW(b.validate());
    CHECK_THROWS_AS(smooth_band(3.0), std::invalid_argument);
    FrequencyBand bad = b;
    bad.spectrum.s_hi = 9.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("mass conservation") {
    for (double M : {0.5, 1.0, 4.0}) {
        const FrequencyBand b = smooth_band(M);
        const double data = data_l2_norm(b, 3);
        for (double t : {0.0, 1.0, 4.0}) {
            CAPTURE(M);
            CAPTURE(t);
            CHECK(std::fabs(evolved_mass(b, 3, t) / data - 1) < 0.01);
        }
    }
    const FrequencyBand b5 = smooth_band(1.0);
    CHECK(std::fabs(evolved_mass(b5, 5, 4.0) / data_l2_norm(b5, 5) - 1) < 0.01);
}

TEST_CASE("dyadic annulus sums") {
    // 2^{-|k|}: total 3, tails extrapolated exactly
    const DyadicSum s = dyadic_annulus_sum([](int k) { return std::ldexp(1.0, -std::abs(k)); }, 20, 20, 1e-3);
    CHECK(s.converged);
    CHECK(s.total == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.k_min == -3);  // ratios stable after the minimum three steps
    CHECK(s.k_max == 3);
    CHECK(s.terms.size() == 7);

    const DyadicSum d = dyadic_annulus_sum([](int) { return 1.0; }, 4, 4, 1e-3);
    CHECK_FALSE(d.converged);
    CHECK(d.total == 9.0);
    CHECK_THROWS_AS(dyadic_annulus_sum([](int) { return 1.0; }, 0, 4, 1e-3), std::invalid_argument);
}

TEST_CASE("linear exponent and domain") {
    CHECK(linear_strichartz_exponent(4.0, 3) == 0.0);
    CHECK(linear_strichartz_exponent(6.0, 4) == doctest::Approx(1.5 - 5.0 / 6.0));
    const FrequencyBand b = smooth_band(1.0);
    CHECK_THROWS_AS(linear_strichartz_ratio(b, 10.0 / 3.0, 3), std::domain_error);
    CHECK_THROWS_AS(linear_strichartz_ratio(b, 3.0, 3), std::domain_error);
    FrequencyBand zero = b;
    zero.spectrum.profile = [](double) { return 0.0; };
    CHECK_THROWS_AS(linear_strichartz_ratio(zero, 4.0, 3, short_grid()), std::domain_error);
}

TEST_CASE("linear ratio under parabolic rescaling") {
    const StrichartzGrid g = short_grid();
    const StrichartzResult one = linear_strichartz_ratio(smooth_band(1.0), 4.0, 3, g);
    const StrichartzResult four = linear_strichartz_ratio(smooth_band(4.0), 4.0, 3, g);
    const StrichartzResult quarter = linear_strichartz_ratio(smooth_band(0.25), 4.0, 3, g);
    CHECK(one.ratio > 0.0);
    CHECK(std::fabs(four.ratio / one.ratio - 1) < 1e-6);
    CHECK(std::fabs(quarter.ratio / one.ratio - 1) < 1e-6);
    // q = 6: exponent 1 - 4/6 carried by the factor
    const double r6a = linear_strichartz_ratio(smooth_band(1.0), 6.0, 3, g).ratio;
    const double r6b = linear_strichartz_ratio(smooth_band(2.0), 6.0, 3, g).ratio;
    CHECK(std::fabs(r6b / r6a - 1) < 1e-6);
}

TEST_CASE("ratios ignore unimodular constants and time shifts") {
    const StrichartzGrid g = short_grid();
    FrequencyBand b = smooth_band(1.0);
    const double base = linear_strichartz_ratio(b, 4.0, 3, g).ratio;
    FrequencyBand neg = b;
    neg.spectrum.pieces = {{1.0, 2.0, -1}};
    CHECK(linear_strichartz_ratio(neg, 4.0, 3, g).ratio == doctest::Approx(base).epsilon(1e-12));
    FrequencyBand shifted = b;
    shifted.spectrum.t0 = 3.0;
    CHECK(linear_strichartz_ratio(shifted, 4.0, 3, g).ratio == doctest::Approx(base).epsilon(1e-6));
    CHECK(weighted_local_ratio(shifted, 0.5, 3).ratio == doctest::Approx(weighted_local_ratio(b, 0.5, 3).ratio).epsilon(1e-12));
}

TEST_CASE("weighted local ratio") {
    const double base = weighted_local_ratio(smooth_band(1.0), 0.5, 3).ratio;
    CHECK(base == doctest::Approx(2.51632).epsilon(1e-5));
    for (int k = -3; k <= 3; ++k) {
        const StrichartzResult r = weighted_local_ratio(smooth_band(std::ldexp(1.0, k)), 0.5, 3);
        CAPTURE(k);
        CHECK(r.converged);
        CHECK(std::fabs(r.ratio / base - 1) < 1e-6);
    }
    // constant blows up as eps -> 0
    double prev = 0.0;
    for (double eps : {0.25, 0.125, 0.0625, 0.03125}) {
        const double r = weighted_local_ratio(smooth_band(1.0), eps, 3).ratio;
        CHECK(r > prev);
        prev = r;
    }
    const FrequencyBand b = smooth_band(1.0);
    CHECK_THROWS_AS(weighted_local_ratio(b, 0.0, 3), std::domain_error);
    CHECK_THROWS_AS(weighted_local_ratio(b, 1.0, 3), std::domain_error);
    CHECK_NOTHROW(weighted_local_ratio(b, 1.5, 4));
}

TEST_CASE("bilinear branch exponents") {
    const auto q2 = bilinear_strichartz_exponents(2.0, 3);
    CHECK(q2.first == -0.5);
    CHECK(q2.second == 0.5);
    for (int n = 3; n <= 8; ++n) {
        const auto e = bilinear_strichartz_exponents(Rational(1, 2), n, StrichartzBranch::Low);
        CHECK(e.R == Rational(-1, 2));
        CHECK(e.M == Rational(n - 2, 2));
        CHECK(bilinear_strichartz_continuous(n));
    }
    // n = 3 boundary q = 10/3
    const auto hi = bilinear_strichartz_exponents(Rational(3, 10), 3, StrichartzBranch::High);
    CHECK(hi.R == Rational(-1, 5));
    CHECK(hi.M == Rational(1));
    CHECK(bilinear_strichartz_branch(2.0, 3) == StrichartzBranch::Low);
    CHECK(bilinear_strichartz_branch(3.0, 3) == StrichartzBranch::Mid);
    CHECK(bilinear_strichartz_branch(10.0 / 3.0, 3) == StrichartzBranch::Mid);
    CHECK(bilinear_strichartz_branch(4.0, 3) == StrichartzBranch::High);
    CHECK(bilinear_strichartz_branch(1.75, 3) == StrichartzBranch::Low);
    CHECK_THROWS_AS(bilinear_strichartz_branch(1.5, 3), std::domain_error);
    CHECK_THROWS_AS(bilinear_strichartz_exponents(Rational(1, 4), 3, StrichartzBranch::Mid), std::domain_error);
    CHECK_THROWS_AS(bilinear_strichartz_exponents(Rational(2, 3), 3, StrichartzBranch::Low), std::domain_error);
}

TEST_CASE("bilinear ratio") {
    const FrequencyBand b1 = smooth_band(1.0), b2 = smooth_band(0.25);
    const StrichartzResult r = bilinear_strichartz_ratio(b1, b2, 2.0, 3);
    CHECK(r.converged);
    CHECK(r.ratio == doctest::Approx(0.31855).epsilon(1e-4));
    // simultaneous rescaling
    const StrichartzResult s = bilinear_strichartz_ratio(smooth_band(4.0), smooth_band(1.0), 2.0, 3);
    CHECK(std::fabs(s.ratio / r.ratio - 1) < 1e-6);
    // stable in M2
    const StrichartzResult t = bilinear_strichartz_ratio(b1, smooth_band(0.125), 2.0, 3);
    CHECK(std::fabs(t.ratio / r.ratio - 1) < 0.05);
    for (double q : {1.75, 3.0, 6.0}) {
        CAPTURE(q);
        const StrichartzResult u = bilinear_strichartz_ratio(b1, b2, q, 3);
        CHECK(u.converged);
        CHECK(u.ratio > 0.0);
    }
    CHECK_THROWS_AS(bilinear_strichartz_ratio(b1, smooth_band(0.5), 2.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(bilinear_strichartz_ratio(b1, b2, 1.5, 3), std::domain_error);
}

}  // TEST_SUITE
