#include <doctest.h>

#include "parasharp/specialfn.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <vector>

using namespace parasharp;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

constexpr double kPi = 3.14159265358979323846;

// 60-term power series in 50-digit arithmetic.
double series_oracle(double m, double r) {
    const Big h = Big(r) / 2;
    const Big mm(m);
    Big term = pow(h, mm) / boost::math::tgamma(mm + 1);
    Big sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= -(h * h) / (Big(k) * (Big(k) + mm));
        sum += term;
    }
    return static_cast<double>(sum);
}

bool close_rel(double a, double b, double rel, double floor) {
    return std::fabs(a - b) <= rel * std::fabs(b) + floor;
}

}  // namespace

TEST_SUITE("specialfn") {

TEST_CASE("bessel_j reference values") {
    CHECK(bessel_j(BesselOrder::for_dimension(3), 0.0) == 1.0);
    CHECK(std::fabs(bessel_j(BesselOrder::for_dimension(4), kPi)) < 1e-15);
    CHECK(bessel_j(BesselOrder::for_dimension(5), 1.0) == doctest::Approx(0.44005058574493355).epsilon(1e-14));
}

TEST_CASE("bessel_j matches series oracle on [0,20]") {
    for (int n = 3; n <= 6; ++n) {
        const BesselOrder o = BesselOrder::for_dimension(n);
        double worst = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double r = 0.05 * i;
            const double ref = series_oracle(o.m, r);
            const double got = bessel_j(o, r);
            worst = std::max(worst, std::fabs(got - ref) / (std::fabs(ref) + 1e-5));
            CHECK(close_rel(got, ref, 1e-10, 1e-15));
        }
        MESSAGE("n=" << n << " worst scaled deviation " << worst);
    }
}

TEST_CASE("bessel_j against 50-digit library values up to 1000") {
    for (int n = 3; n <= 8; ++n) {
        const BesselOrder o = BesselOrder::for_dimension(n);
        for (double r = 0.37; r < 1000.0; r *= 1.07) {
            const double ref = static_cast<double>(boost::math::cyl_bessel_j(Big(o.m), Big(r)));
            CHECK(close_rel(bessel_j(o, r), ref, 1e-10, 1e-14));
        }
    }
}

TEST_CASE("bessel_j branch overlap at the crossover") {
    for (int n = 3; n <= 6; ++n) {
        const BesselOrder o = BesselOrder::for_dimension(n);
        for (double r = 11.0; r <= 13.0; r += 0.01) CHECK(close_rel(bessel_j(o, r), series_oracle(o.m, r), 1e-10, 1e-15));
    }
}

TEST_CASE("bessel_j rejects bad input") {
    const BesselOrder o = BesselOrder::for_dimension(3);
    CHECK_THROWS_AS(bessel_j(o, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_j(o, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(bessel_j(o, INFINITY), std::invalid_argument);
    CHECK_THROWS_AS(BesselOrder::for_dimension(2), std::invalid_argument);
}

TEST_CASE("sphere_measure_ft normalisation") {
    CHECK(sphere_measure_ft(3, 0.0) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(sphere_measure_ft(4, 0.0) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
    CHECK(sphere_measure_ft(5, 0.0) == doctest::Approx(sphere_area(5)).epsilon(1e-14));
    CHECK(std::fabs(sphere_measure_ft(3, 2.404825557695773)) < 1e-14);
    for (double rho = 0.01; rho <= 100.0; rho *= 1.013) {
        const double lhs = sphere_measure_ft(4, rho) * rho;
        const double rhs = 4.0 * kPi * std::sin(rho);
        CHECK(close_rel(lhs, rhs, 1e-10, 1e-13));
    }
}

TEST_CASE("sphere_measure_ft against angular quadrature") {
    // n=3: int_0^{2pi} e^{i rho cos th} dth; n=4: 2pi int_0^pi e^{i rho cos th} sin th dth.
    for (double rho : {0.3, 1.7, 6.0, 23.0}) {
        const int N = 4000;
        double s3 = 0.0;
        for (int k = 0; k < N; ++k) s3 += std::cos(rho * std::cos(2.0 * kPi * k / N));
        s3 *= 2.0 * kPi / N;
        CHECK(sphere_measure_ft(3, rho) == doctest::Approx(s3).epsilon(1e-12));
        double s4 = 0.0;
        for (int k = 0; k < N; ++k) {
            const double th = kPi * (k + 0.5) / N;
            s4 += std::cos(rho * std::cos(th)) * std::sin(th);
        }
        s4 *= 2.0 * kPi * kPi / N;
        CHECK(sphere_measure_ft(4, rho) == doctest::Approx(s4).epsilon(1e-6));
    }
}

TEST_CASE("bessel_split reproduces J_m") {
    for (int n : {3, 4, 5, 6}) {
        const BesselOrder o = BesselOrder::for_dimension(n);
        std::vector<double> grid;
        for (double r = 1.0; r <= 1024.0; r *= 1.05) grid.push_back(r);
        grid.push_back(1024.0);
        for (double r : grid) {
            const BesselSplit s = bessel_split(o, r);
            const double j = bessel_j(o, r);
            CHECK(std::abs(s.main + s.error - j) <= 1e-8 * (1.0 + std::fabs(j)));
            CHECK(std::fabs((s.main + s.error).imag()) < 1e-12);
        }
    }
}

TEST_CASE("bessel_split order one half has no remainder") {
    const BesselSplit s = bessel_split(BesselOrder::for_dimension(4), 10.0);
    CHECK(s.error == std::complex<double>(0.0, 0.0));
    CHECK(s.main.real() == doctest::Approx(std::sqrt(2.0 / (kPi * 10.0)) * std::sin(10.0)).epsilon(1e-14));
}

TEST_CASE("bessel_split rejects r below one") {
    CHECK_THROWS_AS(bessel_split(BesselOrder::for_dimension(3), 0.5), std::invalid_argument);
}

TEST_CASE("remainder decays like r^{-n/2}") {
    const BesselOrder o = BesselOrder::for_dimension(5);
    double sup = 0.0;
    for (int k = 0; k <= 10; ++k) {
        const double r = std::ldexp(1.0, k);
        const BesselSplit s = bessel_split(o, r);
        sup = std::max(sup, std::max(std::abs(s.e_plus), std::abs(s.e_minus)) * std::pow(r, 2.5));
    }
    CHECK(std::isfinite(sup));
    CHECK(sup < 10.0);
}

TEST_CASE("error_bound_constant frozen values") {
    std::vector<double> grid;
    for (int r = 1; r <= 1024; ++r) grid.push_back(r);
    CHECK(error_bound_constant(4, grid) == 0.0);
    // order 3/2: the bracket is exactly y, so E = 2 r^{-3} and the constant is 2.
    CHECK(error_bound_constant(6, grid) == doctest::Approx(2.0).epsilon(1e-12));
    const double c3 = error_bound_constant(3, grid);
    const double c5 = error_bound_constant(5, grid);
    CHECK(c3 == doctest::Approx(0.156664203258).epsilon(1e-9));
    CHECK(c5 == doctest::Approx(0.469992700819).epsilon(1e-9));
    // large-r limit |a| 2^{a-1} Gamma(a+2), a = m - 1/2
    CHECK(c3 == doctest::Approx(0.5 * std::pow(2.0, -1.5) * std::tgamma(1.5)).epsilon(1e-3));
    CHECK(c5 == doctest::Approx(0.5 * std::pow(2.0, -0.5) * std::tgamma(2.5)).epsilon(1e-3));
    CHECK(error_bound_constant(3, grid, 32) == doctest::Approx(c3).epsilon(1e-9));
    CHECK(error_bound_constant(5, grid, 32) == doctest::Approx(c5).epsilon(1e-9));
    std::vector<double> half(grid.begin(), grid.begin() + 512);
    CHECK(c3 - error_bound_constant(3, half) < 1e-4 * c3);
    CHECK_THROWS_AS(error_bound_constant(3, {}), std::invalid_argument);
    CHECK_THROWS_AS(error_bound_constant(3, {0.5}), std::invalid_argument);
}

}
