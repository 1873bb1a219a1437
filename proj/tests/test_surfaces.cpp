#include <doctest.h>

#include "parasharp/surfaces.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

using namespace parasharp;

namespace {
constexpr double kPi = 3.14159265358979323846;
const Surface kPar = Surface::paraboloid();
}  // namespace

TEST_SUITE("surfaces") {

TEST_CASE("surface phases and derivatives") {
    const Surface sph = Surface::sphere_lower_third();
    const Surface ell = Surface::elliptic(1.0 / 32.0);
    for (double s : {0.05, 0.1, 0.2, 0.3}) {
        CHECK(kPar.a(s) == doctest::Approx(s * s));
        CHECK(sph.a(s) == doctest::Approx(-std::sqrt(1 - s * s)));
        CHECK(ell.a(s) == doctest::Approx(s * s + std::pow(s, 4) / 32.0));
        const double h = 1e-6;
        for (const Surface* S : {&kPar, &sph, &ell}) {
            CHECK(S->da(s) == doctest::Approx((S->a(s + h) - S->a(s - h)) / (2 * h)).epsilon(1e-7));
            CHECK(S->d2a(s) == doctest::Approx((S->da(s + h) - S->da(s - h)) / (2 * h)).epsilon(1e-6));
        }
    }
    CHECK_THROWS_AS(Surface::elliptic(0.1), std::invalid_argument);
    CHECK_THROWS_AS(Surface::elliptic(-1e-3), std::invalid_argument);
    CHECK(surface_from_name("sphere").kind == SurfaceKind::SphereLowerThird);
    CHECK(surface_from_name("elliptic").eps == doctest::Approx(1.0 / 32.0));
    CHECK_THROWS_AS(surface_from_name("cone"), std::invalid_argument);
}

TEST_CASE("density_eval examples") {
    const RadialDensity ind = indicator_density(1.0, 2.0);
    CHECK(density_eval(ind, kPar, 1.5) == std::complex<double>(1.0, 0.0));
    const RadialDensity pw = indicator_density(1.0, 3.0, -1.0);
    CHECK(density_eval(pw, kPar, 2.0).real() == doctest::Approx(0.5));
    const double R = 64.0;
    RadialDensity ex = indicator_density(1.0, 1.0 + 1.0 / std::sqrt(R), -0.5);
    ex.r0 = 0.75 * R;
    CHECK(density_eval(ex, kPar, 0.99) == std::complex<double>(0.0, 0.0));
    CHECK(density_eval(ex, kPar, 1.2) == std::complex<double>(0.0, 0.0));
    const auto v = density_eval(ex, kPar, 1.05);
    CHECK(std::abs(v) == doctest::Approx(std::pow(1.05, -0.5)));
    CHECK(std::arg(v) == doctest::Approx(std::remainder(-0.75 * R * 1.05, 2 * kPi)));
}

TEST_CASE("signed pieces") {
    RadialDensity d = indicator_density(1.0, 2.0);
    d.pieces = {{1.0, 1.25, 1}, {1.25, 1.5, -1}, {1.5, 2.0, 1}};
    CHECK_NOTHROW(d.validate());
    CHECK(density_eval(d, kPar, 1.3).real() == -1.0);
    CHECK(density_eval(d, kPar, 1.7).real() == 1.0);
    CHECK(d.breakpoints().size() == 4);
    d.pieces[1].sign = 2;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.pieces = {{1.0, 1.25, 1}, {1.3, 2.0, 1}};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.pieces = {{1.0, 1.25, 1}};
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("invalid supports rejected") {
    CHECK_THROWS_AS(indicator_density(0.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(indicator_density(2.0, 1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(check_surface_support(Surface::sphere_lower_third(), indicator_density(0.2, 0.5)),
                    std::invalid_argument);
    CHECK_NOTHROW(check_surface_support(Surface::sphere_lower_third(), indicator_density(0.1, 1.0 / 3.0)));
}

TEST_CASE("lp_surface_norm examples") {
    const RadialDensity ind = indicator_density(1.0, 2.0);
    CHECK(lp_surface_norm(ind, std::numeric_limits<double>::infinity(), 3) == 1.0);
    CHECK(lp_surface_norm(ind, 2.0, 3) == doctest::Approx(std::sqrt(2 * kPi * 1.5)).epsilon(1e-14));
    CHECK_THROWS_AS(lp_surface_norm(ind, 0.5, 3), std::invalid_argument);

    for (int n : {3, 4, 5}) {
        const double R = 64.0;
        RadialDensity ex = indicator_density(1.0, 1.0 + 1.0 / std::sqrt(R), -(n - 2) / 2.0);
        ex.r0 = 0.75 * R;
        for (double p : {1.0, 2.0, 3.5}) {
            auto f = [&](double s) { return std::pow(std::abs(density_eval(ex, kPar, s)), p) * std::pow(s, n - 2.0); };
            const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, ex.s_lo, ex.s_hi, 15, 1e-14);
            const double area = 2 * std::pow(kPi, (n - 1) / 2.0) / std::tgamma((n - 1) / 2.0);
            CHECK(lp_surface_norm(ex, p, n) == doctest::Approx(std::pow(area * I, 1 / p)).epsilon(1e-10));
        }
    }
}

TEST_CASE("lp_surface_norm properties") {
    RadialDensity d = indicator_density(0.5, 1.5, 0.7);
    const double base = lp_surface_norm(d, 3.0, 4);
    d.r0 = 17.0;
    d.t0 = -4.0;
    CHECK(std::fabs(lp_surface_norm(d, 3.0, 4) - base) <= 1e-12 * base);
    // |lambda| F via profile hook against the closed form.
    RadialDensity scaled = indicator_density(0.5, 1.5);
    scaled.profile = [](double s) { return -2.5 * std::pow(s, 0.7); };
    CHECK(lp_surface_norm(scaled, 3.0, 4) == doctest::Approx(2.5 * base).epsilon(1e-12));
    double prev = 0.0;
    for (double hi : {1.1, 1.5, 2.0, 4.0}) {
        const double v = lp_surface_norm(indicator_density(1.0, hi, -0.5), 2.0, 5);
        CHECK(v > prev);
        prev = v;
    }
    // log branch: beta p + n - 2 = -1
    const RadialDensity lg = indicator_density(1.0, std::exp(1.0), -1.0);
    CHECK(lp_surface_norm(lg, 2.0, 3) == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-14));
}

}  // TEST_SUITE
