#include <doctest.h>

#include "parasharp/extension.hpp"
#include "parasharp/quadrature.hpp"
#include "parasharp/specialfn.hpp"

#include <cmath>
#include <random>

using namespace parasharp;

namespace {
constexpr double kPi = 3.14159265358979323846;
const Surface kPar = Surface::paraboloid();

RadialDensity conj_density(RadialDensity d) {
    d.r0 = -d.r0;
    d.t0 = -d.t0;
    return d;
}
}  // namespace

TEST_SUITE("extension") {

TEST_CASE("value at the origin") {
    const RadialDensity d = indicator_density(1.0, 2.0);
    CHECK(std::abs(extension_full(d, kPar, 3, 0.0, 0.0) - cplx(3 * kPi, 0)) < 1e-12);
    CHECK(std::abs(schrodinger_evolve(d, 3, 0.0, 0.0) - cplx(3 * kPi, 0)) < 1e-12);
    // n=4: area 4 pi, int s^2 = 7/3
    CHECK(std::abs(extension_full(d, kPar, 4, 0.0, 0.0) - cplx(4 * kPi * 7 / 3, 0)) < 1e-11);
}

TEST_CASE("closed form at t=0 for n=4") {
    // (dmu)^(rho) = 4 pi sin(rho)/rho, so u(0,r) = 4 pi int_1^2 s sin(rs)/r ds.
    const RadialDensity d = indicator_density(1.0, 2.0);
    for (double r : {0.5, 3.0, 40.0, 700.0}) {
        const double prim = (std::sin(2 * r) - 2 * r * std::cos(2 * r) - std::sin(r) + r * std::cos(r)) / (r * r);
        const double ref = 4 * kPi * prim / r;
        CHECK(std::abs(extension_full(d, kPar, 4, 0.0, r) - ref) <= 1e-9 * (1 + std::fabs(ref)));
    }
}

TEST_CASE("conjugate symmetry") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        RadialDensity d = indicator_density(0.5 + U(rng), 2.0 + U(rng), -U(rng));
        d.r0 = 30 * (U(rng) - 0.5);
        d.t0 = 10 * (U(rng) - 0.5);
        const int n = 3 + k % 4;
        const double t = 20 * (U(rng) - 0.5), r = 50 * U(rng);
        const cplx a = extension_full(d, kPar, n, t, r);
        const cplx b = extension_full(conj_density(d), kPar, n, -t, r);
        CHECK(std::abs(a - std::conj(b)) <= 1e-10 * (1 + std::abs(a)));
    }
}

TEST_CASE("decomposition identity") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    QuadratureSpec spec;
    spec.rel_tol = 1e-8;
    for (int k = 0; k < 24; ++k) {
        const int n = 3 + k % 4;
        RadialDensity d = indicator_density(0.5 + U(rng), 2.0 + U(rng), -(n - 2) / 2.0 * U(rng));
        d.r0 = 20 * (U(rng) - 0.5);
        d.t0 = 6 * (U(rng) - 0.5);
        const double t = 10 * (U(rng) - 0.5), r = 1.0 + 60 * U(rng);
        const cplx full = extension_full(d, kPar, n, t, r, spec);
        const cplx mt = main_term(d, n, t, r, spec);
        const cplx et = error_term(d, n, t, r, spec);
        const double tol = 10 * spec.rel_tol * (std::abs(mt) + std::abs(et) + 1e-16);
        CHECK(std::abs(full - (mt + et)) <= tol);
    }
}

TEST_CASE("main and error term examples") {
    const RadialDensity d = indicator_density(1.0, 2.0);
    CHECK(error_term(d, 4, 1.3, 5.0) == cplx(0.0, 0.0));
    for (int n = 3; n <= 6; ++n)
        for (double r : {1.0, 4.0, 32.0}) {
            const double cn = std::pow(2 * kPi, (n - 1) / 2.0) / std::sqrt(2 * kPi);
            CHECK(std::abs(main_term(d, n, 0.0, r)) <= 2 * cn * std::pow(r, -(n - 2) / 2.0) * std::pow(2.0, (n - 2) / 2.0));
        }
    // n=3, r=8: |E| r^{3/2} <= C3 gives |error| <= 4 C3 int s (8s)^{-3/2} ds.
    const double C3 = 0.156664203258;
    const double bound = 4 * C3 * std::pow(8.0, -1.5) * 2 * (std::sqrt(2.0) - 1);
    const cplx e8 = error_term(d, 3, 0.0, 8.0);
    CHECK(std::abs(e8) <= bound);
    CHECK(std::abs(e8 - (extension_full(d, kPar, 3, 0.0, 8.0) - main_term(d, 3, 0.0, 8.0))) < 1e-9);
    // n=5: |error| r^{5/2} stays bounded.
    double lo = 1e300, hi = 0.0;
    for (double r = 4; r <= 512; r *= 2) {
        const double v = std::abs(error_term(d, 5, 0.0, r)) * std::pow(r, 2.5);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    MESSAGE("n=5 |error| r^{5/2} in [" << lo << ", " << hi << "]");
    CHECK(hi < 50.0);
    CHECK_THROWS_AS(main_term(d, 3, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(error_term(d, 3, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("Example-II branch size at a probe point") {
    for (int e = 6; e <= 10; e += 2) {
        const double R = std::ldexp(1.0, e);
        RadialDensity d = indicator_density(1.0, 2.0, -0.5);
        d.r0 = 0.0;
        // (r - r0) / (2 (t - t0)) = 1.5 is stationary at s = 1.5
        const double r = R / 64.0 * 3, t = r / 3.0;
        const auto [plus, minus] = main_term_branches(d, 3, t, r);
        const double scaled = std::abs(plus) * std::sqrt(R);
        MESSAGE("R=" << R << " |+| sqrt(R)=" << scaled);
        CHECK(scaled > 0.2);
        CHECK(std::abs(minus) < std::abs(plus));
    }
}

TEST_CASE("Example-III at its own focus") {
    for (int n : {3, 4, 5}) {
        for (int e = 4; e <= 10; e += 2) {
            const double R = std::ldexp(1.0, e);
            RadialDensity d = indicator_density(1.0, 2.0, -(n - 2) / 2.0);
            d.r0 = R;
            d.t0 = R / 2;
            const cplx v = extension_full(d, kPar, n, d.t0, d.r0);
            CHECK(std::abs(v) >= 0.5 * std::pow(R, -(n - 2) / 2.0));
        }
    }
}

TEST_CASE("halving oscillation factor is stable") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    QuadratureSpec spec;
    QuadratureSpec half = spec;
    half.oscillation_factor /= 2;
    for (int k = 0; k < 16; ++k) {
        const int n = 3 + k % 3;
        RadialDensity d = indicator_density(1.0, 1.5 + U(rng), -0.5);
        d.r0 = 100 * U(rng);
        const double t = 40 * (U(rng) - 0.5), r = 200 * U(rng);
        const ExtensionField a(d, kPar, n, spec), b(d, kPar, n, half);
        const cplx va = a(t, r), vb = b(t, r);
        CHECK(std::abs(va - vb) <= spec.rel_tol * std::max(std::abs(vb), 1e-3 * std::abs(b(d.t0, d.r0))));
    }
}

TEST_CASE("grid evaluation agrees with pointwise evaluation") {
    RadialDensity d = indicator_density(1.0, 2.0, -0.5);
    d.pieces = {{1.0, 1.3, 1}, {1.3, 1.7, -1}, {1.7, 2.0, 1}};
    d.r0 = 5.0;
    const ExtensionField u(d, kPar, 3);
    std::vector<double> t{-3.0, 0.0, 0.7, 9.0}, r{0.0, 1.0, 12.5, 80.0, 300.0};
    std::vector<cplx> g(t.size() * r.size());
    u.eval_grid(t, r, g);
    for (std::size_t k = 0; k < r.size(); ++k)
        for (std::size_t i = 0; i < t.size(); ++i) {
            const cplx ref = extension_full(d, kPar, 3, t[i], r[k]);
            CHECK(std::abs(g[k * t.size() + i] - ref) <= 1e-6 * (std::abs(ref) + 1e-3));
        }
    const ProductField uu(u, u);
    std::vector<cplx> p(g.size());
    uu.eval_grid(t, r, p);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(p[i] - g[i] * g[i]) <= 1e-12 * (1 + std::norm(g[i])));
    CHECK(uu.t_frequency() == doctest::Approx(6.0));
    CHECK(uu.r_frequency() == doctest::Approx(8.0));
}

TEST_CASE("parabolic rescaling covariance") {
    const int n = 3;
    RadialDensity unit = indicator_density(1.0, 2.0, -0.5);
    unit.r0 = 7.0;
    unit.t0 = 1.5;
    for (double M : {0.25, 0.5, 2.0, 4.0}) {
        RadialDensity band = indicator_density(M, 2 * M, -0.5);
        band.r0 = unit.r0 / M;
        band.t0 = unit.t0 / (M * M);
        const double jac = std::pow(M, n - 1 + unit.beta);
        for (double t : {-2.0, 0.3, 5.0})
            for (double r : {0.0, 2.0, 25.0}) {
                const cplx lhs = schrodinger_evolve(band, n, t, r);
                const cplx rhs = jac * schrodinger_evolve(unit, n, M * M * t, M * r);
                CHECK(std::abs(lhs - rhs) <= 1e-8 * (std::abs(rhs) + 1e-6));
            }
    }
}

TEST_CASE("mass conservation") {
    // Smooth bump so the r-tail of |u|^2 r decays fast.
    RadialDensity d = indicator_density(1.0, 2.0);
    d.profile = [](double s) { return std::pow(std::sin(kPi * (s - 1)), 2); };
    const int n = 3;
    double planch = 0.0;
    {
        std::vector<double> x, w;
        append_composite(1.0, 2.0, 32, 16, x, w);
        for (std::size_t i = 0; i < x.size(); ++i) planch += w[i] * std::pow(d.profile(x[i]), 2) * x[i];
        planch *= std::pow(2 * kPi, n - 1) * sphere_area(n);
    }
    const ExtensionField u(d, kPar, n);
    std::vector<double> rn, rw;
    append_composite(0.0, 300.0, 600, 8, rn, rw);
    for (double t : {0.0, 1.0}) {
        std::vector<double> tt{-t};  // Schrodinger sign
        std::vector<cplx> vals(rn.size());
        u.eval_grid(tt, rn, vals);
        double mass = 0.0;
        for (std::size_t k = 0; k < rn.size(); ++k) mass += rw[k] * std::norm(vals[k]) * rn[k];
        mass *= sphere_area(n);
        MESSAGE("t=" << t << " mass/plancherel=" << mass / planch);
        CHECK(std::fabs(mass / planch - 1) < 0.01);
    }
}

TEST_CASE("sphere at t=0 against angular quadrature") {
    RadialDensity d = indicator_density(0.1, 0.3, 0.5);
    d.t0 = 40.0;
    d.r0 = 3.0;
    const Surface sph = Surface::sphere_lower_third();
    std::vector<double> sx, sw, th, tw;
    append_composite(0.1, 0.3, 16, 16, sx, sw);
    append_composite(0.0, 2 * kPi, 32, 16, th, tw);
    for (double r : {0.0, 5.0, 60.0, 300.0}) {
        cplx ref(0, 0);
        for (std::size_t i = 0; i < sx.size(); ++i) {
            cplx ang(0, 0);
            for (std::size_t j = 0; j < th.size(); ++j) ang += tw[j] * std::polar(1.0, r * sx[i] * std::cos(th[j]));
            ref += sw[i] * density_eval(d, sph, sx[i]) * sx[i] * ang;
        }
        CHECK(std::abs(extension_full(d, sph, 3, 0.0, r) - ref) <= 1e-9 * (1 + std::abs(ref)));
    }
    CHECK_THROWS_AS(extension_full(indicator_density(0.2, 0.5), sph, 3, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("panel budget failure is explicit") {
    QuadratureSpec tight;
    tight.max_panels = 10;
    const RadialDensity d = indicator_density(1.0, 2.0);
    try {
        (void)extension_full(d, kPar, 3, 1e4, 1e4, tight);
        FAIL("expected QuadratureBudgetError");
    } catch (const QuadratureBudgetError& e) {
        CHECK(e.attempted > 10);
    }
    QuadratureSpec bad;
    bad.rel_tol = 0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.oscillation_factor = 4.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(extension_full(d, kPar, 2, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("ragged rows agree with pointwise evaluation") {
    RadialDensity d = indicator_density(1.0, 1.5, -0.5);
    d.r0 = 20.0;
    const ExtensionField u(d, kPar, 3);
    const ExtensionField v(indicator_density(0.25, 0.5), kPar, 3);
    const ProductField uv(u, v);
    const std::vector<double> r = {3.0, 7.5, 11.0};
    // shared times in every row plus row-specific ends
    const std::vector<std::vector<double>> t = {{0.5, 1.0, 1.5, 0.1}, {0.5, 1.0, 2.25}, {1.0, 1.5, -0.3, 0.5}};
    for (const Field* f : {static_cast<const Field*>(&u), static_cast<const Field*>(&uv)}) {
        std::vector<std::vector<cplx>> rows;
        f->eval_rows(r, t, rows);
        REQUIRE(rows.size() == 3);
        for (std::size_t k = 0; k < 3; ++k) {
            REQUIRE(rows[k].size() == t[k].size());
            for (std::size_t i = 0; i < t[k].size(); ++i) {
                cplx ref;
                f->eval_points(std::span<const double>(&t[k][i], 1), std::span<const double>(&r[k], 1),
                               std::span<cplx>(&ref, 1));
                CHECK(std::abs(rows[k][i] - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
            }
        }
    }
    std::vector<std::vector<cplx>> rows;
    CHECK_THROWS_AS(u.eval_rows(r, {{0.0}}, rows), std::invalid_argument);
}

}  // TEST_SUITE
