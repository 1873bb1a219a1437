#include <doctest.h>

#include "parasharp/norms.hpp"
#include "parasharp/quadrature.hpp"
#include "parasharp/specialfn.hpp"

#include <cmath>
#include <limits>

using namespace parasharp;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
const Surface kPar = Surface::paraboloid();

ProbeWindow box_window(double t0, double r0, double tlo, double thi, double rlo, double rhi) {
    ProbeWindow w;
    w.t0 = t0;
    w.r0 = r0;
    w.constraints = {{1, 0, tlo, thi}, {0, 1, rlo, rhi}};
    return w;
}
}  // namespace

TEST_SUITE("norms") {

TEST_CASE("constant field closed form") {
    const FunctionField one([](double, double) { return cplx(1, 0); }, 0.0, 0.0);
    for (double T : {1.0, 5.0}) {
        GridSpec g;
        g.t_center = T / 2;
        g.t_halfwidth = T / 2;
        g.tail_doublings = 0;
        const NormResult res = lq_annulus_norm(one, 2.0, 2.0, 3, g);
        CHECK(res.value == doctest::Approx(std::sqrt(2 * kPi * T * 3 / 2)).epsilon(1e-12));
        CHECK_FALSE(res.converged);
        const NormResult bi = bilinear_product_norm(one, one, 2.0, 2.0, 3, g);
        CHECK(bi.value == doctest::Approx(res.value).epsilon(1e-12));
        CHECK(lq_annulus_norm(one, kInf, 2.0, 3, g).value == doctest::Approx(1.0));
    }
    GridSpec bad;
    bad.t_points = 8;
    CHECK_THROWS_AS(lq_annulus_norm(one, 2.0, 2.0, 3, bad), std::invalid_argument);
    CHECK_THROWS_AS(lq_annulus_norm(one, 0.5, 2.0, 3, GridSpec{}), std::invalid_argument);
}

TEST_CASE("time Plancherel identity at fixed r") {
    RadialDensity d = indicator_density(1.0, 2.0, -0.5);
    d.r0 = 3.0;
    const ExtensionField u(d, kPar, 3);
    const double r = 6.0;
    GridSpec g;
    g.t_halfwidth = 400.0;
    g.tail_doublings = 0;
    std::vector<double> tx, tw;
    append_composite(-3000.0, 3000.0, 3000, 8, tx, tw);
    std::vector<cplx> vals(tx.size());
    u.eval_grid(tx, std::span<const double>(&r, 1), vals);
    double direct = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) direct += tw[i] * std::norm(vals[i]);
    CHECK(direct == doctest::Approx(time_l2_squared(u, r)).epsilon(2e-3));
}

TEST_CASE("annulus q=2 converges to the Plancherel value") {
    const RadialDensity d = indicator_density(1.0, 2.0);
    const ExtensionField u(d, kPar, 3);
    for (double R : {4.0, 16.0}) {
        GridSpec g;
        const NormResult res = lq_annulus_norm(u, 2.0, R, 3, g);
        const double ref = annulus_l2_plancherel(u, R / 2, R);
        MESSAGE("R=" << R << " grid=" << res.value << " plancherel=" << ref << " doublings=" << res.doublings);
        CHECK(res.converged);
        CHECK(res.tail_estimate <= g.tail_fraction * res.value);
        CHECK(std::fabs(res.value - ref) <= 0.03 * ref);
    }
}

TEST_CASE("grid refinement stability") {
    RadialDensity d = indicator_density(1.0, 2.0, -0.5);
    d.r0 = 12.0;
    const ExtensionField u(d, kPar, 3);
    GridSpec g;
    g.t_center = 0.0;
    GridSpec fine = g;
    fine.t_points *= 2;
    fine.r_points *= 2;
    fine.resolution /= 2;
    for (double q : {2.0, 4.0, kInf}) {
        const NormResult a = lq_annulus_norm(u, q, 16.0, 3, g);
        const NormResult b = lq_annulus_norm(u, q, 16.0, 3, fine);
        CHECK(a.converged);
        CHECK(b.converged);
        CHECK(std::fabs(a.value - b.value) <= 3 * g.tail_fraction * b.value);
    }
}

TEST_CASE("Example-III sup at its probe") {
    for (int n : {3, 4}) {
        for (double R : {8.0, 32.0}) {
            RadialDensity d = indicator_density(1.0, 2.0, -(n - 2) / 2.0);
            d.r0 = 0.75 * R;
            const ExtensionField u(d, kPar, n);
            const ProbeWindow w = box_window(0.0, d.r0, -0.5, 0.5, -0.5, 0.5);
            const double sup = probe_lower_bound(u, kInf, w, n);
            CHECK(sup >= 0.5 * std::pow(R, -(n - 2) / 2.0));
            GridSpec g;
            g.tail_doublings = 1;
            CHECK(lq_annulus_norm(u, kInf, R, n, g).value >= sup * (1 - 1e-9));
        }
    }
}

TEST_CASE("probe windows") {
    const FunctionField one([](double, double) { return cplx(1, 0); }, 0.0, 0.0);
    // zero measure
    CHECK(probe_lower_bound(one, 2.0, box_window(0, 5, 0, 0, 0, 1), 3) == 0.0);
    ProbeWindow empty = box_window(0, 5, 1, 2, 0, 1);
    empty.constraints.push_back({1, 0, 3, 4});
    CHECK_THROWS_AS(probe_lower_bound(one, 2.0, empty, 3), std::invalid_argument);
    ProbeWindow open;
    open.constraints = {{1, 0, 0, 1}};
    CHECK_THROWS_AS(open.validate(), std::invalid_argument);
    // box: area * int_4^6 r dr * 2 = 2 pi * 10 * 2
    CHECK(probe_lower_bound(one, 1.0, box_window(0, 5, -1, 1, -1, 1), 3) == doctest::Approx(40 * kPi).epsilon(1e-12));
    // parallelogram |rho - 2 tau| <= 1, 0 <= tau <= 1, q=1, n=4: area 2pi... integrate r^2 over the slanted strip
    ProbeWindow par;
    par.t0 = 0;
    par.r0 = 10;
    par.constraints = {{1, 0, 0, 1}, {-2, 1, -1, 1}};
    CHECK(par.area() == doctest::Approx(2.0));
    // int_0^1 int_{2t-1}^{2t+1} (10+rho)^2 drho dt
    double ref = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double t = (i + 0.5) / 20000;
        ref += (std::pow(11 + 2 * t, 3) - std::pow(9 + 2 * t, 3)) / 3 / 20000;
    }
    CHECK(probe_lower_bound(one, 1.0, par, 4) == doctest::Approx(4 * kPi * ref).epsilon(1e-8));
}

TEST_CASE("probe never exceeds the annulus norm") {
    RadialDensity d = indicator_density(1.0, 2.0, -0.5);
    d.r0 = 12.0;
    const ExtensionField u(d, kPar, 3);
    GridSpec g;
    for (double q : {1.0, 2.0, 4.0}) {
        const double probe = probe_lower_bound(u, q, box_window(0, 12, 0, 6, -4, 4), 3);
        const NormResult full = lq_annulus_norm(u, q, 16.0, 3, g);
        CHECK(probe <= full.value * 1.001);
    }
}

TEST_CASE("bilinear LargeR pair converges and obeys Cauchy-Schwarz") {
    const double M = 0.25, R = 16.0;
    const ExtensionField u(indicator_density(1.0, 2.0), kPar, 3);
    const ExtensionField v(indicator_density(M, 2 * M), kPar, 3);
    GridSpec g;
    g.t_halfwidth = 8 * R / M;
    const NormResult p2 = bilinear_product_norm(u, v, 2.0, R, 3, g);
    const NormResult p1 = bilinear_product_norm(u, v, 1.0, R, 3, g);
    const NormResult u2 = lq_annulus_norm(u, 2.0, R, 3, g);
    const NormResult v2 = lq_annulus_norm(v, 2.0, R, 3, g);
    MESSAGE("q=2 " << p2.value << " conv " << p2.converged << "; q=1 " << p1.value << " conv " << p1.converged);
    CHECK(p2.converged);
    CHECK(p1.converged);
    CHECK(std::isfinite(p2.value));
    CHECK(p1.value <= u2.value * v2.value * 1.001);
}

}  // TEST_SUITE
