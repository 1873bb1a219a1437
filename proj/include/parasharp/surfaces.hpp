#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace parasharp {

enum class SurfaceKind { Paraboloid, SphereLowerThird, Elliptic };

/// Radial phase a(s) of a rotationally symmetric surface tau = a(|xi|).
struct Surface {
    SurfaceKind kind = SurfaceKind::Paraboloid;
    double eps = 0.0;  // Elliptic only; perturbation eps * s^4

    static constexpr double kEllipticEpsMax = 1.0 / 16.0;
    static constexpr double kSphereSupportMax = 1.0 / 3.0;

    static Surface paraboloid() { return {}; }
    static Surface sphere_lower_third() { return {SurfaceKind::SphereLowerThird, 0.0}; }
    static Surface elliptic(double eps);

    double a(double s) const;
    double da(double s) const;
    double d2a(double s) const;

    std::string name() const;
};

Surface surface_from_name(const std::string& name, double eps = 1.0 / 32.0);

enum class Regime { SmallR, MidR, LargeR };

std::string regime_name(Regime r);

/// Dyadic scales (R, M) with their classification. Linear examples carry M = 0 (unused).
struct DyadicRegime {
    double R = 1.0;
    double M = 0.0;
    Regime regime = Regime::SmallR;

    /// Bilinear: R <= 1 SmallR, 2 <= R <= 1/M MidR, R >= 1/M LargeR. At R = 1/M the
    /// caller's preferred regime wins when it is admissible.
    static DyadicRegime bilinear(double R, double M, Regime preferred);
    /// Bilinear classification with LargeR taking R = 1/M.
    static DyadicRegime classify(double R, double M);
    /// Linear: R <= 1 SmallR, R >= 2 LargeR.
    static DyadicRegime linear(double R);
    void validate() const;
};

bool is_dyadic(double x);

/// Signed sub-band of a density.
struct Piece {
    double lo = 0.0;
    double hi = 0.0;
    int sign = 1;
};

/// F(s) = s^beta e^{-i r0 s + i t0 a(s)} sign(s) on [s_lo, s_hi].
struct RadialDensity {
    double s_lo = 1.0;
    double s_hi = 2.0;
    double beta = 0.0;
    double r0 = 0.0;
    double t0 = 0.0;
    std::vector<Piece> pieces;
    std::string label;
    // Optional replacement for s^beta; not covered by the exponent machinery.
    std::function<double(double)> profile;

    double amplitude(double s) const;
    int sign_at(double s) const;
    /// Ordered breakpoints: support ends and piece boundaries.
    std::vector<double> breakpoints() const;
    void validate() const;
};

RadialDensity indicator_density(double lo, double hi, double beta = 0.0);

std::complex<double> density_eval(const RadialDensity& d, const Surface& surface, double s);

/// (area(S^{n-2}) int |F|^p s^{n-2} ds)^{1/p}; p = inf gives sup |F|.
double lp_surface_norm(const RadialDensity& d, double p, int n);

/// Rejects densities the surface cannot carry (sphere cap, elliptic eps).
void check_surface_support(const Surface& surface, const RadialDensity& d);

}  // namespace parasharp
