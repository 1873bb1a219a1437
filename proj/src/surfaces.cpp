#include "parasharp/surfaces.hpp"

#include "parasharp/quadrature.hpp"
#include "parasharp/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace parasharp {

Surface Surface::elliptic(double eps) {
    if (!(eps >= 0.0) || eps > kEllipticEpsMax) {
        std::ostringstream os;
        os << "elliptic surface: eps must lie in [0, " << kEllipticEpsMax << "], got " << eps;
        throw std::invalid_argument(os.str());
    }
    return {SurfaceKind::Elliptic, eps};
}

double Surface::a(double s) const {
    switch (kind) {
        case SurfaceKind::Paraboloid: return s * s;
        case SurfaceKind::SphereLowerThird: return -std::sqrt(1.0 - s * s);
        case SurfaceKind::Elliptic: return s * s + eps * s * s * s * s;
    }
    return 0.0;
}

double Surface::da(double s) const {
    switch (kind) {
        case SurfaceKind::Paraboloid: return 2.0 * s;
        case SurfaceKind::SphereLowerThird: return s / std::sqrt(1.0 - s * s);
        case SurfaceKind::Elliptic: return 2.0 * s + 4.0 * eps * s * s * s;
    }
    return 0.0;
}

double Surface::d2a(double s) const {
    switch (kind) {
        case SurfaceKind::Paraboloid: return 2.0;
        case SurfaceKind::SphereLowerThird: return std::pow(1.0 - s * s, -1.5);
        case SurfaceKind::Elliptic: return 2.0 + 12.0 * eps * s * s;
    }
    return 0.0;
}

std::string Surface::name() const {
    switch (kind) {
        case SurfaceKind::Paraboloid: return "paraboloid";
        case SurfaceKind::SphereLowerThird: return "sphere";
        case SurfaceKind::Elliptic: return "elliptic";
    }
    return "?";
}

Surface surface_from_name(const std::string& name, double eps) {
    if (name == "paraboloid") return Surface::paraboloid();
    if (name == "sphere") return Surface::sphere_lower_third();
    if (name == "elliptic") return Surface::elliptic(eps);
    throw std::invalid_argument("unknown surface '" + name + "' (paraboloid, sphere, elliptic)");
}

double RadialDensity::amplitude(double s) const {
    if (profile) return profile(s);
    return beta == 0.0 ? 1.0 : std::pow(s, beta);
}

int RadialDensity::sign_at(double s) const {
    if (pieces.empty()) return 1;
    for (const Piece& p : pieces)
        if (s >= p.lo && s <= p.hi) return p.sign;
    return 0;
}

std::vector<double> RadialDensity::breakpoints() const {
    std::vector<double> b{s_lo, s_hi};
    for (const Piece& p : pieces) {
        b.push_back(p.lo);
        b.push_back(p.hi);
    }
    std::sort(b.begin(), b.end());
    std::vector<double> out;
    for (double x : b) {
        if (x < s_lo || x > s_hi) continue;
        if (out.empty() || x - out.back() > 1e-15 * std::max(1.0, x)) out.push_back(x);
    }
    return out;
}

void RadialDensity::validate() const {
    if (!(s_lo > 0.0) || !(s_hi > s_lo) || !std::isfinite(s_hi)) {
        std::ostringstream os;
        os << "density '" << label << "': support must satisfy 0 < s_lo < s_hi, got [" << s_lo << ", " << s_hi << "]";
        throw std::invalid_argument(os.str());
    }
    if (!std::isfinite(beta) || !std::isfinite(r0) || !std::isfinite(t0))
        throw std::invalid_argument("density '" + label + "': non-finite parameter");
    if (pieces.empty()) return;
    std::vector<Piece> sorted = pieces;
    std::sort(sorted.begin(), sorted.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    const double tol = 1e-12 * s_hi;
    if (std::fabs(sorted.front().lo - s_lo) > tol || std::fabs(sorted.back().hi - s_hi) > tol)
        throw std::invalid_argument("density '" + label + "': pieces must cover the support");
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (!(sorted[i].hi > sorted[i].lo)) throw std::invalid_argument("density '" + label + "': empty piece");
        if (sorted[i].sign != 1 && sorted[i].sign != -1)
            throw std::invalid_argument("density '" + label + "': piece sign must be +1 or -1");
        if (i > 0 && std::fabs(sorted[i].lo - sorted[i - 1].hi) > tol)
            throw std::invalid_argument("density '" + label + "': pieces must be disjoint and contiguous");
    }
}

RadialDensity indicator_density(double lo, double hi, double beta) {
    RadialDensity d;
    d.s_lo = lo;
    d.s_hi = hi;
    d.beta = beta;
    return d;
}

std::complex<double> density_eval(const RadialDensity& d, const Surface& surface, double s) {
    if (s < d.s_lo || s > d.s_hi) return {0.0, 0.0};
    const int sg = d.sign_at(s);
    if (sg == 0) return {0.0, 0.0};
    const double phase = -d.r0 * s + d.t0 * surface.a(s);
    return std::polar(sg * d.amplitude(s), phase);
}

double lp_surface_norm(const RadialDensity& d, double p, int n) {
    d.validate();
    if (std::isnan(p) || p < 1.0) throw std::invalid_argument("lp_surface_norm: p must lie in [1, inf]");
    if (std::isinf(p)) {
        if (!d.profile) return std::max(d.amplitude(d.s_lo), d.amplitude(d.s_hi));
        double m = 0.0;
        for (int k = 0; k <= 4096; ++k) m = std::max(m, std::fabs(d.amplitude(d.s_lo + (d.s_hi - d.s_lo) * k / 4096.0)));
        return m;
    }
    const double area = sphere_area(n);
    double integral = 0.0;
    if (!d.profile) {
        const double e = d.beta * p + n - 2.0;
        if (std::fabs(e + 1.0) < 1e-14)
            integral = std::log(d.s_hi / d.s_lo);
        else
            integral = (std::pow(d.s_hi, e + 1.0) - std::pow(d.s_lo, e + 1.0)) / (e + 1.0);
    } else {
        std::vector<double> x, w;
        append_composite(d.s_lo, d.s_hi, 64, 16, x, w);
        for (std::size_t i = 0; i < x.size(); ++i)
            integral += w[i] * std::pow(std::fabs(d.amplitude(x[i])), p) * std::pow(x[i], n - 2.0);
    }
    return std::pow(area * integral, 1.0 / p);
}

void check_surface_support(const Surface& surface, const RadialDensity& d) {
    if (surface.kind == SurfaceKind::SphereLowerThird && d.s_hi > Surface::kSphereSupportMax + 1e-15) {
        std::ostringstream os;
        os << "sphere surface: density support must lie in s <= 1/3, got s_hi = " << d.s_hi;
        throw std::invalid_argument(os.str());
    }
    if (surface.kind == SurfaceKind::Elliptic && surface.eps > Surface::kEllipticEpsMax)
        throw std::invalid_argument("elliptic surface: eps above the smallness threshold");
}

}  // namespace parasharp

namespace parasharp {

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::SmallR: return "SmallR";
        case Regime::MidR: return "MidR";
        case Regime::LargeR: return "LargeR";
    }
    return "?";
}

bool is_dyadic(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) return false;
    int e = 0;
    return std::frexp(x, &e) == 0.5;
}

namespace {
bool admissible(Regime g, double R, double M) {
    switch (g) {
        case Regime::SmallR: return R <= 1.0;
        case Regime::MidR: return R >= 2.0 && R * M <= 1.0;
        case Regime::LargeR: return R * M >= 1.0;
    }
    return false;
}
}  // namespace

DyadicRegime DyadicRegime::bilinear(double R, double M, Regime preferred) {
    DyadicRegime d{R, M, preferred};
    d.validate();
    return d;
}

DyadicRegime DyadicRegime::classify(double R, double M) {
    const Regime g = R * M >= 1.0 ? Regime::LargeR : (R >= 2.0 ? Regime::MidR : Regime::SmallR);
    return bilinear(R, M, g);
}

DyadicRegime DyadicRegime::linear(double R) {
    DyadicRegime d{R, 0.0, R <= 1.0 ? Regime::SmallR : Regime::LargeR};
    d.validate();
    return d;
}

void DyadicRegime::validate() const {
    if (!is_dyadic(R)) throw std::invalid_argument("regime: R must be a power of two");
    if (M == 0.0) {
        if (regime == Regime::MidR || (regime == Regime::SmallR) != (R <= 1.0))
            throw std::invalid_argument("regime: linear classification is SmallR for R <= 1, LargeR for R >= 2");
        return;
    }
    if (!is_dyadic(M) || M > 0.25) throw std::invalid_argument("regime: M must be a power of two in (0, 1/4]");
    if (!admissible(regime, R, M)) {
        std::ostringstream os;
        os << "regime: " << regime_name(regime) << " is inconsistent with R=" << R << ", M=" << M
           << " (SmallR needs R<=1, MidR needs 2<=R<=1/M, LargeR needs R>=1/M)";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace parasharp
