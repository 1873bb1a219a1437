#include "parasharp/extremals.hpp"

#include "parasharp/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace parasharp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Band {
    double lo = 1.0;     // base point of the [lo, 2 lo] band
    double scale = 1.0;  // lo relative to the paraboloid band [1, 2]
    double curv = 1.0;   // a(s) ~ const + curv s^2 near the band
};

Band band_for(const Surface& s) {
    switch (s.kind) {
        case SurfaceKind::Paraboloid: return {1.0, 1.0, 1.0};
        case SurfaceKind::Elliptic: return {1.0, 1.0, 1.0};
        case SurfaceKind::SphereLowerThird: return {0.125, 0.125, 0.5};
    }
    return {};
}

RadialDensity band_density(double lo, double hi, double beta, double r0, double t0, std::string label) {
    RadialDensity d = indicator_density(lo, hi, beta);
    d.r0 = r0;
    d.t0 = t0;
    d.label = std::move(label);
    return d;
}

// count equal signed pieces over [lo, lo + count * width]
RadialDensity piece_density(double lo, double width, long count, double beta, double r0, double t0, std::string label) {
    if (count < 1) throw std::invalid_argument("khintchine example: fewer than one piece");
    RadialDensity d = band_density(lo, lo + count * width, beta, r0, t0, std::move(label));
    d.pieces.reserve(static_cast<std::size_t>(count));
    for (long j = 0; j < count; ++j) d.pieces.push_back({lo + j * width, lo + (j + 1) * width, 1});
    d.pieces.back().hi = d.s_hi;
    return d;
}

AffineConstraint tau_range(double lo, double hi) { return {1.0, 0.0, lo, hi}; }
AffineConstraint rho_range(double lo, double hi) { return {0.0, 1.0, lo, hi}; }
// lo <= rho - slope tau <= hi
AffineConstraint tube(double slope, double lo, double hi) { return {-slope, 1.0, lo, hi}; }

// rho / tau in [s_lo, s_hi] (both slopes positive) for rho in [rho_lo, rho_hi] of one sign.
void add_cone(std::vector<AffineConstraint>& cs, double slope_lo, double slope_hi, double rho_lo, double rho_hi) {
    const double span = 4.0 * std::max(std::fabs(rho_lo), std::fabs(rho_hi)) * (1.0 + slope_hi / slope_lo);
    if (rho_hi <= 0.0) {
        cs.push_back(tube(slope_lo, -span, 0.0));
        cs.push_back(tube(slope_hi, 0.0, span));
    } else if (rho_lo >= 0.0) {
        cs.push_back(tube(slope_lo, 0.0, span));
        cs.push_back(tube(slope_hi, -span, 0.0));
    } else {
        throw std::invalid_argument("cone window: rho range straddles 0");
    }
}

// Exponents (R, M) of ||F||_p for F ~ s^beta on a band at scale s ~ M^{m_exp}, width ~ R^{wr} M^{wm}.
std::pair<double, double> norm_exponent(double p, int n, double beta, double m_exp, double wr, double wm) {
    const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
    return {wr * ip, m_exp * (beta + (n - 2) * ip) + wm * ip};
}

std::pair<double, double> add(std::pair<double, double> a, std::pair<double, double> b) {
    return {a.first + b.first, a.second + b.second};
}

void check_n(int n) {
    if (n < 3) throw std::invalid_argument("examples: n must be >= 3");
}

// |prod of fields| at the window center.
double center_modulus(const ExtremalCase& c) {
    const auto poly = c.window.polygon();
    double tc = 0.0, rc = 0.0;
    for (const auto& v : poly) {
        tc += v.first;
        rc += v.second;
    }
    tc = c.window.t0 + tc / poly.size();
    rc = c.window.r0 + rc / poly.size();
    double out = 1.0;
    for (const RadialDensity& d : c.densities) out *= std::abs(ExtensionField(d, c.surface, c.n)(tc, rc));
    return out;
}

// Scan r0 -> r0 + delta over [0, span) for the chirped densities; keeps the best.
void align_r0(ExtremalCase& c, double start, double span) {
    const double base = c.window.r0;
    const double step = 1.0 / 16;
    const long count = std::max(1L, static_cast<long>(std::ceil(span / step)));
    auto shifted = [&](double delta) {
        ExtremalCase k = c;
        k.window.r0 = start + delta;
        for (RadialDensity& d : k.densities)
            if (d.r0 == base) d.r0 = start + delta;
        return k;
    };
    double best = -1.0, best_delta = 0.0;
    for (long i = 0; i < count; ++i) {
        const double delta = i * step;
        const double v = center_modulus(shifted(delta));
        if (v > best) {
            best = v;
            best_delta = delta;
        }
    }
    c = shifted(best_delta);
}

}  // namespace

void ExtremalCase::validate() const {
    regime.validate();
    const bool lin = kind == ExampleKind::Linear;
    static const char* labels[] = {"I", "II", "III", "IV", "V"};
    const auto end = lin ? labels + 3 : labels + 5;
    if (std::find(labels, end, region_label) == end) throw std::invalid_argument("ExtremalCase: bad region label");
    if (densities.size() != (lin ? 1u : 2u)) throw std::invalid_argument("ExtremalCase: wrong number of densities");
    const Band b = band_for(surface);
    const double tol = 1e-12;
    auto inside = [&](const RadialDensity& d, double lo, double hi) {
        d.validate();
        check_surface_support(surface, d);
        if (d.s_lo < lo * (1 - tol) || d.s_hi > hi * (1 + tol))
            throw std::invalid_argument("ExtremalCase: density support leaves its dyadic band");
    };
    inside(densities[0], b.lo, 2 * b.lo);
    if (!lin) inside(densities[1], regime.M, 2 * regime.M);
    window.validate();
    if (uses_khintchine && sign_draws < 8) throw std::invalid_argument("ExtremalCase: Khintchine case needs >= 8 draws");
}

ExtremalCase build_linear_example(const std::string& region, double R, int n, const ExampleOptions& opt) {
    check_n(n);
    const DyadicRegime reg = DyadicRegime::linear(R);
    if (region != "I" && region != "II" && region != "III")
        throw std::invalid_argument("build_linear_example: region must be I, II or III");
    const bool small = reg.regime == Regime::SmallR;
    if (small && region != "I")
        throw std::invalid_argument("build_linear_example: regions II and III need R >= 2 (large-R examples only)");

    ExtremalCase c;
    c.kind = ExampleKind::Linear;
    c.regime = reg;
    c.region_label = region;
    c.surface = opt.surface;
    c.n = n;
    const Band b = band_for(opt.surface);
    // paraboloid-equivalent annulus and unit conversions (time ~ 1/(curv scale^2), space ~ 1/scale)
    const double Rp = R * b.scale;
    const double tu = 1.0 / (b.curv * b.scale * b.scale);
    const double xu = 1.0 / b.scale;
    const double beta = -(n - 2) / 2.0;
    const double r0 = std::isnan(opt.r0) ? (small ? 0.0 : 0.75 * R) : opt.r0;
    const double t0 = opt.t0;
    c.window.t0 = t0;
    c.window.r0 = r0;
    auto& cs = c.window.constraints;
    double default_q = 2.0, default_p = 2.0;
    std::pair<double, double> norm_exp{0.0, 0.0};

    if (small) {
        c.id = "linear-small-I";
        c.densities.push_back(band_density(b.lo, 2 * b.lo, -(n - 2.0), r0, t0, "f"));
        cs.push_back(rho_range(R / 100 - r0, R / 50 - r0));
        cs.push_back(tau_range(-tu / 100, tu / 100));
    } else if (region == "I") {
        c.id = "linear-I";
        const double w = b.scale / std::sqrt(Rp);
        c.densities.push_back(band_density(b.lo, b.lo + w, beta, r0, t0, "f"));
        cs.push_back(tau_range(Rp / 100 * tu, Rp / 50 * tu));
        cs.push_back(tube(opt.surface.da(b.lo), -std::sqrt(Rp) / 100 * xu, std::sqrt(Rp) / 100 * xu));
        norm_exp = {-0.5, 0.0};  // width R^{-1/2}
    } else if (region == "II") {
        c.id = "linear-II";
        c.densities.push_back(band_density(b.lo, 2 * b.lo, beta, r0, t0, "f"));
        const double rho_lo = R / 100 - r0, rho_hi = R / 50 - r0;
        cs.push_back(rho_range(rho_lo, rho_hi));
        add_cone(cs, opt.surface.da(b.lo), opt.surface.da(2 * b.lo), rho_lo, rho_hi);
    } else {
        c.id = "linear-III";
        c.densities.push_back(band_density(b.lo, 2 * b.lo, beta, r0, t0, "f"));
        default_q = kInf;
        default_p = kInf;
        const double q = opt.q > 0 ? opt.q : default_q;
        if (std::isinf(q)) {
            cs.push_back(tau_range(-tu / 4, tu / 4));
            cs.push_back(rho_range(-xu / 4, xu / 4));
        } else {
            cs.push_back(tau_range(2 * tu, 4 * tu));
            cs.push_back(rho_range(2 * xu, 4 * xu));
        }
    }
    c.q = opt.q > 0 ? opt.q : default_q;
    c.p = opt.p > 0 ? opt.p : default_p;
    if (region == "III" && !(opt.p > 0) && !std::isinf(c.q)) {
        // q = 4 line is stated for p >= 4; q = 3p' picks p from q
        c.p = c.q <= 4.0 ? 4.0 : 1.0 / (1.0 - 3.0 / c.q);
    }
    c.expected_lower_exponent = theoretical_exponent(Theorem::Linear, c.q, c.p, n, reg.regime);
    const double ip = std::isinf(c.p) ? 0.0 : 1.0 / c.p;
    c.raw_lower_exponent = {c.expected_lower_exponent.first + norm_exp.first * ip, 0.0};
    c.validate();
    return c;
}

ExtremalCase build_bilinear_example(Regime regime, const std::string& region, double R, double M, int n,
                                    const ExampleOptions& opt) {
    check_n(n);
    const DyadicRegime reg = DyadicRegime::bilinear(R, M, regime);
    static const char* labels[] = {"I", "II", "III", "IV", "V"};
    if (std::find(std::begin(labels), std::end(labels), region) == std::end(labels))
        throw std::invalid_argument("build_bilinear_example: region must be I..V");
    if (opt.surface.kind != SurfaceKind::Paraboloid)
        throw std::invalid_argument("build_bilinear_example: examples are built on the paraboloid");

    ExtremalCase c;
    c.kind = ExampleKind::Bilinear;
    c.regime = reg;
    c.region_label = region;
    c.surface = opt.surface;
    c.n = n;
    c.id = "bilinear-" + regime_name(regime) + "-" + region;
    const double half_n = (n - 2) / 2.0;
    const bool small = regime == Regime::SmallR;
    const double r0 = std::isnan(opt.r0) ? (small ? 0.0 : 0.75 * R) : opt.r0;
    const double t0 = opt.t0;
    c.window.t0 = t0;
    c.window.r0 = r0;
    auto& cs = c.window.constraints;
    auto& ds = c.densities;
    // default lines per region
    double dq = 2.0, dp = 2.0;
    if (region == "I") dq = 1.0;
    if (region == "II") {
        dq = 1.0;
        dp = kInf;
    }
    if (region == "V") {
        dq = kInf;
        dp = kInf;
    }
    if (small && region == "IV") dq = 4.0, dp = 4.0;
    c.q = opt.q > 0 ? opt.q : dq;
    c.p = opt.p > 0 ? opt.p : dp;
    // norm exponents (R, M) of f and g in the order (beta, band scale exponent, width exponents)
    std::pair<double, double> nf{0, 0}, ng{0, 0};

    if (regime == Regime::LargeR) {
        const double beta = -half_n;
        if (region == "I" || region == "II") {
            if (region == "I") {
                ds.push_back(band_density(1.0, 1.0 + M / R, beta, r0, t0, "f"));
                ds.push_back(band_density(M, M + 1.0 / R, beta, r0, t0, "g"));
                nf = norm_exponent(c.p, n, beta, 0, -1, 1);
                ng = norm_exponent(c.p, n, beta, 1, -1, 0);
            } else {
                const long J = static_cast<long>(std::floor(R / M));
                const long K = static_cast<long>(std::floor(R * M));
                ds.push_back(piece_density(1.0, M / R, J, beta, r0, t0, "f"));
                ds.push_back(piece_density(M, 1.0 / R, K, beta, r0, t0, "g"));
                nf = norm_exponent(c.p, n, beta, 0, 0, 0);
                ng = norm_exponent(c.p, n, beta, 1, 0, 1);
            }
            cs.push_back(rho_range(R / 100, R / 50));
            cs.push_back(tau_range(R / M / 100, R / M / 50));
        } else if (region == "III") {
            ds.push_back(band_density(1.0, 2.0, beta, r0, t0, "f"));
            ds.push_back(band_density(M, 2 * M, beta, r0, t0, "g"));
            const double rho_lo = 1.0 / M / 100, rho_hi = 1.0 / M / 50;
            cs.push_back(rho_range(rho_lo, rho_hi));
            add_cone(cs, 2.0, 4.0, rho_lo, rho_hi);
            nf = norm_exponent(c.p, n, beta, 0, 0, 0);
            ng = norm_exponent(c.p, n, beta, 1, 0, 1);
        } else if (region == "IV") {
            ds.push_back(band_density(1.0, 1.0 + std::sqrt(M), beta, r0, t0, "f"));
            ds.push_back(band_density(M, 2 * M, beta, r0, t0, "g"));
            cs.push_back(tube(2.0, -1.0 / std::sqrt(M), 1.0 / std::sqrt(M)));
            cs.push_back(tube(2.0 * M, -1.0 / M, 1.0 / M));
            cs.push_back(tau_range(1.0 / M / 100, 1.0 / M / 50));
            nf = norm_exponent(c.p, n, beta, 0, 0, 0.5);
            ng = norm_exponent(c.p, n, beta, 1, 0, 1);
        } else {
            ds.push_back(band_density(1.0, 2.0, beta, r0, t0, "f"));
            ds.push_back(band_density(M, 2 * M, beta, r0, t0, "g"));
            nf = norm_exponent(c.p, n, beta, 0, 0, 0);
            ng = norm_exponent(c.p, n, beta, 1, 0, 1);
        }
    } else if (regime == Regime::MidR) {
        const double beta = -half_n;
        // g carries only the time chirp
        ds.push_back(RadialDensity{});
        ds.push_back(band_density(M, 2 * M, -(n - 2.0), 0.0, t0, "g"));
        ng = norm_exponent(c.p, n, -(n - 2.0), 1, 0, 1);
        if (region == "I" || region == "II") {
            if (region == "I") {
                ds[0] = band_density(1.0, 1.0 + M * M, beta, r0, t0, "f");
                nf = norm_exponent(c.p, n, beta, 0, 0, 2);
            } else {
                const long J = static_cast<long>(std::floor(1.0 / (M * M)));
                ds[0] = piece_density(1.0, M * M, J, beta, r0, t0, "f");
            }
            cs.push_back(rho_range(R / 100, R / 50));
            cs.push_back(tau_range(1.0 / (M * M) / 100, 1.0 / (M * M) / 50));
        } else if (region == "III") {
            ds[0] = band_density(1.0, 2.0, beta, r0, t0, "f");
            const double rho_lo = R / 100 - r0, rho_hi = R / 50 - r0;
            cs.push_back(rho_range(rho_lo, rho_hi));
            add_cone(cs, 2.0, 4.0, rho_lo, rho_hi);
        } else if (region == "IV") {
            ds[0] = band_density(1.0, 1.0 + 1.0 / std::sqrt(R), beta, r0, t0, "f");
            nf = norm_exponent(c.p, n, beta, 0, -0.5, 0);
            // time range R/100..R/50 as in the linear tube example; the printed R^{1/2} range has area ~ R
            cs.push_back(tube(2.0, -std::sqrt(R) / 100, std::sqrt(R) / 100));
            cs.push_back(tau_range(R / 100, R / 50));
        } else {
            ds[0] = band_density(1.0, 2.0, beta, r0, t0, "f");
        }
    } else {
        const double beta = -(n - 2.0);
        if (region == "I") {
            ds.push_back(band_density(1.0, 1.0 + M * M, beta, r0, t0, "f"));
            nf = norm_exponent(c.p, n, beta, 0, 0, 2);
        } else if (region == "II") {
            const long J = static_cast<long>(std::floor(1.0 / (M * M)));
            ds.push_back(piece_density(1.0, M * M, J, beta, r0, t0, "f"));
        } else {
            ds.push_back(band_density(1.0, 2.0, beta, r0, t0, "f"));
        }
        ds.push_back(band_density(M, 2 * M, beta, r0, t0, "g"));
        ng = norm_exponent(c.p, n, beta, 1, 0, 1);
        cs.push_back(rho_range(R / 2 - r0, R - r0));
        if (region == "I") cs.push_back(tau_range(1.0 / (100 * M * M), 1.0 / (50 * M * M)));
        else cs.push_back(tau_range(0.5, 1.0));
    }
    if (cs.empty()) {
        // region V: sup at the focus, or the fixed box for finite q
        if (std::isinf(c.q)) {
            cs.push_back(tau_range(-0.25, 0.25));
            cs.push_back(rho_range(-0.25, 0.25));
        } else {
            cs.push_back(tau_range(2.0, 4.0));
            cs.push_back(rho_range(2.0, 4.0));
        }
    }
    for (const RadialDensity& d : ds)
        if (!d.pieces.empty()) c.uses_khintchine = true;
    if (opt.align_r0 && std::isnan(opt.r0) && !small && (region == "I" || region == "IV")) {
        const double pi = 3.14159265358979323846;
        // r0 ranges over [R/2, R] less the window's own r-extent
        double rho_max = 0.0;
        for (const auto& v : c.window.polygon()) rho_max = std::max(rho_max, v.second);
        const double span = std::min(R / 2 - rho_max, regime == Regime::LargeR ? pi / M + pi : pi);
        align_r0(c, R / 2, span);
    }
    if (c.uses_khintchine) c.sign_draws = 64;
    c.expected_lower_exponent = theoretical_exponent(Theorem::Bilinear, c.q, c.p, n, regime);
    c.raw_lower_exponent = add(c.expected_lower_exponent, add(nf, ng));
    c.validate();
    return c;
}

double case_probe(const ExtremalCase& c, const GridSpec& grid) {
    const ExtensionField u(c.densities[0], c.surface, c.n);
    if (c.densities.size() == 1) return probe_lower_bound(u, c.q, c.window, c.n, grid);
    const ExtensionField v(c.densities[1], c.surface, c.n);
    return probe_lower_bound(u, v, c.q, c.window, c.n, grid);
}

double case_norm_product(const ExtremalCase& c) {
    double out = 1.0;
    for (const RadialDensity& d : c.densities) out *= lp_surface_norm(d, c.p, c.n);
    return out;
}

std::vector<int> draw_signs(std::uint64_t seed, std::uint64_t draw, std::size_t count) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
    std::mt19937_64 gen(seq);
    std::vector<int> out(count);
    for (auto& s : out) s = (gen() >> 63) ? 1 : -1;
    return out;
}

KhintchineResult khintchine_lower_bound(const ExtremalCase& c, int draws, std::uint64_t seed, const GridSpec& grid) {
    if (draws < 8) throw std::invalid_argument("khintchine_lower_bound: draws must be >= 8");
    std::size_t total = 0;
    for (const RadialDensity& d : c.densities) total += d.pieces.size();
    if (total == 0) throw std::invalid_argument("khintchine_lower_bound: case has no sign pieces");
    KhintchineResult res;
    res.values.reserve(static_cast<std::size_t>(draws));
    for (int k = 0; k < draws; ++k) {
        const std::vector<int> signs = draw_signs(seed, static_cast<std::uint64_t>(k), total);
        ExtremalCase drawn = c;
        std::size_t idx = 0;
        for (RadialDensity& d : drawn.densities)
            for (Piece& pc : d.pieces) pc.sign = signs[idx++];
        res.values.push_back(case_probe(drawn, grid));
    }
    double s = 0.0;
    for (double v : res.values) s += v;
    res.mean = s / draws;
    double var = 0.0;
    for (double v : res.values) var += (v - res.mean) * (v - res.mean);
    var /= (draws - 1);
    res.standard_error = std::sqrt(var / draws);
    return res;
}

std::pair<double, double> branch_moduli_at_center(const ExtremalCase& c, std::size_t which) {
    if (which >= c.densities.size()) throw std::out_of_range("branch_moduli_at_center: no such density");
    const auto poly = c.window.polygon();
    double tc = 0.0, rc = 0.0;
    for (const auto& v : poly) {
        tc += v.first;
        rc += v.second;
    }
    tc = c.window.t0 + tc / poly.size();
    rc = c.window.r0 + rc / poly.size();
    const auto br = main_term_branches(c.densities[which], c.n, tc, rc);
    return {std::abs(br.first), std::abs(br.second)};
}

}  // namespace parasharp
