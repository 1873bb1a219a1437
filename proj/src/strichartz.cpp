#include "parasharp/strichartz.hpp"

#include "parasharp/quadrature.hpp"
#include "parasharp/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace parasharp {

namespace {

constexpr double kPi = std::numbers::pi;
// successive term ratios this close mark the geometric regime
constexpr double kRatioStability = 0.02;

template <class T>
T frac(std::int64_t a, std::int64_t b) {
    if constexpr (std::is_same_v<T, double>) {
        return static_cast<double>(a) / static_cast<double>(b);
    } else {
        return Rational(a, b);
    }
}

// branch exponents as functions of y = 1/q
template <class T>
ExponentPair<T> branch_exponents(T y, int n, StrichartzBranch b) {
    const std::int64_t m = n;
    switch (b) {
        case StrichartzBranch::Low:
            return {frac<T>(-1, 2), frac<T>(2 * m - 1, 2) - frac<T>(m + 1, 1) * y};
        case StrichartzBranch::Mid:
            return {frac<T>(-3, 2) * y + frac<T>(1, 4), frac<T>(4 * m - 5, 4) - frac<T>(2 * m - 1, 2) * y};
        case StrichartzBranch::High:
            return {frac<T>(m - 1, 2) - frac<T>(m + 1, 1) * y, frac<T>(m - 1, 2)};
    }
    throw std::logic_error("unknown branch");
}

void check_n(int n, const char* who) {
    if (n < 3) throw std::invalid_argument(std::string(who) + ": n must be >= 3");
}

ExtensionField evolution(const FrequencyBand& b, int n) {
    return ExtensionField(b.spectrum, Surface::paraboloid(), n, QuadratureSpec{}, -1);
}

GridSpec annulus_grid(const StrichartzGrid& sg, double R, double M) {
    GridSpec g;
    // the wave crosses r ~ R around t ~ R / M; dispersion near the origin lasts ~ 1 / M^2
    g.t_halfwidth = R / M + 4.0 / (M * M);
    g.tail_doublings = sg.tail_doublings;
    g.tail_fraction = sg.tail_fraction;
    g.resolution = sg.resolution;
    return g;
}

}  // namespace

void FrequencyBand::validate() const {
    if (!is_dyadic(M)) throw std::invalid_argument("FrequencyBand: M must be dyadic");
    spectrum.validate();
    const double tol = 1e-12 * M;
    if (spectrum.s_lo < M - tol || spectrum.s_hi > 2 * M + tol)
        throw std::invalid_argument("FrequencyBand: spectrum must lie in [M, 2M]");
}

FrequencyBand smooth_band(double M, double beta) {
    FrequencyBand b;
    b.M = M;
    b.spectrum = indicator_density(M, 2 * M, 0.0);
    b.spectrum.profile = [M, beta](double s) {
        const double v = std::sin(kPi * (s - M) / M);
        return std::pow(s, beta) * v * v;
    };
    b.spectrum.label = "smooth-band";
    b.validate();
    return b;
}

double data_l2_norm(const FrequencyBand& band, int n) {
    return std::pow(2 * kPi, (n - 1) / 2.0) * lp_surface_norm(band.spectrum, 2.0, n);
}

double evolved_mass(const FrequencyBand& band, int n, double t, double r_max) {
    check_n(n, "evolved_mass");
    band.validate();
    const double M = band.M;
    if (!(r_max > 0.0)) r_max = 4 * M * std::fabs(t) + 64.0 / M;
    const ExtensionField u = evolution(band, n);
    std::vector<double> rx, rw;
    // |u|^2 oscillates at most at r-frequency 4M
    append_composite(0.0, r_max, std::max(1, static_cast<int>(std::ceil(r_max * 4 * M / 2.0))), 8, rx, rw);
    std::vector<cplx> vals(rx.size());
    const std::vector<double> tt{t};
    u.eval_grid(tt, rx, vals);
    std::vector<double> terms(rx.size());
    for (std::size_t k = 0; k < rx.size(); ++k) terms[k] = rw[k] * std::norm(vals[k]) * std::pow(rx[k], n - 2.0);
    return std::sqrt(sphere_area(n) * pairwise_sum(terms));
}

DyadicSum dyadic_annulus_sum(const std::function<double(int k)>& term, int max_down, int max_up, double rel_tol,
                             int min_down, int min_up) {
    if (max_down < 1 || max_up < 1) throw std::invalid_argument("dyadic_annulus_sum: need at least one step each way");
    std::map<int, double> got;
    got[0] = term(0);
    double running = got[0];
    bool ok_up = false, ok_down = false;
    DyadicSum out;
    auto side = [&](int dir, int steps, int min_steps, double& tail, bool& ok) {
        double prev_rho = -1.0;
        for (int i = 1; i <= steps; ++i) {
            const int k = dir * i;
            const double v = term(k), prev = got[k - dir];
            got[k] = v;
            running += v;
            if (v == 0.0) {
                ok = true;
                return;
            }
            const double rho = v / prev;
            if (i >= min_steps && rho < 1.0) {
                const double t = v * rho / (1.0 - rho);
                const bool stable = prev_rho > 0.0 && std::fabs(rho - prev_rho) <= kRatioStability * rho;
                if (t <= rel_tol * running || stable) {
                    tail = t;
                    ok = true;
                    return;
                }
            }
            prev_rho = rho;
        }
    };
    side(-1, max_down, min_down, out.tail_low, ok_down);
    side(1, max_up, min_up, out.tail_high, ok_up);
    out.k_min = got.begin()->first;
    out.k_max = got.rbegin()->first;
    for (const auto& [k, v] : got) out.terms.push_back(v);
    // increasing |k|, low side first at equal |k|
    std::vector<double> ordered{got[0]};
    for (int a = 1; a <= std::max(-out.k_min, out.k_max); ++a) {
        if (got.count(-a)) ordered.push_back(got[-a]);
        if (got.count(a)) ordered.push_back(got[a]);
    }
    double s = 0.0;
    for (double v : ordered) s += v;
    out.total = s + out.tail_low + out.tail_high;
    out.converged = ok_up && ok_down;
    return out;
}

double linear_strichartz_exponent(double q, int n) { return (n - 1) / 2.0 - (n + 1) / q; }

StrichartzResult linear_strichartz_ratio(const FrequencyBand& band, double q, int n, const StrichartzGrid& grid) {
    check_n(n, "linear_strichartz_ratio");
    band.validate();
    const double crit = (4.0 * n - 2) / (2.0 * n - 3);
    if (!(q > crit) || std::isinf(q))
        throw std::domain_error("linear_strichartz_ratio: q must exceed (4n-2)/(2n-3) and be finite");
    const double data = data_l2_norm(band, n);
    if (!(data > 0.0)) throw std::domain_error("linear_strichartz_ratio: zero initial datum");
    const ExtensionField u = evolution(band, n);
    const double M = band.M;
    bool all_conv = true;
    StrichartzResult res;
    res.sum = dyadic_annulus_sum(
        [&](int k) {
            const double R = std::ldexp(1.0, k) / M;
            const NormResult r = lq_annulus_norm(u, q, R, n, annulus_grid(grid, R, M));
            all_conv = all_conv && r.converged;
            return std::pow(r.value, q);
        },
        grid.max_down, grid.max_up, grid.rel_tol, grid.min_steps, grid.min_steps);
    res.norm = std::pow(res.sum.total, 1.0 / q);
    res.factor = std::pow(M, linear_strichartz_exponent(q, n)) * data;
    res.ratio = res.norm / res.factor;
    res.converged = all_conv && res.sum.converged;
    return res;
}

StrichartzResult weighted_local_ratio(const FrequencyBand& band, double eps, int n, StrichartzGrid grid) {
    check_n(n, "weighted_local_ratio");
    band.validate();
    if (!(eps > 0.0) || !(eps < n - 2.0)) throw std::domain_error("weighted_local_ratio: eps must lie in (0, n-2)");
    const double data = data_l2_norm(band, n);
    if (!(data > 0.0)) throw std::domain_error("weighted_local_ratio: zero initial datum");
    const ExtensionField u = evolution(band, n);
    const double M = band.M;
    StrichartzResult res;
    res.sum = dyadic_annulus_sum(
        [&](int k) {
            const double R = std::ldexp(1.0, k) / M;
            const double v = annulus_l2_plancherel(u, R / 2, R, -(1.0 + eps));
            return v * v;
        },
        grid.max_down, grid.max_up, grid.rel_tol, grid.min_steps, grid.min_steps);
    res.norm = std::sqrt(res.sum.total);
    res.factor = std::pow(M, -(1.0 - eps) / 2.0) * data;
    res.ratio = res.norm / res.factor;
    res.converged = res.sum.converged;
    return res;
}

ExponentPair<Rational> bilinear_strichartz_exponents(Rational inv_q, int n, StrichartzBranch b) {
    check_n(n, "bilinear_strichartz_exponents");
    const std::int64_t m = n;
    const Rational half(1, 2), lo_edge(m - 1, m), mid_edge(2 * m - 3, 2 * (2 * m - 1));
    bool ok = false;
    switch (b) {
        case StrichartzBranch::Low: ok = half <= inv_q && inv_q < lo_edge; break;
        case StrichartzBranch::Mid: ok = mid_edge <= inv_q && inv_q <= half; break;
        case StrichartzBranch::High: ok = Rational(0) <= inv_q && inv_q <= mid_edge; break;
    }
    if (!ok) {
        std::ostringstream os;
        os << "bilinear_strichartz_exponents: 1/q = " << inv_q << " outside the branch interval";
        throw std::domain_error(os.str());
    }
    return branch_exponents<Rational>(inv_q, n, b);
}

StrichartzBranch bilinear_strichartz_branch(double q, int n) {
    check_n(n, "bilinear_strichartz_branch");
    if (!(q > n / (n - 1.0))) throw std::domain_error("bilinear_strichartz_branch: q must exceed n/(n-1)");
    if (q <= 2.0) return StrichartzBranch::Low;
    if (q <= 2.0 * (2 * n - 1) / (2 * n - 3)) return StrichartzBranch::Mid;
    return StrichartzBranch::High;
}

std::pair<double, double> bilinear_strichartz_exponents(double q, int n) {
    const StrichartzBranch b = bilinear_strichartz_branch(q, n);
    const auto e = branch_exponents<double>(std::isinf(q) ? 0.0 : 1.0 / q, n, b);
    return {e.R, e.M};
}

bool bilinear_strichartz_continuous(int n) {
    check_n(n, "bilinear_strichartz_continuous");
    const std::int64_t m = n;
    const Rational at2(1, 2), at_mid(2 * m - 3, 2 * (2 * m - 1));
    const auto a = branch_exponents<Rational>(at2, n, StrichartzBranch::Low);
    const auto b = branch_exponents<Rational>(at2, n, StrichartzBranch::Mid);
    const auto c = branch_exponents<Rational>(at_mid, n, StrichartzBranch::Mid);
    const auto d = branch_exponents<Rational>(at_mid, n, StrichartzBranch::High);
    return a.R == b.R && a.M == b.M && c.R == d.R && c.M == d.M;
}

StrichartzResult bilinear_strichartz_ratio(const FrequencyBand& b1, const FrequencyBand& b2, double q, int n,
                                           const StrichartzGrid& grid) {
    check_n(n, "bilinear_strichartz_ratio");
    b1.validate();
    b2.validate();
    if (b2.M > b1.M / 4) throw std::invalid_argument("bilinear_strichartz_ratio: need M2 <= M1/4");
    if (std::isinf(q)) throw std::domain_error("bilinear_strichartz_ratio: q must be finite");
    const auto [e1, e2] = bilinear_strichartz_exponents(q, n);
    const double d1 = data_l2_norm(b1, n), d2 = data_l2_norm(b2, n);
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::domain_error("bilinear_strichartz_ratio: zero initial datum");
    const ExtensionField u = evolution(b1, n), v = evolution(b2, n);
    const double M1 = b1.M;
    // the product lives between the two spatial scales 1/M1 and 1/M2
    const int spread = static_cast<int>(std::lround(std::log2(b1.M / b2.M)));
    bool all_conv = true;
    StrichartzResult res;
    res.sum = dyadic_annulus_sum(
        [&](int k) {
            const double R = std::ldexp(1.0, k) / M1;
            const NormResult r = bilinear_product_norm(u, v, q, R, n, annulus_grid(grid, R, M1));
            all_conv = all_conv && r.converged;
            return std::pow(r.value, q);
        },
        grid.max_down, grid.max_up + spread, grid.rel_tol, grid.min_steps, grid.min_steps + spread);
    res.norm = std::pow(res.sum.total, 1.0 / q);
    res.factor = std::pow(b1.M, e1) * std::pow(b2.M, e2) * d1 * d2;
    res.ratio = res.norm / res.factor;
    res.converged = all_conv && res.sum.converged;
    return res;
}

}  // namespace parasharp
