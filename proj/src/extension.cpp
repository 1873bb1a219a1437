#include "parasharp/extension.hpp"

#include "parasharp/parallel.hpp"
#include "parasharp/phase_kernels.hpp"
#include "parasharp/quadrature.hpp"
#include "parasharp/specialfn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace parasharp {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string budget_message(long attempted, long allowed) {
    std::ostringstream os;
    os << "quadrature panel budget exceeded: " << attempted << " panels needed, " << allowed << " allowed";
    return os.str();
}

// Node data with the density folded in: coef = w F s^{n-2} (no t phase).
struct Folded {
    std::vector<double> s;
    std::vector<double> a;
    std::vector<double> re;
    std::vector<double> im;
};

Folded fold(const RadialDensity& d, const Surface& surface, int n, const RadialNodes& nodes) {
    Folded f;
    const std::size_t m = nodes.s.size();
    f.s = nodes.s;
    f.a.resize(m);
    f.re.resize(m);
    f.im.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double s = nodes.s[j];
        f.a[j] = surface.a(s);
        const cplx F = density_eval(d, surface, s);
        const cplx c = nodes.w[j] * F * std::pow(s, n - 2.0);
        f.re[j] = c.real();
        f.im[j] = c.imag();
    }
    return f;
}

double max_abs_slope(const Surface& surface, double lo, double hi) {
    // a' is monotone on every supported surface.
    return std::max(std::fabs(surface.da(lo)), std::fabs(surface.da(hi)));
}

// Stationary points of +-r s - r0 s - tau a(s) inside (lo, hi).
void stationary_points(const RadialDensity& d, const Surface& surface, double tau, double r,
                       std::vector<double>& out) {
    if (tau == 0.0) return;
    for (int sgn : {1, -1}) {
        const double target = (sgn * r - d.r0) / tau;  // a'(s) = target
        auto g = [&](double s) { return surface.da(s) - target; };
        double lo = d.s_lo, hi = d.s_hi;
        double glo = g(lo), ghi = g(hi);
        if (glo * ghi >= 0.0) continue;
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = g(mid);
            if ((gm < 0.0) == (glo < 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        out.push_back(0.5 * (lo + hi));
    }
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0) || rel_tol > 1e-3) throw std::invalid_argument("QuadratureSpec: rel_tol must lie in (0, 1e-3]");
    if (!(oscillation_factor > 0.0) || oscillation_factor > kPi)
        throw std::invalid_argument("QuadratureSpec: oscillation_factor must lie in (0, pi]");
    if (max_panels < 1) throw std::invalid_argument("QuadratureSpec: max_panels must be positive");
}

QuadratureBudgetError::QuadratureBudgetError(long attempted_panels, long allowed)
    : std::runtime_error(budget_message(attempted_panels, allowed)), attempted(attempted_panels) {}

RadialNodes build_nodes(const RadialDensity& d, const Surface& surface, double t_span, double r_max,
                        const QuadratureSpec& spec, std::span<const double> extra_breaks) {
    std::vector<double> br = d.breakpoints();
    for (double x : extra_breaks)
        if (x > d.s_lo && x < d.s_hi) br.push_back(x);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    struct Plan {
        double lo, hi;
        long panels;
        int order;
    };
    std::vector<Plan> plan;
    long total = 0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double lo = br[i], hi = br[i + 1];
        if (!(hi > lo)) continue;
        const double rate = std::fabs(t_span) * max_abs_slope(surface, lo, hi) + std::fabs(d.r0) + std::fabs(r_max);
        const double phase = rate * (hi - lo);
        const long panels = std::max(1L, static_cast<long>(std::ceil(phase / spec.oscillation_factor)));
        const int order = (phase < 0.25 * spec.oscillation_factor) ? std::min(spec.order, 4) : spec.order;
        plan.push_back({lo, hi, panels, order});
        total += panels;
        if (total > spec.max_panels) throw QuadratureBudgetError(total, spec.max_panels);
    }
    RadialNodes nodes;
    std::size_t count = 0;
    for (const Plan& p : plan) count += static_cast<std::size_t>(p.panels) * p.order;
    nodes.s.reserve(count);
    nodes.w.reserve(count);
    for (const Plan& p : plan) append_composite(p.lo, p.hi, static_cast<int>(p.panels), p.order, nodes.s, nodes.w);
    return nodes;
}

void Field::eval_grid(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const {
    const std::size_t nt = t.size();
    std::vector<double> tt(nt * r.size()), rr(nt * r.size());
    for (std::size_t k = 0; k < r.size(); ++k)
        for (std::size_t i = 0; i < nt; ++i) {
            tt[k * nt + i] = t[i];
            rr[k * nt + i] = r[k];
        }
    eval_points(tt, rr, out);
}

void Field::eval_rows(std::span<const double> r, const std::vector<std::vector<double>>& t_rows,
                      std::vector<std::vector<cplx>>& out) const {
    if (t_rows.size() != r.size()) throw std::invalid_argument("eval_rows: size mismatch");
    out.assign(r.size(), {});
    for (std::size_t k = 0; k < r.size(); ++k) {
        out[k].resize(t_rows[k].size());
        eval_grid(t_rows[k], r.subspan(k, 1), out[k]);
    }
}

ExtensionField::ExtensionField(RadialDensity d, Surface surface, int n, QuadratureSpec spec, int time_sign)
    : d_(std::move(d)), surface_(surface), n_(n), spec_(spec), time_sign_(time_sign >= 0 ? 1 : -1) {
    BesselOrder::for_dimension(n_);
    d_.validate();
    spec_.validate();
    check_surface_support(surface_, d_);
}

double ExtensionField::t_frequency() const {
    return std::fabs(surface_.a(d_.s_hi) - surface_.a(d_.s_lo));
}

double ExtensionField::r_frequency() const { return 2.0 * d_.s_hi; }

void ExtensionField::eval_points(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const {
    if (t.size() != r.size() || out.size() != t.size()) throw std::invalid_argument("eval_points: size mismatch");
    if (t.empty()) return;
    double t_span = 0.0, r_max = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        t_span = std::max(t_span, std::fabs(time_sign_ * t[i] - d_.t0));
        r_max = std::max(r_max, std::fabs(r[i]));
    }
    const Folded f = fold(d_, surface_, n_, build_nodes(d_, surface_, t_span, r_max, spec_));
    const std::size_t m = f.s.size();
    const std::size_t chunk = 64;
    const std::size_t chunks = (t.size() + chunk - 1) / chunk;
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t lo = c * chunk, hi = std::min(t.size(), lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const double tau = time_sign_ * t[i];
            double sr = 0.0, si = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double g = sphere_measure_ft(n_, r[i] * f.s[j]);
                const double ph = -tau * f.a[j];
                const double cr = std::cos(ph), ci = std::sin(ph);
                sr += g * (f.re[j] * cr - f.im[j] * ci);
                si += g * (f.re[j] * ci + f.im[j] * cr);
            }
            out[i] = {sr, si};
        }
    });
}

void ExtensionField::eval_grid(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const {
    const std::size_t nt = t.size(), nr = r.size();
    if (out.size() != nt * nr) throw std::invalid_argument("eval_grid: size mismatch");
    if (nt == 0 || nr == 0) return;
    double t_span = 0.0, r_max = 0.0;
    for (double x : t) t_span = std::max(t_span, std::fabs(time_sign_ * x - d_.t0));
    for (double x : r) r_max = std::max(r_max, std::fabs(x));
    const Folded f = fold(d_, surface_, n_, build_nodes(d_, surface_, t_span, r_max, spec_));
    const Eigen::Index m = static_cast<Eigen::Index>(f.s.size());

    // out(r, t) = G(r, s) * E(s, t): one complex matrix product per block.
    using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
    Mat G(static_cast<Eigen::Index>(nr), m);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t j) {
        const cplx c(f.re[j], f.im[j]);
        for (std::size_t k = 0; k < nr; ++k)
            G(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = c * sphere_measure_ft(n_, r[k] * f.s[j]);
    });
    const std::size_t budget = 2'000'000;  // complex entries per E block
    const std::size_t cols = std::max<std::size_t>(1, std::min(nt, budget / static_cast<std::size_t>(m)));
    Mat E(m, static_cast<Eigen::Index>(cols));
    Mat P(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(cols));
    for (std::size_t c0 = 0; c0 < nt; c0 += cols) {
        const std::size_t nc = std::min(cols, nt - c0);
        parallel_for(nc, [&](std::size_t ii) {
            const double tau = time_sign_ * t[c0 + ii];
            unit_phases(f.a.data(), static_cast<std::size_t>(m), -tau, E.col(static_cast<Eigen::Index>(ii)).data());
        });
        const auto Eb = E.leftCols(static_cast<Eigen::Index>(nc));
        P.leftCols(static_cast<Eigen::Index>(nc)).noalias() = G * Eb;
        for (std::size_t k = 0; k < nr; ++k)
            for (std::size_t ii = 0; ii < nc; ++ii)
                out[k * nt + c0 + ii] = P(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(ii));
    }
}

void ExtensionField::eval_rows(std::span<const double> r, const std::vector<std::vector<double>>& t_rows,
                               std::vector<std::vector<cplx>>& out) const {
    const std::size_t nr = r.size();
    if (t_rows.size() != nr) throw std::invalid_argument("eval_rows: size mismatch");
    out.assign(nr, {});
    double t_span = 0.0, r_max = 0.0;
    std::size_t total = 0;
    for (std::size_t k = 0; k < nr; ++k) {
        out[k].resize(t_rows[k].size());
        total += t_rows[k].size();
        r_max = std::max(r_max, std::fabs(r[k]));
        for (double x : t_rows[k]) t_span = std::max(t_span, std::fabs(time_sign_ * x - d_.t0));
    }
    if (total == 0) return;
    const Folded f = fold(d_, surface_, n_, build_nodes(d_, surface_, t_span, r_max, spec_));
    const Eigen::Index m = static_cast<Eigen::Index>(f.s.size());
    using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
    using RowVec = Eigen::Matrix<cplx, 1, Eigen::Dynamic>;

    const std::size_t block = std::max<std::size_t>(1, std::min<std::size_t>(32, 4'000'000 / static_cast<std::size_t>(m)));
    const std::size_t budget = 4'000'000;
    Mat G, E, P;
    for (std::size_t k0 = 0; k0 < nr; k0 += block) {
        const std::size_t nb = std::min(block, nr - k0);
        G.resize(static_cast<Eigen::Index>(nb), m);
        parallel_for(static_cast<std::size_t>(m), [&](std::size_t j) {
            const cplx c(f.re[j], f.im[j]);
            for (std::size_t k = 0; k < nb; ++k)
                G(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
                    c * sphere_measure_ft(n_, r[k0 + k] * f.s[j]);
        });
        // times used by two or more rows of the block go through one matrix product
        std::vector<double> all;
        for (std::size_t k = 0; k < nb; ++k) all.insert(all.end(), t_rows[k0 + k].begin(), t_rows[k0 + k].end());
        std::sort(all.begin(), all.end());
        std::vector<double> shared;
        for (std::size_t i = 0; i < all.size();) {
            std::size_t j = i + 1;
            while (j < all.size() && all[j] == all[i]) ++j;
            if (j - i > 1) shared.push_back(all[i]);
            i = j;
        }
        const std::size_t ns = shared.size();
        std::vector<cplx> shared_vals(nb * ns);
        const std::size_t cols = std::max<std::size_t>(1, std::min(std::max<std::size_t>(ns, 1), budget / static_cast<std::size_t>(m)));
        E.resize(m, static_cast<Eigen::Index>(cols));
        for (std::size_t c0 = 0; c0 < ns; c0 += cols) {
            const std::size_t nc = std::min(cols, ns - c0);
            parallel_for(nc, [&](std::size_t ii) {
                unit_phases(f.a.data(), static_cast<std::size_t>(m), -time_sign_ * shared[c0 + ii],
                            E.col(static_cast<Eigen::Index>(ii)).data());
            });
            P.noalias() = G * E.leftCols(static_cast<Eigen::Index>(nc));
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t ii = 0; ii < nc; ++ii)
                    shared_vals[k * ns + c0 + ii] = P(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(ii));
        }
        for (std::size_t k = 0; k < nb; ++k) {
            const auto& tr = t_rows[k0 + k];
            std::vector<double> own;
            std::vector<std::size_t> own_idx;
            for (std::size_t i = 0; i < tr.size(); ++i) {
                const auto it = std::lower_bound(shared.begin(), shared.end(), tr[i]);
                if (it != shared.end() && *it == tr[i])
                    out[k0 + k][i] = shared_vals[k * ns + static_cast<std::size_t>(it - shared.begin())];
                else {
                    own.push_back(tr[i]);
                    own_idx.push_back(i);
                }
            }
            if (own.empty()) continue;
            E.resize(m, static_cast<Eigen::Index>(own.size()));
            parallel_for(own.size(), [&](std::size_t ii) {
                unit_phases(f.a.data(), static_cast<std::size_t>(m), -time_sign_ * own[ii],
                            E.col(static_cast<Eigen::Index>(ii)).data());
            });
            const RowVec v = G.row(static_cast<Eigen::Index>(k)) * E;
            for (std::size_t ii = 0; ii < own.size(); ++ii) out[k0 + k][own_idx[ii]] = v(static_cast<Eigen::Index>(ii));
        }
    }
}

cplx ExtensionField::operator()(double t, double r) const {
    cplx v;
    eval_points(std::span<const double>(&t, 1), std::span<const double>(&r, 1), std::span<cplx>(&v, 1));
    return v;
}

FunctionField::FunctionField(std::function<cplx(double, double)> fn, double t_freq, double r_freq)
    : fn_(std::move(fn)), t_freq_(t_freq), r_freq_(r_freq) {}

void FunctionField::eval_points(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = fn_(t[i], r[i]);
}

void ProductField::eval_points(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const {
    std::vector<cplx> a(t.size()), b(t.size());
    u_.eval_points(t, r, a);
    v_.eval_points(t, r, b);
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = a[i] * b[i];
}

void ProductField::eval_grid(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const {
    std::vector<cplx> a(out.size()), b(out.size());
    u_.eval_grid(t, r, a);
    v_.eval_grid(t, r, b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

void ProductField::eval_rows(std::span<const double> r, const std::vector<std::vector<double>>& t_rows,
                             std::vector<std::vector<cplx>>& out) const {
    std::vector<std::vector<cplx>> b;
    u_.eval_rows(r, t_rows, out);
    v_.eval_rows(r, t_rows, b);
    for (std::size_t k = 0; k < out.size(); ++k)
        for (std::size_t i = 0; i < out[k].size(); ++i) out[k][i] *= b[k][i];
}

namespace {

// Direct sum over nodes for one point, with stationary-point breaks.
cplx single_point(const RadialDensity& d, const Surface& surface, int n, double tau, double r,
                  const QuadratureSpec& spec) {
    std::vector<double> breaks;
    stationary_points(d, surface, tau - d.t0, r, breaks);
    const RadialNodes nodes = build_nodes(d, surface, std::fabs(tau - d.t0), r, spec, breaks);
    double sr = 0.0, si = 0.0;
    for (std::size_t j = 0; j < nodes.s.size(); ++j) {
        const double s = nodes.s[j];
        const cplx c = nodes.w[j] * density_eval(d, surface, s) * std::pow(s, n - 2.0) *
                       sphere_measure_ft(n, r * s) * std::polar(1.0, -tau * surface.a(s));
        sr += c.real();
        si += c.imag();
    }
    return {sr, si};
}

template <class Eval>
cplx refine_until_stable(const QuadratureSpec& spec, Eval&& eval) {
    QuadratureSpec cur = spec;
    cplx prev = eval(cur);
    for (int level = 0; level < 8; ++level) {
        QuadratureSpec finer = cur;
        finer.oscillation_factor *= 0.5;
        const cplx next = eval(finer);
        if (std::abs(next - prev) <= spec.rel_tol * std::abs(next) + 1e-300) return next;
        prev = next;
        cur = finer;
    }
    return prev;
}

void require_paraboloid_r(double r, const char* who) {
    if (!(r >= 1.0)) {
        std::ostringstream os;
        os << who << ": requires r >= 1, got " << r;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

cplx extension_full(const RadialDensity& d, const Surface& surface, int n, double t, double r,
                    const QuadratureSpec& spec) {
    BesselOrder::for_dimension(n);
    d.validate();
    spec.validate();
    check_surface_support(surface, d);
    if (!(r >= 0.0)) throw std::invalid_argument("extension_full: r must be >= 0");
    return refine_until_stable(spec, [&](const QuadratureSpec& s) { return single_point(d, surface, n, t, r, s); });
}

std::pair<cplx, cplx> main_term_branches(const RadialDensity& d, int n, double t, double r,
                                         const QuadratureSpec& spec) {
    const BesselOrder o = BesselOrder::for_dimension(n);
    d.validate();
    spec.validate();
    require_paraboloid_r(r, "main_term");
    const Surface par = Surface::paraboloid();
    const double pref = std::pow(2.0 * kPi, 0.5 * (n - 1)) * std::pow(r, -0.5 * (n - 2));
    const cplx cp = split_coefficient(o);
    auto branch = [&](int sgn) {
        return refine_until_stable(spec, [&](const QuadratureSpec& s) {
            std::vector<double> breaks;
            stationary_points(d, par, t - d.t0, r, breaks);
            const RadialNodes nodes = build_nodes(d, par, std::fabs(t - d.t0), r, s, breaks);
            cplx acc(0.0, 0.0);
            for (std::size_t j = 0; j < nodes.s.size(); ++j) {
                const double x = nodes.s[j];
                acc += nodes.w[j] * density_eval(d, par, x) * std::pow(x, 0.5 * (n - 2)) *
                       std::polar(1.0, sgn * r * x - t * x * x);
            }
            return acc;
        });
    };
    return {pref * cp * branch(+1), pref * std::conj(cp) * branch(-1)};
}

cplx main_term(const RadialDensity& d, int n, double t, double r, const QuadratureSpec& spec) {
    const auto [plus, minus] = main_term_branches(d, n, t, r, spec);
    return plus + minus;
}

cplx error_term(const RadialDensity& d, int n, double t, double r, const QuadratureSpec& spec) {
    const BesselOrder o = BesselOrder::for_dimension(n);
    d.validate();
    spec.validate();
    require_paraboloid_r(r, "error_term");
    if (o.m == 0.5) return {0.0, 0.0};
    const Surface par = Surface::paraboloid();
    const double scale = std::pow(2.0 * kPi, 0.5 * (n - 1));
    return refine_until_stable(spec, [&](const QuadratureSpec& s) {
        const RadialNodes nodes = build_nodes(d, par, std::fabs(t - d.t0), r, s);
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < nodes.s.size(); ++j) {
            const double x = nodes.s[j];
            const BesselSplit sp = bessel_split_any(o, r * x);
            acc += nodes.w[j] * density_eval(d, par, x) * std::pow(x, n - 2.0) * std::pow(r * x, -o.m) * sp.error *
                   std::polar(1.0, -t * x * x);
        }
        return scale * acc;
    });
}

cplx schrodinger_evolve(const RadialDensity& u0_spectrum, int n, double t, double r, const QuadratureSpec& spec) {
    return extension_full(u0_spectrum, Surface::paraboloid(), n, -t, r, spec);
}

}  // namespace parasharp
