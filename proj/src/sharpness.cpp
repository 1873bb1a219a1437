#include "parasharp/sharpness.hpp"

#include "parasharp/parallel.hpp"
#include "parasharp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace parasharp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Scale {
    double R = 1.0;
    double M = 0.0;
    double x = 0.0;  // abscissa of the fit
};

std::vector<Scale> scales(const SweepConfig& c) {
    if (c.log2_hi - c.log2_lo < 1) throw std::invalid_argument("run_sweep: need at least two sweep points");
    std::vector<Scale> out;
    for (int k = c.log2_lo; k <= c.log2_hi; ++k) {
        Scale s;
        if (c.axis == SweepAxis::R) {
            s.R = std::ldexp(1.0, k);
            s.M = c.theorem == Theorem::Linear ? 0.0 : std::ldexp(1.0, c.fixed_log2);
        } else {
            if (c.theorem == Theorem::Linear) throw std::invalid_argument("run_sweep: the linear theorem has no M axis");
            s.M = std::ldexp(1.0, k);
            s.R = std::ldexp(1.0, c.coupled_log2 ? *c.coupled_log2 - k : c.fixed_log2);
        }
        s.x = k;
        out.push_back(s);
    }
    return out;
}

ExtremalCase make_case(const SweepConfig& c, const Scale& s) {
    ExampleOptions o;
    o.q = c.q;
    o.p = c.p;
    o.surface = c.surface;
    if (c.theorem == Theorem::Linear) return build_linear_example(c.region, s.R, c.n, o);
    return build_bilinear_example(c.regime, c.region, s.R, s.M, c.n, o);
}

double annulus_norm_value(const ExtensionField& u, double q, double R, int n, const GridSpec& g, bool& converged) {
    if (q == 2.0) {
        converged = true;
        return annulus_l2_plancherel(u, R / 2, R);
    }
    const NormResult r = lq_annulus_norm(u, q, R, n, g);
    converged = r.converged;
    return r.value;
}

// fills slope, band and pass from the points
void finish(ExponentReport& rep, bool upper) {
    std::vector<double> xs, ys;
    rep.valid = true;
    for (const SweepPoint& p : rep.points) {
        xs.push_back(rep.config.axis == SweepAxis::R ? p.log2_R : p.log2_M);
        ys.push_back(p.fit_value);
        if (!p.converged || !std::isfinite(p.fit_value)) rep.valid = false;
    }
    if (rep.valid) {
        const LineFit f = fit_line(xs, ys);
        rep.fitted_slope = f.slope;
        rep.intercept = f.intercept;
        rep.residual_rms = f.residual_rms;
    } else {
        rep.fitted_slope = rep.intercept = rep.residual_rms = std::numeric_limits<double>::quiet_NaN();
    }
    const double tol = rep.config.tolerance;
    if (upper) {
        rep.band_lo = -kInf;
        rep.band_hi = rep.theoretical + (rep.config.epsilon_band ? 0.15 : tol);
    } else if (rep.config.epsilon_band) {
        rep.band_lo = rep.theoretical - 0.02;
        rep.band_hi = rep.theoretical + 0.15;
    } else {
        rep.band_lo = rep.theoretical - tol;
        rep.band_hi = rep.theoretical + tol;
    }
    rep.pass = rep.valid && rep.fitted_slope >= rep.band_lo && rep.fitted_slope <= rep.band_hi &&
               (upper || rep.residual_rms <= rep.config.rms_tolerance);
}

double sin_bump(double s, double lo, double hi) {
    const double v = std::sin(std::numbers::pi * (s - lo) / (hi - lo));
    return v * v;
}

RadialDensity bump(double lo, double hi, double beta, int power = 1) {
    RadialDensity d = indicator_density(lo, hi, 0.0);
    d.profile = [lo, hi, beta, power](double s) { return std::pow(s, beta) * std::pow(sin_bump(s, lo, hi), power); };
    return d;
}

}  // namespace

ExponentReport run_sweep(const SweepConfig& config) {
    ExponentReport rep;
    rep.config = config;
    const std::vector<Scale> sc = scales(config);
    rep.points.resize(sc.size());
    std::vector<std::string> ids(sc.size());
    std::vector<double> theory(sc.size(), 0.0), r_exp(sc.size(), 0.0), ps(sc.size(), config.p), qs(sc.size(), config.q);

    parallel_for(sc.size(), [&](std::size_t i) {
        const Scale& s = sc[i];
        SweepPoint& pt = rep.points[i];
        pt.log2_R = std::log2(s.R);
        pt.log2_M = s.M > 0.0 ? std::log2(s.M) : 0.0;
        switch (config.kind) {
            case SweepKind::Probe:
            case SweepKind::Khintchine: {
                const ExtremalCase c = make_case(config, s);
                ids[i] = c.id;
                ps[i] = c.p;
                qs[i] = c.q;
                double v = 0.0;
                if (config.kind == SweepKind::Khintchine || c.uses_khintchine) {
                    const KhintchineResult k = khintchine_lower_bound(c, config.draws, config.seed, config.grid);
                    v = k.mean;
                    pt.standard_error = k.standard_error;
                } else {
                    v = case_probe(c, config.grid);
                }
                const double norm = config.ratio_form ? case_norm_product(c) : 1.0;
                pt.measured = v / norm;
                pt.standard_error /= norm;
                const auto e = config.ratio_form ? c.expected_lower_exponent : c.raw_lower_exponent;
                theory[i] = config.axis == SweepAxis::R ? e.first : e.second;
                r_exp[i] = e.first;
                break;
            }
            case SweepKind::Upper: {
                if (!config.density) throw std::invalid_argument("run_sweep: upper sweep needs a density");
                const RadialDensity d = config.density(s.R);
                const ExtensionField u(d, config.surface, config.n);
                const double q = config.q > 0 ? config.q : 2.0, p = config.p > 0 ? config.p : 2.0;
                ps[i] = p;
                qs[i] = q;
                pt.measured = annulus_norm_value(u, q, s.R, config.n, config.grid, pt.converged) /
                              lp_surface_norm(d, p, config.n);
                ids[i] = "upper-" + config.region;
                theory[i] = theoretical_exponent(Theorem::Linear, q, p, config.n, DyadicRegime::linear(s.R).regime).first;
                break;
            }
            case SweepKind::Synthetic: {
                if (!config.synthetic) throw std::invalid_argument("run_sweep: synthetic sweep needs values");
                pt.measured = config.synthetic(s.R, s.M);
                ids[i] = "synthetic";
                break;
            }
        }
        pt.fit_value = std::log2(pt.measured);
        if (config.axis == SweepAxis::M && config.coupled_log2) pt.fit_value -= r_exp[i] * pt.log2_R;
    });

    rep.example_id = ids.front();
    rep.p = ps.front();
    rep.q = qs.front();
    rep.theoretical = config.theoretical_override ? *config.theoretical_override : theory.front();
    if (!config.theoretical_override)
        for (double t : theory)
            if (t != rep.theoretical) throw std::logic_error("run_sweep: theoretical exponent changes along the sweep");
    finish(rep, config.kind == SweepKind::Upper);
    return rep;
}

std::vector<BatteryDensity> upper_battery() {
    std::vector<BatteryDensity> b;
    b.push_back({"bump", [](double) { return bump(1.0, 2.0, 0.0); }});
    b.push_back({"bump-beta-half", [](double) { return bump(1.0, 2.0, -0.5); }});
    b.push_back({"bump-beta-one", [](double) { return bump(1.0, 2.0, 1.0); }});
    b.push_back({"bump-fourth", [](double) { return bump(1.0, 2.0, 0.0, 2); }});
    b.push_back({"narrow-low", [](double) { return bump(1.0, 1.25, 0.0); }});
    b.push_back({"narrow-high", [](double) { return bump(1.5, 2.0, 0.0); }});
    b.push_back({"bump-chirp", [](double R) {
                     RadialDensity d = bump(1.0, 2.0, 0.0);
                     d.r0 = 0.75 * R;
                     return d;
                 }});
    b.push_back({"narrow-chirp", [](double R) {
                     RadialDensity d = bump(1.0, 1.25, 0.0);
                     d.r0 = 0.75 * R;
                     return d;
                 }});
    b.push_back({"bump-focus", [](double R) {
                     RadialDensity d = bump(1.0, 2.0, -0.5);
                     d.r0 = 0.75 * R;
                     d.t0 = 0.5 * R;
                     return d;
                 }});
    b.push_back({"knapp-chirp", [](double R) {
                     RadialDensity d = bump(1.0, 1.0 + 1.0 / std::sqrt(R), -0.5);
                     d.r0 = 0.75 * R;
                     return d;
                 }});
    return b;
}

std::vector<UpperLine> upper_lines() {
    return {{Line::Q2, 2.0, 2.0}, {Line::Q4, 4.0, 4.0}, {Line::Q3pPrime, 6.0, 2.0}, {Line::QInf, kInf, 2.0}};
}

std::vector<ExponentReport> run_upper_battery(const UpperBatteryOptions& opt) {
    const auto battery = upper_battery();
    const auto lines = upper_lines();
    std::vector<double> hi_q;
    for (const UpperLine& l : lines)
        if (l.q != 2.0) hi_q.push_back(l.q);

    struct Job {
        std::size_t density;
        double R;
        bool l2;
    };
    std::vector<Job> jobs;
    for (std::size_t d = 0; d < battery.size(); ++d) {
        for (int k = opt.q2_log2_lo; k <= opt.q2_log2_hi; ++k) jobs.push_back({d, std::ldexp(1.0, k), true});
        for (int k = opt.log2_lo; k <= opt.log2_hi; ++k) jobs.push_back({d, std::ldexp(1.0, k), false});
    }
    // per job: norm values for the q = 2 job, or one per q > 2 line
    std::vector<std::vector<NormResult>> norms(jobs.size());
    std::vector<RadialDensity> dens(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& j = jobs[i];
        dens[i] = battery[j.density].make(j.R);
        const ExtensionField u(dens[i], Surface::paraboloid(), opt.n);
        if (j.l2) {
            NormResult r;
            r.value = annulus_l2_plancherel(u, j.R / 2, j.R);
            r.converged = true;
            norms[i] = {r};
        } else {
            GridSpec g;
            g.t_halfwidth = 2 * j.R;
            g.tail_doublings = 2;
            norms[i] = lq_annulus_norms(u, hi_q, j.R, opt.n, g);
        }
    });

    std::vector<ExponentReport> out;
    for (std::size_t d = 0; d < battery.size(); ++d) {
        for (const UpperLine& l : lines) {
            ExponentReport rep;
            rep.config.kind = SweepKind::Upper;
            rep.config.theorem = Theorem::Linear;
            rep.config.regime = Regime::LargeR;
            rep.config.region = battery[d].label;
            rep.config.n = opt.n;
            rep.config.q = l.q;
            rep.config.p = l.p;
            rep.config.tolerance = opt.tolerance;
            rep.config.epsilon_band = l.line == Line::Q4;
            const bool l2 = l.q == 2.0;
            rep.config.log2_lo = l2 ? opt.q2_log2_lo : opt.log2_lo;
            rep.config.log2_hi = l2 ? opt.q2_log2_hi : opt.log2_hi;
            rep.example_id = "upper-" + battery[d].label + "-" + line_name(l.line);
            rep.p = l.p;
            rep.q = l.q;
            rep.theoretical = theoretical_exponent(Theorem::Linear, l.q, l.p, opt.n, Regime::LargeR).first;
            const std::size_t slot =
                l2 ? 0 : static_cast<std::size_t>(std::find(hi_q.begin(), hi_q.end(), l.q) - hi_q.begin());
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                if (jobs[i].density != d || jobs[i].l2 != l2) continue;
                const NormResult& r = norms[i][slot];
                SweepPoint pt;
                pt.log2_R = std::log2(jobs[i].R);
                pt.measured = r.value / lp_surface_norm(dens[i], l.p, opt.n);
                pt.fit_value = std::log2(pt.measured);
                pt.converged = r.converged;
                rep.points.push_back(pt);
            }
            finish(rep, true);
            out.push_back(std::move(rep));
        }
    }
    return out;
}

SearchResult ratio_search(double q, double p, int n, double R, const SearchFamily& family, int budget) {
    if (family.widths.empty() || family.betas.empty() || family.chirps.empty())
        throw std::invalid_argument("ratio_search: empty family");
    const std::array<std::size_t, 3> dims{family.widths.size(), family.betas.size(), family.chirps.size()};
    using Idx = std::array<std::size_t, 3>;
    std::map<Idx, double> seen;
    SearchResult best;

    auto evaluate = [&](const Idx& ix) -> double {
        const double w = family.widths[ix[0]], beta = family.betas[ix[1]], chirp = family.chirps[ix[2]];
        RadialDensity d = indicator_density(family.s_lo, family.s_lo + w, beta);
        d.r0 = chirp * R;
        const ExtensionField u(d, Surface::paraboloid(), n);
        double v = 0.0;
        if (family.window) {
            v = probe_lower_bound(u, q, family.window(R, d.r0), n, family.grid);
        } else {
            bool conv = true;
            v = annulus_norm_value(u, q, R, n, family.grid, conv);
        }
        const double ratio = v / lp_surface_norm(d, p, n);
        seen[ix] = ratio;
        ++best.evaluations;
        if (ratio > best.best_ratio) {
            best.best_ratio = ratio;
            best.width = w;
            best.beta = beta;
            best.chirp = chirp;
        }
        return ratio;
    };
    auto budget_left = [&] { return best.evaluations < budget; };
    if (!budget_left()) return best;

    Idx cur{dims[0] / 2, dims[1] / 2, dims[2] / 2};
    double cur_val = evaluate(cur);
    bool moved = true;
    while (moved && budget_left()) {
        moved = false;
        for (std::size_t c = 0; c < 3 && budget_left(); ++c) {
            for (int delta : {-1, 1}) {
                if (!budget_left()) break;
                if ((delta < 0 && cur[c] == 0) || (delta > 0 && cur[c] + 1 >= dims[c])) continue;
                Idx nb = cur;
                nb[c] = delta < 0 ? cur[c] - 1 : cur[c] + 1;
                if (seen.count(nb)) continue;
                const double v = evaluate(nb);
                if (v > cur_val) {
                    cur = nb;
                    cur_val = v;
                    moved = true;
                }
            }
        }
    }
    for (std::size_t a = 0; a < dims[0] && budget_left(); ++a)
        for (std::size_t b = 0; b < dims[1] && budget_left(); ++b)
            for (std::size_t c = 0; c < dims[2] && budget_left(); ++c)
                if (!seen.count({a, b, c})) evaluate({a, b, c});
    return best;
}

SearchFamily linear_region_one_family(int n, int k_max) {
    if (k_max < 1) throw std::invalid_argument("linear_region_one_family: k_max must be >= 1");
    SearchFamily f;
    for (int k = 1; k <= k_max; ++k) f.widths.push_back(std::ldexp(1.0, -k));
    f.betas = {-(n - 2) / 2.0};
    f.chirps = {0.75};
    // tube of half-width sqrt(R)/2 along the s = 1 ray, tau in [R/2, R]
    f.window = [](double R, double r0) {
        ProbeWindow w;
        w.r0 = r0;
        const double h = 0.5 * std::sqrt(R);
        w.constraints = {{1.0, 0.0, R / 2, R}, {-2.0, 1.0, -h, h}};
        return w;
    };
    return f;
}

}  // namespace parasharp
