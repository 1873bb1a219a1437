#include "parasharp/cli.hpp"

#include "parasharp/acceptance.hpp"
#include "parasharp/bilinear_tools.hpp"
#include "parasharp/report.hpp"
#include "parasharp/sharpness.hpp"
#include "parasharp/strichartz.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace parasharp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

int parse_int(const std::string& text) {
    int v = 0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw std::invalid_argument("not an integer: '" + text + "'");
    return v;
}

struct RunConfig {
    std::string command;
    int n = 3;
    std::string surface = "paraboloid";
    std::string theorem = "linear";
    std::string line;
    std::string region;
    std::string regime = "LargeR";
    std::string p, q;
    std::string r_log2, m_log2;
    std::string axis = "R";
    std::optional<int> coupled;
    bool raw = false;
    std::string kind = "probe";
    std::string density = "indicator";
    double s_lo = 1.0, s_hi = 2.0, beta = 0.0;
    double t = kNaN, r = kNaN;
    int draws = 64;
    std::uint64_t seed = 1;
    double tol = 0.1;
    std::string out_path;
    int depth = 6;
    std::string mode = "linear";
    double eps = 0.5;
    int m2_shift = 2;
    std::vector<int> criteria;
    GridSpec grid;
};

Regime parse_regime(const std::string& s) {
    const std::string l = lower(s);
    if (l == "smallr" || l == "small") return Regime::SmallR;
    if (l == "midr" || l == "mid") return Regime::MidR;
    if (l == "larger" || l == "large") return Regime::LargeR;
    throw ConfigError("--regime must be SmallR, MidR or LargeR, got '" + s + "'");
}

Theorem parse_theorem(const std::string& s) {
    const std::string l = lower(s);
    if (l == "linear") return Theorem::Linear;
    if (l == "bilinear") return Theorem::Bilinear;
    throw ConfigError("--theorem must be linear or bilinear, got '" + s + "'");
}

std::pair<int, int> range_or(const std::string& text, const char* flag) {
    if (text.empty()) throw ConfigError(std::string("missing required flag ") + flag);
    try {
        return parse_log2_range(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(flag) + ": " + e.what());
    }
}

int single_log2(const std::string& text, const char* flag) {
    const auto [a, b] = range_or(text, flag);
    if (a != b) throw ConfigError(std::string(flag) + " must be a single value here");
    return a;
}

double exponent_or(const std::string& text, double fallback, const char* flag) {
    if (text.empty()) return fallback;
    try {
        return parse_exponent(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(flag) + ": " + e.what());
    }
}

RadialDensity make_density(const RunConfig& c, double R) {
    if (c.density == "indicator") return indicator_density(c.s_lo, c.s_hi, c.beta);
    for (const BatteryDensity& d : upper_battery())
        if (d.label == c.density) return d.make(R);
    throw ConfigError("--density: unknown density '" + c.density + "'");
}

struct Emitter {
    std::vector<CsvRow> rows;
    std::vector<std::string> notes;
};

CsvRow base_row(const RunConfig& c, const std::string& command) {
    CsvRow r;
    r.command = command;
    r.theorem = "-";
    r.regime = "-";
    r.region = "-";
    r.n = c.n;
    r.p = kNaN;
    r.q = kNaN;
    r.log2_R = kNaN;
    r.log2_M = kNaN;
    r.measured = kNaN;
    r.theoretical_exponent = kNaN;
    r.fitted_slope = kNaN;
    r.residual_rms = kNaN;
    r.seed = c.seed;
    return r;
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void run_eval(const RunConfig& c, Emitter& em) {
    if (!std::isfinite(c.t) || !std::isfinite(c.r)) throw ConfigError("eval needs --t and --r");
    if (c.r < 0) throw ConfigError("--r must be >= 0");
    const RadialDensity d = make_density(c, std::max(c.r, 1.0));
    const ExtensionField u(d, surface_from_name(c.surface), c.n);
    const auto v = u(c.t, c.r);
    CsvRow row = base_row(c, "eval");
    row.region = c.density;
    row.measured = std::abs(v);
    row.converged = std::isfinite(row.measured);
    row.pass = row.converged;
    em.rows.push_back(row);
    em.notes.push_back("u(" + num(c.t) + ", " + num(c.r) + ") = " + num(v.real()) + (v.imag() < 0 ? " - " : " + ") +
                       num(std::fabs(v.imag())) + "i");
}

void run_norm(const RunConfig& c, Emitter& em) {
    if (c.q.empty()) throw ConfigError("missing required flag --q");
    const double q = exponent_or(c.q, 2.0, "--q");
    const double p = exponent_or(c.p, 2.0, "--p");
    const auto [lo, hi] = range_or(c.r_log2, "--r-log2");
    for (int k = lo; k <= hi; ++k) {
        const double R = std::ldexp(1.0, k);
        const RadialDensity d = make_density(c, R);
        const ExtensionField u(d, surface_from_name(c.surface), c.n);
        NormResult nr;
        if (q == 2.0) {
            nr.value = annulus_l2_plancherel(u, R / 2, R);
            nr.converged = true;
        } else {
            nr = lq_annulus_norm(u, q, R, c.n, c.grid);
        }
        CsvRow row = base_row(c, "norm");
        row.theorem = "linear";
        row.region = c.density;
        row.p = p;
        row.q = q;
        row.log2_R = k;
        row.measured = nr.value / lp_surface_norm(d, p, c.n);
        row.converged = nr.converged;
        row.pass = nr.converged;
        em.rows.push_back(row);
    }
}

void run_example(const RunConfig& c, Emitter& em) {
    if (c.region.empty()) throw ConfigError("missing required flag --region");
    const Theorem th = parse_theorem(c.theorem);
    const double R = std::ldexp(1.0, single_log2(c.r_log2, "--r-log2"));
    ExampleOptions o;
    o.q = exponent_or(c.q, 0.0, "--q");
    o.p = exponent_or(c.p, 0.0, "--p");
    o.surface = surface_from_name(c.surface);
    double M = 0.0;
    ExtremalCase ex;
    if (th == Theorem::Linear) {
        ex = build_linear_example(c.region, R, c.n, o);
    } else {
        M = std::ldexp(1.0, single_log2(c.m_log2, "--m-log2"));
        ex = build_bilinear_example(parse_regime(c.regime), c.region, R, M, c.n, o);
    }
    double v = 0.0;
    if (ex.uses_khintchine) {
        const KhintchineResult k = khintchine_lower_bound(ex, c.draws, c.seed, c.grid);
        v = k.mean;
        em.notes.push_back("Khintchine mean over " + std::to_string(c.draws) + " draws, standard error " +
                           num(k.standard_error));
    } else {
        v = case_probe(ex, c.grid);
    }
    const double norm = case_norm_product(ex);
    CsvRow row = base_row(c, "example");
    row.theorem = theorem_name(th);
    row.regime = regime_name(ex.regime.regime);
    row.region = ex.region_label;
    row.p = ex.p;
    row.q = ex.q;
    row.log2_R = std::log2(R);
    row.log2_M = M > 0 ? std::log2(M) : kNaN;
    row.measured = c.raw ? v : v / norm;
    row.theoretical_exponent = c.raw ? ex.raw_lower_exponent.first : ex.expected_lower_exponent.first;
    row.converged = std::isfinite(row.measured);
    row.pass = row.converged;
    em.rows.push_back(row);
    em.notes.push_back(ex.id + ": probe " + num(v) + ", norm product " + num(norm) + ", ratio " + num(v / norm));
}

SweepConfig sweep_config(const RunConfig& c) {
    SweepConfig s;
    s.theorem = parse_theorem(c.theorem);
    s.regime = parse_regime(c.regime);
    s.n = c.n;
    s.surface = surface_from_name(c.surface);
    s.seed = c.seed;
    s.draws = c.draws;
    s.tolerance = c.tol;
    s.ratio_form = !c.raw;
    s.grid = c.grid;
    s.q = exponent_or(c.q, 0.0, "--q");
    s.p = exponent_or(c.p, 0.0, "--p");

    const std::string kind = lower(c.kind);
    if (kind == "probe") {
        s.kind = SweepKind::Probe;
    } else if (kind == "khintchine") {
        s.kind = SweepKind::Khintchine;
    } else if (kind == "upper") {
        s.kind = SweepKind::Upper;
        if (s.theorem != Theorem::Linear) throw ConfigError("--kind upper applies to the linear theorem only");
        if (c.density == "indicator") throw ConfigError("--kind upper needs --density with a battery label");
        bool found = false;
        for (const BatteryDensity& d : upper_battery())
            if (d.label == c.density) {
                s.density = d.make;
                found = true;
            }
        if (!found) throw ConfigError("--density: unknown battery label '" + c.density + "'");
        s.region = c.density;
        s.epsilon_band = s.q == 4.0;
    } else {
        throw ConfigError("--kind must be probe, khintchine or upper, got '" + c.kind + "'");
    }

    if (s.kind != SweepKind::Upper) {
        if (!c.line.empty()) {
            if (s.theorem != Theorem::Linear) throw ConfigError("--line applies to the linear theorem; use --region");
            if (!c.region.empty()) throw ConfigError("--line and --region are exclusive");
            const std::string l = lower(c.line);
            if (l == "q2") {
                s.region = "II";
                if (s.q == 0.0) s.q = 2.0;
            } else if (l == "qinf") {
                s.region = "III";
                s.q = kInf;
            } else if (l == "q4") {
                s.region = "III";
                s.q = 4.0;
                s.epsilon_band = true;
            } else if (l == "q3pprime") {
                s.region = "III";
                s.q = 6.0;
            } else {
                throw ConfigError("--line must be q2, q4, q3pprime or qinf, got '" + c.line + "'");
            }
        } else if (!c.region.empty()) {
            s.region = c.region;
        } else {
            throw ConfigError("missing required flag --line or --region");
        }
        if (s.theorem == Theorem::Linear && s.q == 4.0) s.epsilon_band = true;
    }

    const std::string axis = lower(c.axis);
    if (axis == "r") {
        s.axis = SweepAxis::R;
        std::tie(s.log2_lo, s.log2_hi) = range_or(c.r_log2, "--r-log2");
        if (s.theorem == Theorem::Bilinear) s.fixed_log2 = single_log2(c.m_log2, "--m-log2");
        else if (!c.m_log2.empty()) throw ConfigError("--m-log2 is not used by linear R-sweeps");
    } else if (axis == "m") {
        if (s.theorem != Theorem::Bilinear) throw ConfigError("--axis M needs --theorem bilinear");
        s.axis = SweepAxis::M;
        std::tie(s.log2_lo, s.log2_hi) = range_or(c.m_log2, "--m-log2");
        if (c.coupled) {
            if (!c.r_log2.empty()) throw ConfigError("--coupled and --r-log2 are exclusive on M-sweeps");
            s.coupled_log2 = c.coupled;
        } else {
            s.fixed_log2 = single_log2(c.r_log2, "--r-log2");
        }
    } else {
        throw ConfigError("--axis must be R or M, got '" + c.axis + "'");
    }
    if (s.log2_hi - s.log2_lo < 1) throw ConfigError("a sweep needs at least two points");
    return s;
}

void run_sweep_cmd(const RunConfig& c, Emitter& em) {
    const SweepConfig s = sweep_config(c);
    const ExponentReport rep = run_sweep(s);
    const auto rows = rows_from_report(rep, "sweep", c.seed);
    em.rows.insert(em.rows.end(), rows.begin(), rows.end());
    em.notes.push_back(rep.example_id + ": slope " + num(rep.fitted_slope) + ", theory " + num(rep.theoretical) +
                       ", band [" + num(rep.band_lo) + ", " + num(rep.band_hi) + "], rms " + num(rep.residual_rms) +
                       (rep.valid ? "" : ", not converged"));
}

void run_whitney(const RunConfig& c, Emitter& em) {
    if (c.depth < 1 || c.depth > 12) throw ConfigError("--depth must be in 1..12");
    const WhitneyReport w = whitney_check(c.depth);
    auto check = [&](const std::string& name, double measured, double limit) {
        CsvRow row = base_row(c, "whitney");
        row.theorem = "bilinear";
        row.region = name;
        row.measured = measured;
        row.theoretical_exponent = limit;
        row.converged = true;
        row.pass = measured <= limit;
        em.rows.push_back(row);
    };
    check("uncovered-points", static_cast<double>(w.uncovered), 0.0);
    check("max-partners", w.max_partners, 4.0);
    check("asymmetric", w.symmetric ? 0.0 : 1.0, 0.0);
    check("separation-violations", w.separation_ok ? 0.0 : 1.0, 0.0);
    std::ostringstream os;
    os << "depth " << c.depth << ": " << w.pair_count << " pairs, per generation";
    for (std::size_t g : w.pairs_per_generation) os << ' ' << g;
    os << "; max partners " << w.max_partners << ", max cover " << w.max_cover << ", " << w.grid_points
       << " points tested, " << w.uncovered << " uncovered";
    em.notes.push_back(os.str());
}

void run_strichartz(const RunConfig& c, Emitter& em) {
    const std::string mode = lower(c.mode);
    const auto [lo, hi] = range_or(c.m_log2, "--m-log2");
    double q = 0.0;
    if (mode == "linear" || mode == "bilinear") {
        if (c.q.empty()) throw ConfigError("missing required flag --q");
        q = exponent_or(c.q, 0.0, "--q");
    } else if (mode != "weighted") {
        throw ConfigError("--mode must be linear, weighted or bilinear, got '" + c.mode + "'");
    }
    if (mode == "bilinear" && c.m2_shift < 2) throw ConfigError("--m2-shift must be >= 2 (M2 <= M1/4)");

    std::atomic<bool> converged{true};
    auto value = [&](double M) {
        StrichartzResult r;
        if (mode == "linear") r = linear_strichartz_ratio(smooth_band(M), q, c.n);
        else if (mode == "weighted") r = weighted_local_ratio(smooth_band(M), c.eps, c.n);
        else r = bilinear_strichartz_ratio(smooth_band(M), smooth_band(std::ldexp(M, -c.m2_shift)), q, c.n);
        if (!r.converged) converged = false;
        return r.ratio;
    };
    CsvRow proto = base_row(c, "strichartz");
    proto.theorem = mode == "bilinear" ? "bilinear" : "linear";
    proto.region = "strichartz-" + mode;
    proto.p = 2.0;
    proto.q = mode == "weighted" ? 2.0 : q;
    if (lo == hi) {
        // single band: no slope to judge
        CsvRow row = proto;
        row.log2_M = lo;
        row.measured = value(std::ldexp(1.0, lo));
        row.converged = converged;
        row.pass = row.converged;
        em.rows.push_back(row);
        return;
    }
    SweepConfig s;
    s.kind = SweepKind::Synthetic;
    s.theorem = Theorem::Bilinear;
    s.axis = SweepAxis::M;
    s.log2_lo = lo;
    s.log2_hi = hi;
    s.fixed_log2 = 0;
    s.tolerance = c.tol;
    s.theoretical_override = 0.0;
    s.synthetic = [&](double, double M) { return value(M); };
    const ExponentReport rep = run_sweep(s);
    for (const SweepPoint& pt : rep.points) {
        CsvRow row = proto;
        row.log2_M = pt.log2_M;
        row.measured = pt.measured;
        row.theoretical_exponent = 0.0;
        row.fitted_slope = rep.fitted_slope;
        row.residual_rms = rep.residual_rms;
        row.converged = converged;
        row.pass = rep.pass && converged;
        em.rows.push_back(row);
    }
    em.notes.push_back(proto.region + ": slope in log2 M " + num(rep.fitted_slope) + " (scale invariance predicts 0)");
}

void run_report(const RunConfig& c, Emitter& em) {
    std::vector<int> ids = c.criteria;
    if (ids.empty())
        for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
    for (int id : ids)
        if (id < 1 || id > kCriterionCount) throw ConfigError("--criteria entries must be in 1..12");
    for (int id : ids) {
        const CriterionOutcome o = run_criterion(id, c.seed);
        em.rows.insert(em.rows.end(), o.rows.begin(), o.rows.end());
        for (const CriterionCheck& ch : o.checks)
            em.notes.push_back("  " + std::to_string(id) + " " + ch.name + ": " + (ch.pass ? "PASS" : "FAIL") + "  " +
                               ch.detail);
        em.notes.push_back("criterion " + std::to_string(id) + " (" + o.title + "): " + (o.pass() ? "PASS" : "FAIL"));
    }
}

// flags each command accepts besides --config, --seed, --out
const std::map<std::string, std::set<std::string>>& allowed_flags() {
    static const std::map<std::string, std::set<std::string>> m = {
        {"eval", {"--n", "--surface", "--density", "--s-lo", "--s-hi", "--beta", "--t", "--r"}},
        {"norm",
         {"--n", "--surface", "--density", "--s-lo", "--s-hi", "--beta", "--p", "--q", "--r-log2", "--t-points",
          "--r-points", "--tail-doublings", "--tail-fraction", "--resolution"}},
        {"example",
         {"--n", "--surface", "--theorem", "--region", "--regime", "--p", "--q", "--r-log2", "--m-log2", "--raw",
          "--draws", "--t-points", "--r-points", "--tail-doublings", "--tail-fraction", "--resolution"}},
        {"sweep",
         {"--n", "--surface", "--theorem", "--line", "--region", "--regime", "--p", "--q", "--r-log2", "--m-log2",
          "--axis", "--coupled", "--raw", "--kind", "--density", "--draws", "--tol", "--t-points", "--r-points",
          "--tail-doublings", "--tail-fraction", "--resolution"}},
        {"whitney", {"--depth"}},
        {"strichartz", {"--n", "--mode", "--q", "--eps", "--m-log2", "--m2-shift", "--tol"}},
        {"report", {"--criteria"}},
    };
    return m;
}

}  // namespace

double parse_exponent(const std::string& text) {
    const std::string l = lower(text);
    if (l == "inf" || l == "+inf" || l == "infinity") return kInf;
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (text.empty() || ec != std::errc() || ptr != e || !std::isfinite(v))
        throw std::invalid_argument("not a number or 'inf': '" + text + "'");
    return v;
}

std::pair<int, int> parse_log2_range(const std::string& text) {
    const auto dots = text.find("..");
    std::pair<int, int> r;
    if (dots == std::string::npos) {
        r.first = r.second = parse_int(text);
    } else {
        r.first = parse_int(text.substr(0, dots));
        r.second = parse_int(text.substr(dots + 2));
    }
    if (r.first > r.second) throw std::invalid_argument("empty range '" + text + "'");
    return r;
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical checks for sharp extension and Strichartz estimates on dyadic annuli"};
    app.set_config("--config", "", "key=value file mirroring the long flags; flags win");
    RunConfig c;
    app.add_option("command", c.command, "eval | norm | example | sweep | whitney | strichartz | report")
        ->required()
        ->check(CLI::IsMember({"eval", "norm", "example", "sweep", "whitney", "strichartz", "report"}));
    app.add_option("--n", c.n, "ambient dimension (>= 3)");
    app.add_option("--surface", c.surface, "paraboloid | sphere | elliptic");
    app.add_option("--theorem", c.theorem, "linear | bilinear");
    app.add_option("--line", c.line, "linear line: q2 | q4 | q3pprime | qinf");
    app.add_option("--region", c.region, "example region I..V");
    app.add_option("--regime", c.regime, "SmallR | MidR | LargeR");
    app.add_option("--p", c.p, "surface exponent, or inf");
    app.add_option("--q", c.q, "space-time exponent, or inf");
    app.add_option("--r-log2", c.r_log2, "log2 R, single or a..b");
    app.add_option("--m-log2", c.m_log2, "log2 M, single or a..b");
    app.add_option("--axis", c.axis, "sweep axis R | M");
    app.add_option("--coupled", c.coupled, "M-sweep along R = 2^c / M");
    app.add_flag("--raw", c.raw, "fit the raw probe instead of the ratio");
    app.add_option("--kind", c.kind, "probe | khintchine | upper");
    app.add_option("--density", c.density, "indicator or a battery label");
    app.add_option("--s-lo", c.s_lo, "indicator density support start");
    app.add_option("--s-hi", c.s_hi, "indicator density support end");
    app.add_option("--beta", c.beta, "indicator density power s^beta");
    app.add_option("--t", c.t, "evaluation time");
    app.add_option("--r", c.r, "evaluation radius");
    app.add_option("--draws", c.draws, "Khintchine sign draws");
    app.add_option("--seed", c.seed, "seed for every random draw");
    app.add_option("--tol", c.tol, "slope tolerance");
    app.add_option("--out", c.out_path, "CSV output path (default stdout)");
    app.add_option("--depth", c.depth, "Whitney depth");
    app.add_option("--mode", c.mode, "strichartz: linear | weighted | bilinear");
    app.add_option("--eps", c.eps, "weighted estimate epsilon");
    app.add_option("--m2-shift", c.m2_shift, "bilinear: log2(M1 / M2)");
    app.add_option("--criteria", c.criteria, "report: criterion ids (default all)")->delimiter(',');
    app.add_option("--t-points", c.grid.t_points, "minimum t nodes");
    app.add_option("--r-points", c.grid.r_points, "minimum r nodes");
    app.add_option("--tail-doublings", c.grid.tail_doublings, "time-window doublings");
    app.add_option("--tail-fraction", c.grid.tail_fraction, "tail stopping fraction");
    app.add_option("--resolution", c.grid.resolution, "max phase change per node");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitConfig;
    }

    Emitter em;
    try {
        const auto& allowed = allowed_flags().at(c.command);
        for (const CLI::Option* o : app.get_options()) {
            const std::string name = o->get_name(false, true);
            if (o->count() == 0 || name.rfind("--", 0) != 0) continue;
            if (name == "--config" || name == "--seed" || name == "--out" || name == "--help") continue;
            if (!allowed.count(name)) throw ConfigError(name + " is not used by '" + c.command + "'");
        }
        if (c.n < 3) throw ConfigError("--n must be >= 3");
        c.grid.validate();

        if (c.command == "eval") run_eval(c, em);
        else if (c.command == "norm") run_norm(c, em);
        else if (c.command == "example") run_example(c, em);
        else if (c.command == "sweep") run_sweep_cmd(c, em);
        else if (c.command == "whitney") run_whitney(c, em);
        else if (c.command == "strichartz") run_strichartz(c, em);
        else run_report(c, em);
    } catch (const std::exception& e) {
        // module preconditions surface as invalid_argument / domain_error
        err << "parasharp " << c.command << ": " << e.what() << '\n';
        return kExitConfig;
    }

    std::ostream& summary = c.out_path.empty() ? err : out;
    if (c.out_path.empty()) {
        out << to_csv(em.rows);
    } else {
        try {
            write_csv(em.rows, c.out_path);
        } catch (const std::exception& e) {
            err << "parasharp: " << e.what() << '\n';
            return kExitConfig;
        }
    }
    const auto failed = std::count_if(em.rows.begin(), em.rows.end(), [](const CsvRow& r) { return !r.pass; });
    for (const std::string& n : em.notes) summary << n << '\n';
    if (failed == 0)
        summary << "PASS: " << em.rows.size() << " rows\n";
    else
        summary << "FAIL: " << failed << " of " << em.rows.size() << " rows failed\n";
    return failed == 0 ? kExitPass : kExitFail;
}

}  // namespace parasharp
