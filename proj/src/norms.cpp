#include "parasharp/norms.hpp"

#include "parasharp/quadrature.hpp"
#include "parasharp/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace parasharp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kOrder = 8;

void check_q(double q, const char* who) {
    if (std::isnan(q) || q < 1.0) {
        std::ostringstream os;
        os << who << ": q must lie in [1, inf], got " << q;
        throw std::invalid_argument(os.str());
    }
}

// Composite GL nodes with mean spacing <= resolution / freq and at least min_points nodes.
void axis_nodes(double lo, double hi, double freq, double resolution, int min_points, std::vector<double>& x,
                std::vector<double>& w) {
    x.clear();
    w.clear();
    if (!(hi > lo)) return;
    const double len = hi - lo;
    long panels = static_cast<long>(std::ceil(len * freq / (resolution * kOrder)));
    panels = std::max<long>({panels, 1, (min_points + kOrder - 1) / kOrder});
    append_composite(lo, hi, static_cast<int>(panels), kOrder, x, w);
}

double powq(double mod, double q) {
    if (q == 2.0) return mod * mod;
    if (q == 1.0) return mod;
    if (q == 4.0) {
        const double m2 = mod * mod;
        return m2 * m2;
    }
    return std::pow(mod, q);
}

struct BoxAccum {
    double sum = 0.0;  // int |u|^q r^{n-2} (no area)
    double sup = 0.0;
    double t_arg = 0.0;
    double r_arg = 0.0;
};

// Tensor-grid accumulation over [t_lo, t_hi] x r-nodes, one accumulator per exponent.
void accumulate_box(const Field& u, const std::vector<double>& qs, int n, double t_lo, double t_hi,
                    const std::vector<double>& rx, const std::vector<double>& rw, const GridSpec& g, int t_min_points,
                    std::vector<BoxAccum>& accs) {
    std::vector<double> tx, tw;
    axis_nodes(t_lo, t_hi, u.t_frequency(), g.resolution, t_min_points, tx, tw);
    const std::size_t nr = rx.size(), nq = qs.size();
    std::vector<double> rfac(nr);
    for (std::size_t k = 0; k < nr; ++k) rfac[k] = rw[k] * std::pow(rx[k], n - 2.0);
    const std::size_t chunk = static_cast<std::size_t>(std::max(kOrder, g.chunk_points / kOrder * kOrder));
    std::vector<cplx> vals;
    std::vector<std::vector<double>> partial(nq);
    std::vector<double> row(nq);
    for (std::size_t c0 = 0; c0 < tx.size(); c0 += chunk) {
        const std::size_t nc = std::min(chunk, tx.size() - c0);
        vals.resize(nc * nr);
        u.eval_grid(std::span<const double>(tx.data() + c0, nc), rx, vals);
        for (std::size_t k = 0; k < nr; ++k) {
            std::fill(row.begin(), row.end(), 0.0);
            for (std::size_t i = 0; i < nc; ++i) {
                const double mod = std::abs(vals[k * nc + i]);
                for (std::size_t j = 0; j < nq; ++j) {
                    if (std::isinf(qs[j])) {
                        if (mod > accs[j].sup) {
                            accs[j].sup = mod;
                            accs[j].t_arg = tx[c0 + i];
                            accs[j].r_arg = rx[k];
                        }
                    } else {
                        row[j] += tw[c0 + i] * powq(mod, qs[j]);
                    }
                }
            }
            for (std::size_t j = 0; j < nq; ++j) partial[j].push_back(row[j] * rfac[k]);
        }
    }
    for (std::size_t j = 0; j < nq; ++j) accs[j].sum += pairwise_sum(partial[j]);
}

// One local pass on a 9x9 grid around the current argmax.
double refine_sup(const Field& u, double t_c, double r_c, double dt, double dr, double current) {
    std::vector<double> tt, rr;
    for (int i = -4; i <= 4; ++i) tt.push_back(t_c + dt * i / 4.0);
    for (int k = -4; k <= 4; ++k) {
        const double r = r_c + dr * k / 4.0;
        if (r >= 0.0) rr.push_back(r);
    }
    std::vector<cplx> vals(tt.size() * rr.size());
    u.eval_grid(tt, rr, vals);
    double best = current;
    for (const cplx& v : vals) best = std::max(best, std::abs(v));
    return best;
}

std::vector<NormResult> annulus_impl(const Field& u, const std::vector<double>& qs, double R, int n,
                                     const GridSpec& g) {
    for (double q : qs) check_q(q, "lq_annulus_norm");
    BesselOrder::for_dimension(n);
    g.validate();
    if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("lq_annulus_norm: R must be positive");
    const double area = sphere_area(n);
    const double r_lo = R / 2, r_hi = R;
    std::vector<double> rx, rw;
    axis_nodes(r_lo, r_hi, u.r_frequency(), g.resolution, g.r_points, rx, rw);
    const double W = g.t_halfwidth > 0.0 ? g.t_halfwidth : 8.0 * R;
    const double c = g.t_center;
    const std::size_t nq = qs.size();

    std::vector<BoxAccum> acc(nq);
    accumulate_box(u, qs, n, c - W, c + W, rx, rw, g, g.t_points, acc);
    auto value_of = [&](std::size_t j) {
        return std::isinf(qs[j]) ? acc[j].sup : std::pow(area * acc[j].sum, 1.0 / qs[j]);
    };
    std::vector<NormResult> res(nq);
    std::vector<double> half_at(nq, W);
    for (std::size_t j = 0; j < nq; ++j) {
        res[j].value = value_of(j);
        res[j].tail_estimate = std::numeric_limits<double>::infinity();
    }
    // each exponent keeps the state of the doubling at which it converged
    double half = W;
    for (int d = 1; d <= g.tail_doublings; ++d) {
        if (std::all_of(res.begin(), res.end(), [](const NormResult& r) { return r.converged; })) break;
        // new pieces use the same node density as the first window
        const int pts = std::max(kOrder, static_cast<int>(std::ceil(g.t_points * 0.5 * half / W)));
        accumulate_box(u, qs, n, c - 2 * half, c - half, rx, rw, g, pts, acc);
        accumulate_box(u, qs, n, c + half, c + 2 * half, rx, rw, g, pts, acc);
        half *= 2;
        for (std::size_t j = 0; j < nq; ++j) {
            if (res[j].converged) continue;
            const double prev = res[j].value;
            res[j].value = value_of(j);
            res[j].doublings = d;
            res[j].tail_estimate = std::fabs(res[j].value - prev);
            half_at[j] = half;
            if (res[j].tail_estimate <= g.tail_fraction * res[j].value) res[j].converged = true;
        }
    }
    for (std::size_t j = 0; j < nq; ++j) {
        if (std::isinf(qs[j]) && res[j].value > 0.0) {
            const double dt = g.resolution / std::max(u.t_frequency(), 1e-300);
            const double dr = g.resolution / std::max(u.r_frequency(), 1e-300);
            res[j].value =
                refine_sup(u, acc[j].t_arg, acc[j].r_arg, std::min(dt, half_at[j]), std::min(dr, R / 2), res[j].value);
        }
    }
    return res;
}

// Sutherland-Hodgman clip against x*a + y*b >= c.
using Pt = std::pair<double, double>;
std::vector<Pt> clip(const std::vector<Pt>& poly, double a, double b, double c) {
    std::vector<Pt> out;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Pt& P = poly[i];
        const Pt& Q = poly[(i + 1) % m];
        const double fp = a * P.first + b * P.second - c;
        const double fq = a * Q.first + b * Q.second - c;
        if (fp >= 0) out.push_back(P);
        if ((fp >= 0) != (fq >= 0)) {
            const double s = fp / (fp - fq);
            out.push_back({P.first + s * (Q.first - P.first), P.second + s * (Q.second - P.second)});
        }
    }
    return out;
}

constexpr double kBig = 1e12;

}  // namespace

void GridSpec::validate() const {
    if (t_points < 16 || r_points < 16) throw std::invalid_argument("GridSpec: t_points and r_points must be >= 16");
    if (tail_doublings < 0) throw std::invalid_argument("GridSpec: tail_doublings must be >= 0");
    if (!(tail_fraction > 0.0)) throw std::invalid_argument("GridSpec: tail_fraction must be positive");
    if (!(resolution > 0.0) || resolution > kPi / 4 + 1e-15)
        throw std::invalid_argument("GridSpec: resolution must lie in (0, pi/4]");
    if (t_halfwidth < 0.0 || !std::isfinite(t_halfwidth)) throw std::invalid_argument("GridSpec: bad t_halfwidth");
    if (chunk_points < 8) throw std::invalid_argument("GridSpec: chunk_points must be >= 8");
}

NormResult lq_annulus_norm(const Field& u, double q, double R, int n, const GridSpec& grid) {
    return annulus_impl(u, {q}, R, n, grid).front();
}

std::vector<NormResult> lq_annulus_norms(const Field& u, const std::vector<double>& qs, double R, int n,
                                         const GridSpec& grid) {
    if (qs.empty()) throw std::invalid_argument("lq_annulus_norms: no exponents");
    return annulus_impl(u, qs, R, n, grid);
}

NormResult bilinear_product_norm(const Field& u, const Field& v, double q, double R, int n, const GridSpec& grid) {
    const ProductField uv(u, v);
    return annulus_impl(uv, {q}, R, n, grid).front();
}

double box_power_integral(const Field& u, double q, int n, double t_lo, double t_hi, double r_lo, double r_hi,
                          const GridSpec& grid) {
    check_q(q, "box_power_integral");
    grid.validate();
    if (!(t_hi > t_lo) || !(r_hi > r_lo) || r_lo < 0.0) throw std::invalid_argument("box_power_integral: empty box");
    std::vector<double> rx, rw;
    axis_nodes(r_lo, r_hi, u.r_frequency(), grid.resolution, grid.r_points, rx, rw);
    std::vector<BoxAccum> acc(1);
    accumulate_box(u, {q}, n, t_lo, t_hi, rx, rw, grid, grid.t_points, acc);
    return std::isinf(q) ? acc[0].sup : sphere_area(n) * acc[0].sum;
}

namespace {
std::vector<Pt> clip_all(std::vector<Pt> poly, const std::vector<AffineConstraint>& cs) {
    for (const AffineConstraint& c : cs) {
        poly = clip(poly, c.a, c.b, c.lo);
        if (poly.empty()) return poly;
        poly = clip(poly, -c.a, -c.b, -c.hi);
        if (poly.empty()) return poly;
    }
    return poly;
}
}  // namespace

std::vector<std::pair<double, double>> ProbeWindow::polygon() const {
    const auto rough = clip_all({{-kBig, -kBig}, {kBig, -kBig}, {kBig, kBig}, {-kBig, kBig}}, constraints);
    if (rough.empty()) return rough;
    // second pass from a tight box so intersections are computed at the window's own scale
    double x0 = rough[0].first, x1 = x0, y0 = rough[0].second, y1 = y0;
    for (const auto& v : rough) {
        x0 = std::min(x0, v.first);
        x1 = std::max(x1, v.first);
        y0 = std::min(y0, v.second);
        y1 = std::max(y1, v.second);
    }
    if (std::max({std::fabs(x0), std::fabs(x1), std::fabs(y0), std::fabs(y1)}) > 0.5 * kBig) return rough;
    const double mx = 0.01 * (x1 - x0) + 1e-9 * (1 + std::fabs(x0) + std::fabs(x1));
    const double my = 0.01 * (y1 - y0) + 1e-9 * (1 + std::fabs(y0) + std::fabs(y1));
    x0 -= mx;
    x1 += mx;
    y0 -= my;
    y1 += my;
    return clip_all({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, constraints);
}

double ProbeWindow::area() const {
    const auto p = polygon();
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& A = p[i];
        const auto& B = p[(i + 1) % p.size()];
        s += A.first * B.second - B.first * A.second;
    }
    return 0.5 * std::fabs(s);
}

void ProbeWindow::validate() const {
    for (const AffineConstraint& c : constraints) {
        if (!std::isfinite(c.a) || !std::isfinite(c.b) || !std::isfinite(c.lo) || !std::isfinite(c.hi))
            throw std::invalid_argument("ProbeWindow: constraint bounds must be finite");
        if (c.lo > c.hi) throw std::invalid_argument("ProbeWindow: constraint with lo > hi");
    }
    const auto p = polygon();
    if (p.empty()) throw std::invalid_argument("ProbeWindow: empty feasible region");
    for (const auto& v : p)
        if (std::fabs(v.first) > 0.5 * kBig || std::fabs(v.second) > 0.5 * kBig)
            throw std::invalid_argument("ProbeWindow: feasible region is unbounded");
}

double probe_lower_bound(const Field& u, double q, const ProbeWindow& window, int n, const GridSpec& grid) {
    check_q(q, "probe_lower_bound");
    BesselOrder::for_dimension(n);
    grid.validate();
    window.validate();
    if (window.area() <= 0.0) return 0.0;
    const auto poly = window.polygon();
    // rho = r - r0 break values at the vertices
    std::vector<double> rho_breaks;
    for (const auto& v : poly) rho_breaks.push_back(v.second);
    std::sort(rho_breaks.begin(), rho_breaks.end());
    rho_breaks.erase(std::unique(rho_breaks.begin(), rho_breaks.end()), rho_breaks.end());
    const double rho_lo = rho_breaks.front(), rho_hi = rho_breaks.back();
    const double rho_len = rho_hi - rho_lo;
    std::vector<double> rx, rw;
    for (std::size_t i = 0; i + 1 < rho_breaks.size(); ++i) {
        std::vector<double> x, w;
        const double share = (rho_breaks[i + 1] - rho_breaks[i]) / rho_len;
        axis_nodes(rho_breaks[i], rho_breaks[i + 1], u.r_frequency(), grid.resolution,
                   std::max(kOrder, static_cast<int>(std::ceil(grid.r_points * share))), x, w);
        rx.insert(rx.end(), x.begin(), x.end());
        rw.insert(rw.end(), w.begin(), w.end());
    }
    const double area = sphere_area(n);
    double tau_lo = std::numeric_limits<double>::infinity(), tau_hi = -tau_lo, tau_extent = 0.0;
    for (const auto& v : poly) {
        tau_lo = std::min(tau_lo, v.first);
        tau_hi = std::max(tau_hi, v.first);
        tau_extent = std::max(tau_extent, std::fabs(v.first));
    }
    // Slices share a lattice of t panels; only the two end pieces of a slice are slice-specific.
    double h = grid.resolution * kOrder / u.t_frequency();
    if (tau_extent > 0.0) h = std::min(h, 2 * tau_extent * kOrder / grid.t_points);
    if (tau_hi > tau_lo) h = std::min(h, tau_hi - tau_lo);
    if (!(h > 0.0) || !std::isfinite(h)) h = 1.0;
    auto lattice = [&](long i) { return tau_lo + static_cast<double>(i) * h; };
    std::vector<double> r_rows, row_w;
    std::vector<std::vector<double>> t_rows, w_rows;
    std::vector<double> x, w;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        const double rho = rx[k];
        const double r = window.r0 + rho;
        if (r < 0.0) continue;
        // slice of the polygon at this rho
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const auto& A = poly[i];
            const auto& B = poly[(i + 1) % poly.size()];
            if ((A.second - rho) * (B.second - rho) > 0.0) continue;
            if (A.second == B.second) {
                lo = std::min({lo, A.first, B.first});
                hi = std::max({hi, A.first, B.first});
            } else {
                const double s = (rho - A.second) / (B.second - A.second);
                const double xx = A.first + s * (B.first - A.first);
                lo = std::min(lo, xx);
                hi = std::max(hi, xx);
            }
        }
        if (!(hi > lo)) continue;
        std::vector<double> tr, wr;
        auto piece = [&](double a, double b, int panels) {
            if (!(b - a > 1e-12 * h)) return;
            x.clear();
            w.clear();
            append_composite(window.t0 + a, window.t0 + b, panels, kOrder, x, w);
            tr.insert(tr.end(), x.begin(), x.end());
            wr.insert(wr.end(), w.begin(), w.end());
        };
        const long ia = static_cast<long>(std::ceil((lo - tau_lo) / h));
        const long ib = static_cast<long>(std::floor((hi - tau_lo) / h));
        if (ia >= ib) {
            piece(lo, hi, static_cast<int>(std::max(1.0, std::ceil((hi - lo) / h))));
        } else {
            piece(lo, lattice(ia), 1);
            for (long i = ia; i < ib; ++i) piece(lattice(i), lattice(i + 1), 1);
            piece(lattice(ib), hi, 1);
        }
        r_rows.push_back(r);
        row_w.push_back(rw[k] * std::pow(r, n - 2.0));
        t_rows.push_back(std::move(tr));
        w_rows.push_back(std::move(wr));
    }
    std::vector<std::vector<cplx>> vals;
    u.eval_rows(r_rows, t_rows, vals);
    std::vector<double> partial;
    double sup = 0.0;
    for (std::size_t k = 0; k < r_rows.size(); ++k) {
        double row = 0.0;
        for (std::size_t i = 0; i < vals[k].size(); ++i) {
            const double mod = std::abs(vals[k][i]);
            if (std::isinf(q))
                sup = std::max(sup, mod);
            else
                row += w_rows[k][i] * powq(mod, q);
        }
        partial.push_back(row * row_w[k]);
    }
    if (std::isinf(q)) return sup;
    return std::pow(area * pairwise_sum(partial), 1.0 / q);
}

double probe_lower_bound(const Field& u, const Field& v, double q, const ProbeWindow& window, int n,
                         const GridSpec& grid) {
    const ProductField uv(u, v);
    return probe_lower_bound(uv, q, window, n, grid);
}

double time_l2_squared(const ExtensionField& u, double r) {
    const RadialDensity& d = u.density();
    const Surface& S = u.surface();
    const int n = u.dimension();
    const auto br = d.breakpoints();
    std::vector<double> x, w;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const long panels = std::max(1L, static_cast<long>(std::ceil((br[i + 1] - br[i]) * 2 * r / kPi)));
        append_composite(br[i], br[i + 1], static_cast<int>(panels), kOrder, x, w);
    }
    std::vector<double> terms(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double s = x[j];
        const double g = d.amplitude(s) * sphere_measure_ft(n, r * s) * std::pow(s, n - 2.0);
        terms[j] = w[j] * g * g / std::fabs(S.da(s));
    }
    return 2 * kPi * pairwise_sum(terms);
}

double annulus_l2_plancherel(const ExtensionField& u, double r_lo, double r_hi, double weight_power) {
    if (!(r_hi > r_lo) || r_lo < 0.0) throw std::invalid_argument("annulus_l2_plancherel: bad r-range");
    const RadialDensity& d = u.density();
    const Surface& S = u.surface();
    const int n = u.dimension();
    const auto br = d.breakpoints();
    std::vector<double> sx, sw;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const long panels = std::max(1L, static_cast<long>(std::ceil((br[i + 1] - br[i]) * 2 * r_hi / kPi)));
        append_composite(br[i], br[i + 1], static_cast<int>(panels), kOrder, sx, sw);
    }
    std::vector<double> rx, rw;
    {
        const long panels = std::max(1L, static_cast<long>(std::ceil((r_hi - r_lo) * 2 * d.s_hi / kPi)));
        append_composite(r_lo, r_hi, static_cast<int>(panels), kOrder, rx, rw);
    }
    std::vector<double> rfac(rx.size());
    for (std::size_t k = 0; k < rx.size(); ++k) rfac[k] = rw[k] * std::pow(rx[k], n - 2.0 + weight_power);
    std::vector<double> terms(sx.size());
    for (std::size_t j = 0; j < sx.size(); ++j) {
        const double s = sx[j];
        double inner = 0.0;
        for (std::size_t k = 0; k < rx.size(); ++k) {
            const double g = sphere_measure_ft(n, rx[k] * s);
            inner += rfac[k] * g * g;
        }
        const double a = d.amplitude(s) * std::pow(s, n - 2.0);
        terms[j] = sw[j] * a * a / std::fabs(S.da(s)) * inner;
    }
    return std::sqrt(sphere_area(n) * 2 * kPi * pairwise_sum(terms));
}

}  // namespace parasharp
