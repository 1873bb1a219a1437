#include "parasharp/bilinear_tools.hpp"

#include "parasharp/extension.hpp"
#include "parasharp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace parasharp {

namespace {

double gen_width(int j) { return std::ldexp(1.0, -j); }

// generation-j index of s in [1, 2]; the last interval is closed
long index_of(int j, double s) {
    const long count = 1L << j;
    const long k = static_cast<long>(std::floor((s - 1.0) * static_cast<double>(count)));
    return std::clamp(k, 0L, count - 1);
}

double unit_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace

double WhitneyPair::lo() const { return 1.0 + static_cast<double>(k) * gen_width(j); }
double WhitneyPair::hi() const { return 1.0 + static_cast<double>(k + 1) * gen_width(j); }
double WhitneyPair::lo_p() const { return 1.0 + static_cast<double>(kp) * gen_width(j); }
double WhitneyPair::hi_p() const { return 1.0 + static_cast<double>(kp + 1) * gen_width(j); }
double WhitneyPair::separation() const { return std::max(lo_p() - hi(), lo() - hi_p()); }

bool whitney_related(int j, long k, long kp) {
    if (j < 1) return false;
    const long count = 1L << j;
    if (k < 0 || kp < 0 || k >= count || kp >= count) return false;
    return std::labs(k - kp) >= 2 && std::labs((k >> 1) - (kp >> 1)) == 1;
}

std::vector<WhitneyPair> whitney_decompose(int max_depth) {
    if (max_depth < 0 || max_depth > 20) throw std::invalid_argument("whitney_decompose: max_depth must lie in [0, 20]");
    std::vector<WhitneyPair> out;
    for (int j = 1; j <= max_depth; ++j) {
        const long count = 1L << j;
        for (long k = 0; k < count; ++k)
            for (long kp = std::max(0L, k - 3); kp <= std::min(count - 1, k + 3); ++kp)
                if (whitney_related(j, k, kp)) out.push_back({j, k, kp});
    }
    return out;
}

int whitney_cover_count(int max_depth, double s1, double s2) {
    if (max_depth < 0 || max_depth > 20) throw std::invalid_argument("whitney_cover_count: max_depth must lie in [0, 20]");
    int c = 0;
    for (int j = 1; j <= max_depth; ++j)
        if (whitney_related(j, index_of(j, s1), index_of(j, s2))) ++c;
    return c;
}

WhitneyReport whitney_check(int max_depth, int grid_side) {
    if (grid_side < 2) throw std::invalid_argument("whitney_check: grid_side must be >= 2");
    WhitneyReport rep;
    rep.max_depth = max_depth;
    const auto pairs = whitney_decompose(max_depth);
    rep.pair_count = pairs.size();
    rep.pairs_per_generation.assign(static_cast<std::size_t>(max_depth) + 1, 0);
    rep.symmetric = true;
    rep.separation_ok = true;
    std::vector<std::vector<int>> partners(static_cast<std::size_t>(max_depth) + 1);
    for (int j = 0; j <= max_depth; ++j) partners[static_cast<std::size_t>(j)].assign(std::size_t{1} << j, 0);
    for (const WhitneyPair& p : pairs) {
        ++rep.pairs_per_generation[static_cast<std::size_t>(p.j)];
        ++partners[static_cast<std::size_t>(p.j)][static_cast<std::size_t>(p.k)];
        if (!whitney_related(p.j, p.kp, p.k)) rep.symmetric = false;
        const double gap = p.separation(), w = gen_width(p.j);
        if (gap < w * (1 - 1e-12) || gap > 4 * w * (1 + 1e-12)) rep.separation_ok = false;
    }
    for (const auto& g : partners)
        for (int c : g) rep.max_partners = std::max(rep.max_partners, c);
    const double thresh = std::ldexp(1.0, -max_depth + 2);
    for (int a = 0; a < grid_side; ++a) {
        for (int b = 0; b < grid_side; ++b) {
            if (a == b) continue;
            const double s1 = 1.0 + (a + 0.5) / grid_side, s2 = 1.0 + (b + 0.5) / grid_side;
            ++rep.grid_points;
            const int c = whitney_cover_count(max_depth, s1, s2);
            rep.max_cover = std::max(rep.max_cover, c);
            if (std::fabs(s1 - s2) >= thresh && c == 0) ++rep.uncovered;
        }
    }
    return rep;
}

double arc_convolution_sup(int j, const WhitneyPair& pair, int grid_points) {
    if (pair.j != j || !whitney_related(j, pair.k, pair.kp))
        throw std::invalid_argument("arc_convolution_sup: pair is not a related pair of generation j");
    if (grid_points < 2) throw std::invalid_argument("arc_convolution_sup: grid_points must be >= 2");
    double sup = 0.0;
    for (int a = 0; a < grid_points; ++a) {
        const double s1 = pair.lo() + (pair.hi() - pair.lo()) * a / (grid_points - 1);
        for (int b = 0; b < grid_points; ++b) {
            const double s2 = pair.lo_p() + (pair.hi_p() - pair.lo_p()) * b / (grid_points - 1);
            // Jacobian of (s1 + s2, s1^2 + s2^2) is 2 (s2 - s1)
            sup = std::max(sup, 1.0 / (2.0 * std::fabs(s2 - s1)));
        }
    }
    return sup;
}

QuasiOrthoResult quasi_orthogonality_defect(int j, const QuasiOrthoOptions& opt) {
    if (j < 1 || j > 10) throw std::invalid_argument("quasi_orthogonality_defect: j must lie in [1, 10]");
    if (opt.trials < 1) throw std::invalid_argument("quasi_orthogonality_defect: trials must be positive");
    if (!(opt.t_max > 0.0) || !(opt.r_max > 0.0)) throw std::invalid_argument("quasi_orthogonality_defect: empty box");
    std::vector<std::pair<long, long>> active = opt.active;
    if (active.empty()) {
        for (const WhitneyPair& p : whitney_decompose(j))
            if (p.j == j && p.k < p.kp) active.emplace_back(p.k, p.kp);
    }
    const long count = 1L << j;
    for (const auto& [k, kp] : active)
        if (k < 0 || kp < 0 || k >= count || kp >= count || k == kp)
            throw std::invalid_argument("quasi_orthogonality_defect: bad active pair");
    std::vector<long> used;
    for (const auto& [k, kp] : active) {
        used.push_back(k);
        used.push_back(kp);
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    auto slot = [&](long k) { return static_cast<std::size_t>(std::lower_bound(used.begin(), used.end(), k) - used.begin()); };

    const Surface par = Surface::paraboloid();
    std::vector<ExtensionField> fields;
    fields.reserve(used.size());
    for (long k : used) {
        const double w = gen_width(j);
        fields.emplace_back(indicator_density(1.0 + static_cast<double>(k) * w, 1.0 + static_cast<double>(k + 1) * w),
                            par, opt.n);
    }

    // |S|^2 oscillates at most at t-frequency 6 and r-frequency 8 on [1, 2]
    const int order = 8;
    std::vector<double> tx, tw, rx, rw;
    append_composite(-opt.t_max, opt.t_max,
                     std::max(1, static_cast<int>(std::ceil(2 * opt.t_max * 6.0 / (opt.resolution * order)))), order, tx,
                     tw);
    append_composite(0.0, opt.r_max, std::max(1, static_cast<int>(std::ceil(opt.r_max * 8.0 / (opt.resolution * order)))),
                     order, rx, rw);

    // coefficients per trial
    const std::size_t T = static_cast<std::size_t>(opt.trials);
    std::vector<std::vector<double>> coef(T, std::vector<double>(used.size()));
    for (std::size_t tr = 0; tr < T; ++tr) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                          static_cast<std::uint32_t>(tr)};
        std::mt19937_64 g(seq);
        for (double& c : coef[tr]) {
            const double sign = (g() >> 63) ? 1.0 : -1.0;
            c = sign * (0.5 + unit_uniform(g));
        }
    }

    std::vector<std::size_t> pa, pb;
    for (const auto& [k, kp] : active) {
        pa.push_back(slot(k));
        pb.push_back(slot(kp));
    }
    std::vector<std::vector<double>> cc(T, std::vector<double>(active.size()));
    for (std::size_t tr = 0; tr < T; ++tr)
        for (std::size_t p = 0; p < active.size(); ++p) cc[tr][p] = coef[tr][pa[p]] * coef[tr][pb[p]];

    std::vector<double> num(T, 0.0), den(T, 0.0);
    const std::size_t nt = tx.size();
    const std::size_t chunk = 16;
    std::vector<std::vector<cplx>> vals(used.size());
    std::vector<cplx> S(T);
    std::vector<double> pair_sq(active.size());
    for (std::size_t r0 = 0; r0 < rx.size(); r0 += chunk) {
        const std::size_t nr = std::min(chunk, rx.size() - r0);
        const std::span<const double> rs(rx.data() + r0, nr);
        for (std::size_t f = 0; f < used.size(); ++f) {
            vals[f].resize(nt * nr);
            fields[f].eval_grid(tx, rs, vals[f]);
        }
        for (std::size_t kr = 0; kr < nr; ++kr) {
            const double wr = rw[r0 + kr] * std::pow(rx[r0 + kr], opt.n - 2.0);
            for (std::size_t it = 0; it < nt; ++it) {
                const double w = wr * tw[it];
                std::fill(S.begin(), S.end(), cplx{});
                for (std::size_t p = 0; p < active.size(); ++p) {
                    const cplx prod = vals[pa[p]][kr * nt + it] * vals[pb[p]][kr * nt + it];
                    pair_sq[p] = std::norm(prod);
                    for (std::size_t tr = 0; tr < T; ++tr) S[tr] += cc[tr][p] * prod;
                }
                for (std::size_t tr = 0; tr < T; ++tr) {
                    num[tr] += w * std::norm(S[tr]);
                    double d = 0.0;
                    for (std::size_t p = 0; p < active.size(); ++p) d += cc[tr][p] * cc[tr][p] * pair_sq[p];
                    den[tr] += w * d;
                }
            }
        }
    }
    QuasiOrthoResult res;
    res.pairs = active.size();
    for (std::size_t tr = 0; tr < T; ++tr) {
        res.ratios.push_back(num[tr] / den[tr]);
        res.max_ratio = std::max(res.max_ratio, res.ratios.back());
    }
    return res;
}

}  // namespace parasharp
