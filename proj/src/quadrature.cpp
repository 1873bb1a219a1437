#include "parasharp/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace parasharp {

namespace {

template <unsigned N>
GaussRule from_boost() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    GaussRule rule;
    // boost stores the non-negative half; zero first when N is odd.
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] == 0.0) continue;
        rule.x.push_back(-a[i]);
        rule.w.push_back(w[i]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        rule.x.push_back(a[i]);
        rule.w.push_back(w[i]);
    }
    return rule;
}

GaussRule build_rule(int order) {
    switch (order) {
        case 4: return from_boost<4>();
        case 6: return from_boost<6>();
        case 8: return from_boost<8>();
        case 12: return from_boost<12>();
        case 16: return from_boost<16>();
        case 20: return from_boost<20>();
        case 32: return from_boost<32>();
        default: throw std::invalid_argument("gauss_legendre: unsupported order");
    }
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
    return it->second;
}

void append_composite(double lo, double hi, int panels, int order, std::vector<double>& nodes,
                      std::vector<double>& weights) {
    if (panels < 1) panels = 1;
    const GaussRule& g = gauss_legendre(order);
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * h;
        const double b = (p + 1 == panels) ? hi : a + h;
        const double c = 0.5 * (a + b);
        const double d = 0.5 * (b - a);
        for (int k = 0; k < order; ++k) {
            nodes.push_back(c + d * g.x[k]);
            weights.push_back(d * g.w[k]);
        }
    }
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t mid = v.size() / 2;
    return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        ss += e * e;
    }
    f.residual_rms = std::sqrt(ss / n);
    return f;
}

}  // namespace parasharp
