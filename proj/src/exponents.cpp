#include "parasharp/exponents.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace parasharp {

std::string theorem_name(Theorem t) { return t == Theorem::Linear ? "linear" : "bilinear"; }

std::string line_name(Line l) {
    switch (l) {
        case Line::Q1: return "q1";
        case Line::Q2: return "q2";
        case Line::Q4: return "q4";
        case Line::Q3pPrime: return "q3pprime";
        case Line::QInf: return "qinf";
    }
    return "?";
}

// ---- Rational

namespace {
std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("Rational: overflow");
    return r;
}
std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Rational: overflow");
    return r;
}
}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

Rational operator+(Rational a, Rational b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    const std::int64_t den = checked_mul(a.den_ / g, b.den_);
    return Rational(checked_add(checked_mul(a.num_, b.den_ / g), checked_mul(b.num_, a.den_ / g)), den);
}
Rational operator-(Rational a, Rational b) { return a + (-b); }
Rational operator*(Rational a, Rational b) {
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const std::int64_t d1 = g1 == 0 ? 1 : g1, d2 = g2 == 0 ? 1 : g2;
    return Rational(checked_mul(a.num_ / d1, b.num_ / d2), checked_mul(a.den_ / d2, b.den_ / d1));
}
Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return a * Rational(b.den_, b.num_);
}
bool operator<(Rational a, Rational b) { return (a - b).num_ < 0; }
std::ostream& operator<<(std::ostream& os, Rational r) {
    os << r.num_;
    if (r.den_ != 1) os << '/' << r.den_;
    return os;
}

// ---- tables

namespace {

// Scalar helpers so one template serves Rational and double.
template <class T> T mk(std::int64_t a, std::int64_t b = 1);
template <> Rational mk<Rational>(std::int64_t a, std::int64_t b) { return Rational(a, b); }
template <> double mk<double>(std::int64_t a, std::int64_t b) { return static_cast<double>(a) / static_cast<double>(b); }

template <class T>
bool leq(T a, T b) {
    if constexpr (std::is_same_v<T, double>) return a <= b + 1e-12;
    else return a <= b;
}

enum class Branch { A, B, C };

Branch branch_of(Theorem th, Regime g) {
    if (th == Theorem::Linear) return g == Regime::SmallR ? Branch::B : Branch::A;
    switch (g) {
        case Regime::LargeR: return Branch::A;
        case Regime::MidR: return Branch::B;
        case Regime::SmallR: return Branch::C;
    }
    return Branch::A;
}

template <class T>
ExponentPair<T> line_value(Theorem th, Line line, T x, int nn, Branch b) {
    const T n = mk<T>(nn), one = mk<T>(1), half = mk<T>(1, 2);
    if (th == Theorem::Linear) {
        const T zero = mk<T>(0);
        switch (line) {
            case Line::Q2: return {b == Branch::A ? half : (n - one) / mk<T>(2), zero};
            case Line::Q4: return {b == Branch::A ? -(n - mk<T>(2)) / mk<T>(4) : (n - one) / mk<T>(4), zero};
            case Line::Q3pPrime: {
                const T y = (one - x) / mk<T>(3);
                return {b == Branch::A ? (n - mk<T>(2)) * (y - half) : (n - one) * y, zero};
            }
            case Line::QInf: return {b == Branch::A ? -(n - mk<T>(2)) / mk<T>(2) : zero, zero};
            case Line::Q1: break;
        }
        throw std::domain_error("linear theorem has no q=1 line");
    }
    const T dual = (n - one) * (one - x);  // (n-1)/p'
    const T y3 = (one - x) / mk<T>(3);
    switch (line) {
        case Line::Q1:
            if (b == Branch::A) return {one, (n - mk<T>(2)) / mk<T>(2) - (n - one) * x};
            if (b == Branch::B) return {n / mk<T>(2), -one + dual};
            return {n - one, -one + dual};
        case Line::Q2:
            if (b == Branch::A) return {-(n - mk<T>(2)) / mk<T>(2), (n - one) / mk<T>(2) - (n - one) * x};
            if (b == Branch::B) return {half, dual};
            return {(n - one) / mk<T>(2), dual};
        case Line::Q4:
            if (b == Branch::A) return {-mk<T>(3) * (n - mk<T>(2)) / mk<T>(4), n / mk<T>(2) - (n - one) * x};
            if (b == Branch::B) return {-(n - mk<T>(2)) / mk<T>(4), dual};
            return {(n - one) / mk<T>(4), dual};
        case Line::Q3pPrime:
            if (b == Branch::A) return {-(n - mk<T>(2)) * (one - y3), n / mk<T>(2) - (n - one) * x};
            if (b == Branch::B) return {(n - mk<T>(2)) * (y3 - half), dual};
            return {(n - one) * y3, dual};
        case Line::QInf:
            if (b == Branch::A) return {-(n - mk<T>(2)), n / mk<T>(2) - (n - one) * x};
            if (b == Branch::B) return {-(n - mk<T>(2)) / mk<T>(2), dual};
            return {mk<T>(0), dual};
    }
    return {};
}

// Admissible x-range of each line (closed unless noted).
template <class T>
void check_line_range(Theorem th, Line line, T x) {
    const T zero = mk<T>(0), one = mk<T>(1);
    bool ok = leq(zero, x) && leq(x, one);
    switch (line) {
        case Line::Q1:
        case Line::Q2: ok = ok && leq(x, mk<T>(1, 2)); break;
        case Line::Q4: ok = ok && leq(x, mk<T>(1, 4)); break;
        case Line::Q3pPrime: ok = ok && mk<T>(1, 4) < x; break;
        case Line::QInf: break;
    }
    if (th == Theorem::Linear && line == Line::Q1) ok = false;
    if (!ok) {
        std::ostringstream os;
        os << theorem_name(th) << " " << line_name(line) << ": 1/p outside the line's range";
        throw std::domain_error(os.str());
    }
}

struct Vertex {
    Rational x, y;
    Line line;
};

struct RegionDef {
    const char* label;
    std::vector<Vertex> v;  // counter-clockwise
};

const std::vector<RegionDef>& regions(Theorem th) {
    const Rational z(0), h(1, 2), q(1, 4), o(1);
    static const std::vector<RegionDef> lin = {
        {"I", {{h, h, Line::Q2}, {q, q, Line::Q4}, {o, z, Line::QInf}}},
        {"II", {{z, q, Line::Q4}, {q, q, Line::Q4}, {h, h, Line::Q2}, {z, h, Line::Q2}}},
        {"III", {{z, z, Line::QInf}, {o, z, Line::QInf}, {q, q, Line::Q4}, {z, q, Line::Q4}}},
    };
    static const std::vector<RegionDef> bil = {
        {"I", {{h, h, Line::Q2}, {o, z, Line::QInf}, {h, o, Line::Q1}}},
        {"II", {{z, h, Line::Q2}, {h, h, Line::Q2}, {h, o, Line::Q1}, {z, o, Line::Q1}}},
        {"III", {{z, q, Line::Q4}, {q, q, Line::Q4}, {h, h, Line::Q2}, {z, h, Line::Q2}}},
        {"IV", {{q, q, Line::Q4}, {o, z, Line::QInf}, {h, h, Line::Q2}}},
        {"V", {{z, z, Line::QInf}, {o, z, Line::QInf}, {q, q, Line::Q4}, {z, q, Line::Q4}}},
    };
    return th == Theorem::Linear ? lin : bil;
}

template <class T>
T conv(Rational r) {
    if constexpr (std::is_same_v<T, double>) return r.to_double();
    else return r;
}

template <class T>
T cross(T ax, T ay, T bx, T by, T px, T py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Barycentric weights of p in triangle (a, b, c); nullopt-like flag when outside.
template <class T>
bool barycentric(const Vertex& a, const Vertex& b, const Vertex& c, T px, T py, std::array<T, 3>& w) {
    const T ax = conv<T>(a.x), ay = conv<T>(a.y), bx = conv<T>(b.x), by = conv<T>(b.y), cx = conv<T>(c.x),
            cy = conv<T>(c.y);
    const T area = cross(ax, ay, bx, by, cx, cy);
    w[0] = cross(bx, by, cx, cy, px, py) / area;
    w[1] = cross(cx, cy, ax, ay, px, py) / area;
    w[2] = cross(ax, ay, bx, by, px, py) / area;
    const T zero = mk<T>(0);
    return leq(zero, w[0]) && leq(zero, w[1]) && leq(zero, w[2]);
}

template <class T>
void check_domain(Theorem th, T x, T y) {
    const T zero = mk<T>(0), one = mk<T>(1), two = mk<T>(2);
    bool ok = leq(zero, x) && leq(x, one) && leq(zero, y);
    if (th == Theorem::Linear) ok = ok && leq(y, mk<T>(1, 2)) && leq(x + y, one);
    else ok = ok && leq(y, one) && leq(two * x + y, two);
    if (!ok) {
        std::ostringstream os;
        os << theorem_name(th) << " exponents: (1/p, 1/q) = (" << x << ", " << y << ") lies outside the theorem's region";
        throw std::domain_error(os.str());
    }
}

template <class T>
ExponentPair<T> interpolate(Theorem th, T x, T y, int n, Branch b, std::string* label) {
    check_domain(th, x, y);
    for (const RegionDef& reg : regions(th)) {
        for (std::size_t k = 1; k + 1 < reg.v.size(); ++k) {
            const Vertex& a = reg.v[0];
            const Vertex& bb = reg.v[k];
            const Vertex& c = reg.v[k + 1];
            std::array<T, 3> w{};
            if (!barycentric(a, bb, c, x, y, w)) continue;
            if (label) *label = reg.label;
            ExponentPair<T> out{mk<T>(0), mk<T>(0)};
            const Vertex* vs[3] = {&a, &bb, &c};
            for (int i = 0; i < 3; ++i) {
                const ExponentPair<T> lv = line_value<T>(th, vs[i]->line, conv<T>(vs[i]->x), n, b);
                out.R = out.R + w[i] * lv.R;
                out.M = out.M + w[i] * lv.M;
            }
            return out;
        }
    }
    throw std::domain_error("exponent table: point not covered by any region");
}

void check_n(int n) {
    if (n < 3) throw std::invalid_argument("exponent table: n must be >= 3");
}

}  // namespace

ExponentPair<Rational> line_exponent(Theorem th, Line line, Rational x, int n, Regime g) {
    check_n(n);
    check_line_range(th, line, x);
    return line_value<Rational>(th, line, x, n, branch_of(th, g));
}

std::string region_of(Theorem th, Rational x, Rational y) {
    std::string label;
    interpolate<Rational>(th, x, y, 3, Branch::A, &label);
    return label;
}

std::string region_of(Theorem th, double x, double y) {
    std::string label;
    interpolate<double>(th, x, y, 3, Branch::A, &label);
    return label;
}

ExponentPair<Rational> exponent_exact(Theorem th, Rational x, Rational y, int n, Regime g) {
    check_n(n);
    return interpolate<Rational>(th, x, y, n, branch_of(th, g), nullptr);
}

std::pair<double, double> theoretical_exponent(Theorem th, double q, double p, int n, Regime g) {
    check_n(n);
    if (!(p >= 1.0) || !(q >= 1.0)) throw std::domain_error("exponent table: p and q must lie in [1, inf]");
    const double x = std::isinf(p) ? 0.0 : 1.0 / p;
    const double y = std::isinf(q) ? 0.0 : 1.0 / q;
    const ExponentPair<double> e = interpolate<double>(th, x, y, n, branch_of(th, g), nullptr);
    return {e.R, e.M};
}

bool bilinear_continuous_at_inverse_M(Rational x, Rational y, int n) {
    const auto a = exponent_exact(Theorem::Bilinear, x, y, n, Regime::LargeR);
    const auto b = exponent_exact(Theorem::Bilinear, x, y, n, Regime::MidR);
    // R = M^{-1}: R^e M^f = M^{f - e}
    return a.M - a.R == b.M - b.R;
}

bool bilinear_continuous_at_unit_R(Rational x, Rational y, int n) {
    const auto b = exponent_exact(Theorem::Bilinear, x, y, n, Regime::MidR);
    const auto c = exponent_exact(Theorem::Bilinear, x, y, n, Regime::SmallR);
    return b.M == c.M;
}

bool linear_continuous_at_unit_R(Rational x, Rational y, int n) {
    const auto a = exponent_exact(Theorem::Linear, x, y, n, Regime::LargeR);
    const auto b = exponent_exact(Theorem::Linear, x, y, n, Regime::SmallR);
    // at log2 R = 0 only the M coefficients survive
    return a.M == b.M;
}

double step_alpha(double R, double q, int n) {
    check_n(n);
    const double crit = 2.0 * n / (n - 1.0);
    if (!(q > crit)) {
        std::ostringstream os;
        os << "step_alpha: q must exceed 2n/(n-1) = " << crit << ", got " << q;
        throw std::domain_error(os.str());
    }
    if (!(R > 0.0)) throw std::domain_error("step_alpha: R must be positive");
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    if (R >= 2.0) return -(n - 2.0) / 2.0 * (1.0 - 2.0 * n * inv_q / (n - 1.0));
    if (R <= 1.0) return (n - 1.0) * inv_q;
    throw std::domain_error("step_alpha: R must be dyadic (R <= 1 or R >= 2)");
}

SchurResult schur_sum_check(double q, double p, int n, int truncation, double R_fixed, double M_fixed) {
    check_n(n);
    const double crit = 2.0 * n / (n - 1.0);
    if (!(q > crit)) throw std::domain_error("schur_sum_check: q must exceed 2n/(n-1)");
    if (!(p >= 1.0) || !(p < crit)) throw std::domain_error("schur_sum_check: p must lie in [1, 2n/(n-1))");
    if (truncation < 1) throw std::invalid_argument("schur_sum_check: truncation must be >= 1");
    if (!is_dyadic(R_fixed) || !is_dyadic(M_fixed)) throw std::invalid_argument("schur_sum_check: R, M must be dyadic");
    auto term = [&](double x) { return std::pow(x, step_alpha(x, q, n)); };
    SchurResult res;
    std::vector<double> over_M, over_R;
    for (int k = -truncation; k <= truncation; ++k) {
        over_M.push_back(term(R_fixed * std::ldexp(1.0, k)));
        over_R.push_back(term(std::ldexp(1.0, k) * M_fixed));
    }
    for (double v : over_M) res.sum_over_M += v;
    for (double v : over_R) res.sum_over_R += v;
    // ratios measured on the outermost terms of the M sum
    const std::size_t last = over_M.size() - 1;
    res.ratio_high = over_M[last] / over_M[last - 1];
    res.ratio_low = over_M[0] / over_M[1];
    res.converged = res.ratio_high < 1.0 && res.ratio_low < 1.0;
    if (res.converged) {
        const double tail_hi = std::max(over_M[last], over_R[last]) * res.ratio_high / (1.0 - res.ratio_high);
        const double tail_lo = std::max(over_M[0], over_R[0]) * res.ratio_low / (1.0 - res.ratio_low);
        res.tail_estimate = tail_hi + tail_lo;
    } else {
        res.tail_estimate = std::numeric_limits<double>::infinity();
    }
    return res;
}

}  // namespace parasharp
