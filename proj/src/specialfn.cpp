#include "parasharp/specialfn.hpp"

#include "parasharp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace parasharp {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_argument(double r, const char* who) {
    if (!std::isfinite(r)) {
        std::ostringstream os;
        os << who << ": non-finite argument";
        throw std::invalid_argument(os.str());
    }
    if (r < 0.0) {
        std::ostringstream os;
        os << who << ": negative argument " << r;
        throw std::invalid_argument(os.str());
    }
}

double crossover(double m) { return std::max(12.0, 2.0 * m * m); }

// sum_k (-1)^k (r/2)^{2k} / (k! Gamma(k+m+1)), i.e. (r/2)^{-m} J_m(r).
long double reduced_series(double m, double r) {
    const long double h2 = 0.25L * static_cast<long double>(r) * r;
    long double term = 1.0L / std::tgamma(static_cast<long double>(m) + 1.0L);
    long double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= -h2 / (static_cast<long double>(k) * (k + m));
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum) && k > r) break;
    }
    return sum;
}

// Spherical closed form via upward recurrence, valid for r above the order.
double half_integer_large(double m, double r) {
    const int l = static_cast<int>(std::lround(m - 0.5));
    const double s = std::sin(r);
    const double c = std::cos(r);
    double j0 = s / r;
    if (l == 0) return std::sqrt(2.0 * r / kPi) * j0;
    double j1 = s / (r * r) - c / r;
    for (int k = 1; k < l; ++k) {
        const double j2 = (2.0 * k + 1.0) / r * j1 - j0;
        j0 = j1;
        j1 = j2;
    }
    return std::sqrt(2.0 * r / kPi) * j1;
}

// Miller backward recurrence normalised by J_0 + 2 sum J_{2k} = 1.
double integer_miller(int m, double r) {
    int start = static_cast<int>(r) + m + 40;
    if (start % 2) ++start;
    double jp1 = 0.0;
    double j = 1e-30;
    double norm = 0.0;
    double wanted = 0.0;
    for (int k = start; k >= 1; --k) {
        const double jm1 = 2.0 * k / r * j - jp1;
        jp1 = j;
        j = jm1;
        if (k - 1 == m) wanted = j;
        if ((k - 1) % 2 == 0) norm += ((k - 1) == 0 ? 1.0 : 2.0) * j;
        if (std::fabs(j) > 1e250) {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    return wanted / norm;
}

// Hankel asymptotic P, Q series for integer order.
double integer_hankel(int m, double r) {
    const double mu = 4.0 * m * m;
    double p = 1.0;
    double q = 0.0;
    double term = 1.0;
    double last = 1e300;
    for (int k = 1; k < 200; ++k) {
        term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * r);
        const double mag = std::fabs(term);
        if (mag > last) break;
        last = mag;
        // k odd feeds Q with sign (-1)^{(k-1)/2}; k even feeds P with sign (-1)^{k/2}.
        if (k % 2 == 1) {
            q += ((k / 2) % 2 == 0 ? term : -term);
        } else {
            p += ((k / 2) % 2 == 0 ? term : -term);
        }
        if (mag < 1e-17) break;
    }
    const double chi = r - (0.5 * m + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * r)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_large(const BesselOrder& o, double r) {
    if (o.half_integer()) return half_integer_large(o.m, r);
    const int m = static_cast<int>(o.m);
    if (r < 30.0) return integer_miller(m, r);
    return integer_hankel(m, r);
}

}  // namespace

BesselOrder BesselOrder::for_dimension(int n) {
    if (n < 3) {
        std::ostringstream os;
        os << "BesselOrder: dimension must be >= 3, got " << n;
        throw std::invalid_argument(os.str());
    }
    return BesselOrder{n, 0.5 * (n - 3)};
}

double bessel_j(const BesselOrder& o, double r) {
    check_argument(r, "bessel_j");
    if (r < crossover(o.m)) {
        const long double h = 0.5L * r;
        return static_cast<double>(std::pow(h, static_cast<long double>(o.m)) * reduced_series(o.m, r));
    }
    return bessel_large(o, r);
}

double sphere_area(int n) {
    const double k = 0.5 * (n - 1);
    return 2.0 * std::pow(kPi, k) / std::tgamma(k);
}

double sphere_measure_ft(int n, double rho) {
    if (n < 3) BesselOrder::for_dimension(n);
    if (!(rho >= 0.0) || !std::isfinite(rho)) check_argument(rho, "sphere_measure_ft");
    const double m = 0.5 * (n - 3);
    // (2 pi)^{(n-1)/2} for small n without pow
    static const double kScale[] = {0.0, 0.0, 0.0, 2.0 * kPi, std::pow(2.0 * kPi, 1.5), 4.0 * kPi * kPi,
                                    std::pow(2.0 * kPi, 2.5), 8.0 * kPi * kPi * kPi};
    const double scale = n <= 7 ? kScale[n] : std::pow(2.0 * kPi, 0.5 * (n - 1));
    if (rho < crossover(m)) {
        // rho^{-m} J_m(rho) = 2^{-m} * reduced series
        return scale * std::pow(2.0, -m) * static_cast<double>(reduced_series(m, rho));
    }
    const int l = (n - 3) / 2;
    double inv_pow = 1.0;  // rho^{-l}
    for (int k = 0; k < l; ++k) inv_pow /= rho;
    if (n % 2 == 0) {
        // rho^{-m} sqrt(2 rho / pi) j_l(rho) = sqrt(2/pi) rho^{-l} j_l(rho)
        const double s = std::sin(rho), c = std::cos(rho);
        double j0 = s / rho;
        double j = j0;
        if (l > 0) {
            double j1 = s / (rho * rho) - c / rho;
            for (int k = 1; k < l; ++k) {
                const double j2 = (2.0 * k + 1.0) / rho * j1 - j0;
                j0 = j1;
                j1 = j2;
            }
            j = j1;
        }
        return scale * std::sqrt(2.0 / kPi) * inv_pow * j;
    }
    const double J = rho < 30.0 ? integer_miller(l, rho) : integer_hankel(l, rho);
    return scale * inv_pow * J;
}

std::complex<double> split_coefficient(const BesselOrder& o) {
    const double phi = 0.5 * o.m * kPi + 0.25 * kPi;
    return std::polar(1.0 / std::sqrt(2.0 * kPi), -phi);
}

std::complex<double> split_remainder_integral(const BesselOrder& o, double r, int sign, int panels) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("split_remainder_integral: r must be positive");
    const double alpha = o.m - 0.5;
    if (alpha == 0.0) return {0.0, 0.0};
    const std::complex<double> shift(0.0, 2.0 * sign);
    const std::complex<double> base = std::pow(shift, alpha);
    const double wmax = std::sqrt(40.0 / r);
    // The bracket varies on the scale |2i| in y, i.e. ~1 in w.
    const int np = std::max(panels, static_cast<int>(std::ceil(2.0 * wmax)) * panels / 16);
    const GaussRule& g = gauss_legendre(20);
    const double h = wmax / np;
    std::complex<double> acc(0.0, 0.0);
    for (int p = 0; p < np; ++p) {
        const double c = (p + 0.5) * h;
        std::complex<double> part(0.0, 0.0);
        for (std::size_t k = 0; k < g.x.size(); ++k) {
            const double w = c + 0.5 * h * g.x[k];
            const double y = w * w;
            const std::complex<double> bracket = std::pow(std::complex<double>(y, 0.0) + shift, alpha) - base;
            part += g.w[k] * 2.0 * std::pow(w, 2.0 * o.m) * std::exp(-r * y) * bracket;
        }
        acc += 0.5 * h * part;
    }
    return acc;
}

BesselSplit bessel_split_any(const BesselOrder& o, double r, int panels) {
    check_argument(r, "bessel_split");
    if (r == 0.0) throw std::invalid_argument("bessel_split: r must be positive");
    BesselSplit s;
    s.order = o;
    s.argument = r;
    s.c_plus = split_coefficient(o);
    s.c_minus = std::conj(s.c_plus);
    const std::complex<double> ep = std::polar(1.0, r);
    const std::complex<double> em = std::conj(ep);
    s.main = (s.c_plus * ep + s.c_minus * em) / std::sqrt(r);
    s.e_plus = split_remainder_integral(o, r, +1, panels);
    s.e_minus = split_remainder_integral(o, r, -1, panels);
    const double pref = std::pow(0.5 * r, o.m) / (std::tgamma(o.m + 0.5) * std::sqrt(kPi));
    s.error = std::complex<double>(0.0, pref) * (em * s.e_plus - ep * s.e_minus);
    return s;
}

BesselSplit bessel_split(const BesselOrder& o, double r, int panels) {
    check_argument(r, "bessel_split");
    if (r < 1.0) {
        std::ostringstream os;
        os << "bessel_split: split is only claimed for r >= 1, got " << r;
        throw std::invalid_argument(os.str());
    }
    return bessel_split_any(o, r, panels);
}

double error_bound_constant(int n, const std::vector<double>& r_grid, int panels) {
    if (r_grid.empty()) throw std::invalid_argument("error_bound_constant: empty grid");
    const BesselOrder o = BesselOrder::for_dimension(n);
    double sup = 0.0;
    for (double r : r_grid) {
        if (!(r >= 1.0)) throw std::invalid_argument("error_bound_constant: grid points must be >= 1");
        const double ep = std::abs(split_remainder_integral(o, r, +1, panels));
        const double em = std::abs(split_remainder_integral(o, r, -1, panels));
        sup = std::max(sup, std::max(ep, em) * std::pow(r, 0.5 * n));
    }
    return sup;
}

}  // namespace parasharp
