#pragma once

#include <complex>
#include <vector>

namespace parasharp {

/// Bessel order tied to the ambient dimension: m = (n-3)/2.
struct BesselOrder {
    int n = 3;
    double m = 0.0;

    static BesselOrder for_dimension(int n);
    bool half_integer() const { return (n % 2) == 0; }
};

/// Leading two-exponential term plus remainder of J_m(r).
///
/// main = r^{-1/2} (c_plus e^{ir} + c_minus e^{-ir}),
/// error = i (r/2)^m / (Gamma(m+1/2) sqrt(pi)) (e^{-ir} e_plus - e^{ir} e_minus),
/// where e_plus, e_minus are the two exponentially damped y-integrals.
struct BesselSplit {
    std::complex<double> main;
    std::complex<double> error;
    BesselOrder order;
    double argument = 0.0;
    std::complex<double> c_plus;
    std::complex<double> c_minus;
    std::complex<double> e_plus;
    std::complex<double> e_minus;
};

double bessel_j(const BesselOrder& order, double r);

/// Area of the unit sphere S^{n-2} in R^{n-1}.
double sphere_area(int n);

/// Inverse Fourier transform of the surface measure of S^{n-2} at radius rho.
/// Equals sphere_area(n) at rho = 0.
double sphere_measure_ft(int n, double rho);

/// Coefficients c_plus (c_minus is its conjugate) of the leading term.
std::complex<double> split_coefficient(const BesselOrder& order);

/// y-integral int_0^inf e^{-ry} y^a [(y + 2i s)^a - (2i s)^a] dy, a = m - 1/2, s = sign.
/// Evaluated after y = w^2 by composite Gauss-Legendre on [0, sqrt(40/r)].
std::complex<double> split_remainder_integral(const BesselOrder& order, double r, int sign,
                                              int panels = 16);

BesselSplit bessel_split(const BesselOrder& order, double r, int panels = 16);

/// Same as bessel_split without the r >= 1 restriction (any r > 0).
BesselSplit bessel_split_any(const BesselOrder& order, double r, int panels = 16);

/// sup over the grid of max(|e_plus|, |e_minus|) * r^{n/2}.
double error_bound_constant(int n, const std::vector<double>& r_grid, int panels = 16);

}  // namespace parasharp
