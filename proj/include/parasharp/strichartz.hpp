#pragma once

#include "parasharp/exponents.hpp"
#include "parasharp/extension.hpp"
#include "parasharp/norms.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace parasharp {

/// Initial datum with radial spectrum supported in [M, 2M].
struct FrequencyBand {
    double M = 1.0;
    RadialDensity spectrum;

    /// Throws unless M is dyadic and the support lies in [M, 2M].
    void validate() const;
};

/// sin^2 bump on [M, 2M] times s^beta; smooth, so norms converge fast in t and r.
FrequencyBand smooth_band(double M, double beta = 0.0);

/// ||u0||_{L^2(R^{n-1})} from Plancherel: (2 pi)^{(n-1)/2} ||F||_{L^2}.
double data_l2_norm(const FrequencyBand& band, int n);

/// ||e^{it Laplacian} u0||_{L^2_x} by radial quadrature on [0, r_max] (0 picks a range that holds the mass at t).
double evolved_mass(const FrequencyBand& band, int n, double t, double r_max = 0.0);

/// Sum over dyadic annuli A_R, R = 2^k / scale, growing |k| in both directions from k = 0.
/// After min_down (min_up) steps on a side, it stops once the geometric tail term * rho / (1 - rho) of the last
/// two terms is below rel_tol of the running sum or the last two ratios agree within 2%; the
/// extrapolated tails are added to the total.
struct DyadicSum {
    double total = 0.0;
    double tail_low = 0.0;
    double tail_high = 0.0;
    int k_min = 0;
    int k_max = 0;
    std::vector<double> terms;  // k_min..k_max
    bool converged = false;
};
DyadicSum dyadic_annulus_sum(const std::function<double(int k)>& term, int max_down, int max_up, double rel_tol,
                             int min_down = 3, int min_up = 3);

struct StrichartzGrid {
    int max_down = 12;
    int max_up = 10;
    double rel_tol = 0.02;
    int min_steps = 3;  // per side, before a tail may be extrapolated
    int tail_doublings = 6;
    double tail_fraction = 0.01;
    double resolution = 0.7853981633974483;
};

struct StrichartzResult {
    double ratio = 0.0;
    double norm = 0.0;      // measured left-hand side
    double factor = 0.0;    // scale factor of the bound
    DyadicSum sum;          // per-annulus q-th powers (squares for the weighted norm)
    bool converged = false;
};

/// (n-1)/2 - (n+1)/q.
double linear_strichartz_exponent(double q, int n);

/// ||e^{it Laplacian} u0||_{L^q_{t,x}} / (M^{(n-1)/2 - (n+1)/q} ||u0||_2); requires q > (4n-2)/(2n-3).
StrichartzResult linear_strichartz_ratio(const FrequencyBand& band, double q, int n, const StrichartzGrid& grid = {});

/// M^{(1-eps)/2} || |x|^{-(1+eps)/2} e^{it Laplacian} u0 ||_{L^2(R x R^{n-1})} / ||u0||_2, full time
/// by Plancherel in t; requires 0 < eps < n - 2.
StrichartzResult weighted_local_ratio(const FrequencyBand& band, double eps, int n,
                                      StrichartzGrid grid = {.max_down = 80, .max_up = 12, .rel_tol = 1e-3});

enum class StrichartzBranch { Low, Mid, High };

/// Exponents (of M1, M2) of the bilinear bound on one branch, as functions of 1/q. Throws
/// std::domain_error when 1/q is outside the branch's closed interval.
ExponentPair<Rational> bilinear_strichartz_exponents(Rational inv_q, int n, StrichartzBranch b);
std::pair<double, double> bilinear_strichartz_exponents(double q, int n);

/// First branch whose closed q-interval holds q (Low, then Mid, then High); requires q > n/(n-1).
StrichartzBranch bilinear_strichartz_branch(double q, int n);

/// Branch factors agree exactly at q = 2 and at q = 2(2n-1)/(2n-3).
bool bilinear_strichartz_continuous(int n);

/// ||e^{it Laplacian} u0 e^{it Laplacian} v0||_{L^q} / (M1^a M2^b ||u0||_2 ||v0||_2) with u0 in
/// band b1 (M1) and v0 in b2 (M2 <= M1/4).
StrichartzResult bilinear_strichartz_ratio(const FrequencyBand& b1, const FrequencyBand& b2, double q, int n,
                                           const StrichartzGrid& grid = {});

}  // namespace parasharp
