#pragma once

#include "parasharp/extension.hpp"

#include <vector>

namespace parasharp {

struct GridSpec {
    double t_center = 0.0;
    double t_halfwidth = 0.0;  // 0 selects 8R
    int t_points = 16;         // minimum node counts; raised to meet `resolution`
    int r_points = 16;
    int tail_doublings = 3;
    double tail_fraction = 0.02;
    double resolution = 0.7853981633974483;  // max phase change per mean node spacing
    int chunk_points = 1024;                 // t nodes per field evaluation call

    void validate() const;
};

struct NormResult {
    double value = 0.0;
    double tail_estimate = 0.0;
    bool converged = false;
    int doublings = 0;  // window doublings performed
};

/// (area * int_{R/2}^{R} int_window |u|^q dt r^{n-2} dr)^{1/q}; q = inf gives a refined grid sup.
/// The window is doubled until the value changes by less than tail_fraction.
NormResult lq_annulus_norm(const Field& u, double q, double R, int n, const GridSpec& grid);

/// Several exponents from one set of field evaluations; each result equals lq_annulus_norm's.
std::vector<NormResult> lq_annulus_norms(const Field& u, const std::vector<double>& qs, double R, int n,
                                         const GridSpec& grid);

/// lq_annulus_norm of the pointwise product u v.
NormResult bilinear_product_norm(const Field& u, const Field& v, double q, double R, int n, const GridSpec& grid);

/// Integral over a fixed (t, r) box, no tail control. Returns int |u|^q r^{n-2} dt dr * area
/// (or the sup for q = inf).
double box_power_integral(const Field& u, double q, int n, double t_lo, double t_hi, double r_lo, double r_hi,
                          const GridSpec& grid);

/// lo <= a (t - t0) + b (r - r0) <= hi
struct AffineConstraint {
    double a = 0.0;
    double b = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct ProbeWindow {
    double t0 = 0.0;
    double r0 = 0.0;
    std::vector<AffineConstraint> constraints;

    /// Vertices (t - t0, r - r0) of the feasible polygon in counter-clockwise order; empty if infeasible.
    std::vector<std::pair<double, double>> polygon() const;
    double area() const;
    /// Throws unless the feasible region is a nonempty bounded polygon.
    void validate() const;
};

/// (area * int_window |u|^q r^{n-2} dt dr)^{1/q}; q = inf gives the sup over window nodes.
/// Zero-area windows return 0.
double probe_lower_bound(const Field& u, double q, const ProbeWindow& window, int n, const GridSpec& grid = {});
double probe_lower_bound(const Field& u, const Field& v, double q, const ProbeWindow& window, int n,
                         const GridSpec& grid = {});

/// int_R |u(t, r)|^2 dt for an extension field, from Plancherel in t (exact up to s-quadrature).
double time_l2_squared(const ExtensionField& u, double r);

/// Full-time q=2 annulus norm from Plancherel in t, with optional weight |x|^{weight_power}
/// inside the square.
double annulus_l2_plancherel(const ExtensionField& u, double r_lo, double r_hi, double weight_power = 0.0);

}  // namespace parasharp
