#pragma once

#include "parasharp/surfaces.hpp"

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace parasharp {

using cplx = std::complex<double>;

struct QuadratureSpec {
    double rel_tol = 1e-6;
    long max_panels = 4'000'000;
    double oscillation_factor = 1.5707963267948966;  // target phase change per panel
    int order = 8;

    void validate() const;
};

struct FieldSample {
    double t = 0.0;
    double r = 0.0;
    cplx value;
};

/// Thrown when the phase budget would need more panels than allowed.
class QuadratureBudgetError : public std::runtime_error {
public:
    QuadratureBudgetError(long attempted, long allowed);
    long attempted;
};

/// Radial quadrature nodes for a density; weights carry only the rule.
struct RadialNodes {
    std::vector<double> s;
    std::vector<double> w;
};

/// Panels sized so that (t_span |a'| + |r0| + r_max) * panel <= oscillation_factor.
RadialNodes build_nodes(const RadialDensity& d, const Surface& surface, double t_span, double r_max,
                        const QuadratureSpec& spec, std::span<const double> extra_breaks = {});

/// A cylindrically symmetric space-time field u(t, r).
class Field {
public:
    virtual ~Field() = default;
    /// out[i] = u(t[i], r[i]).
    virtual void eval_points(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const = 0;
    /// Tensor grid, out[k * t.size() + i] = u(t[i], r[k]).
    virtual void eval_grid(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const;
    /// Ragged rows: out[k][i] = u(t_rows[k][i], r[k]). Times shared between rows are evaluated once.
    virtual void eval_rows(std::span<const double> r, const std::vector<std::vector<double>>& t_rows,
                           std::vector<std::vector<cplx>>& out) const;
    /// Frequency bounds of |u| in t and r; used to size norm grids.
    virtual double t_frequency() const = 0;
    virtual double r_frequency() const = 0;
};

/// u(t, r) = int F(s) e^{-i t a(s)} (dmu)^(r s) s^{n-2} ds; time_sign = -1 flips t.
class ExtensionField : public Field {
public:
    ExtensionField(RadialDensity d, Surface surface, int n, QuadratureSpec spec = {}, int time_sign = 1);

    void eval_points(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const override;
    void eval_grid(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const override;
    void eval_rows(std::span<const double> r, const std::vector<std::vector<double>>& t_rows,
                   std::vector<std::vector<cplx>>& out) const override;
    double t_frequency() const override;
    double r_frequency() const override;

    cplx operator()(double t, double r) const;

    const RadialDensity& density() const { return d_; }
    const Surface& surface() const { return surface_; }
    int dimension() const { return n_; }

private:
    RadialDensity d_;
    Surface surface_;
    int n_;
    QuadratureSpec spec_;
    int time_sign_;
};

/// Pointwise field from a callable; used for closed-form fields.
class FunctionField : public Field {
public:
    FunctionField(std::function<cplx(double, double)> fn, double t_freq, double r_freq);
    void eval_points(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const override;
    double t_frequency() const override { return t_freq_; }
    double r_frequency() const override { return r_freq_; }

private:
    std::function<cplx(double, double)> fn_;
    double t_freq_;
    double r_freq_;
};

/// Pointwise product u * v.
class ProductField : public Field {
public:
    ProductField(const Field& u, const Field& v) : u_(u), v_(v) {}
    void eval_points(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const override;
    void eval_grid(std::span<const double> t, std::span<const double> r, std::span<cplx> out) const override;
    void eval_rows(std::span<const double> r, const std::vector<std::vector<double>>& t_rows,
                   std::vector<std::vector<cplx>>& out) const override;
    double t_frequency() const override { return u_.t_frequency() + v_.t_frequency(); }
    double r_frequency() const override { return u_.r_frequency() + v_.r_frequency(); }

private:
    const Field& u_;
    const Field& v_;
};

cplx extension_full(const RadialDensity& d, const Surface& surface, int n, double t, double r,
                    const QuadratureSpec& spec = {});

/// + and - branch integrals of the leading term (paraboloid, r >= 1).
std::pair<cplx, cplx> main_term_branches(const RadialDensity& d, int n, double t, double r,
                                         const QuadratureSpec& spec = {});
cplx main_term(const RadialDensity& d, int n, double t, double r, const QuadratureSpec& spec = {});
cplx error_term(const RadialDensity& d, int n, double t, double r, const QuadratureSpec& spec = {});

/// e^{it Laplacian} u0 with hat(u0) = F(|xi|): extension with t -> -t.
cplx schrodinger_evolve(const RadialDensity& u0_spectrum, int n, double t, double r,
                        const QuadratureSpec& spec = {});

}  // namespace parasharp
