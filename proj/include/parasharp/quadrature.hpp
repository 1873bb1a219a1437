#pragma once

#include <span>
#include <utility>
#include <vector>

namespace parasharp {

/// Gauss-Legendre rule on [-1, 1]; cached per order, thread-safe after first use.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

const GaussRule& gauss_legendre(int order);

/// Composite rule: `panels` equal panels on [lo, hi], `order` nodes each.
/// Appends to nodes/weights.
void append_composite(double lo, double hi, int panels, int order, std::vector<double>& nodes,
                      std::vector<double>& weights);

/// Pairwise (cascade) summation; result does not depend on how callers partition work.
double pairwise_sum(std::span<const double> values);

/// Least-squares line y = slope * x + intercept; residual RMS in y units.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace parasharp
