#pragma once

#include "parasharp/exponents.hpp"
#include "parasharp/norms.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace parasharp {

enum class ExampleKind { Linear, Bilinear };

struct ExtremalCase {
    ExampleKind kind = ExampleKind::Linear;
    DyadicRegime regime;
    std::string region_label;           // I..V
    std::string id;                     // e.g. "bilinear-LargeR-III"
    Surface surface;
    std::vector<RadialDensity> densities;  // f, or (f, g)
    ProbeWindow window;
    int n = 3;
    double q = 2.0;  // probe exponent
    double p = 2.0;  // surface norm exponent in the ratio
    /// Theorem exponents (R, M) of the ratio probe / prod ||f||_p.
    std::pair<double, double> expected_lower_exponent{0.0, 0.0};
    /// Exponents (R, M) of the raw probe value as the examples state them.
    std::pair<double, double> raw_lower_exponent{0.0, 0.0};
    bool uses_khintchine = false;
    int sign_draws = 0;

    /// Throws unless supports lie in their dyadic bands and the window is a bounded polygon.
    void validate() const;
};

struct ExampleOptions {
    double q = 0.0;  // 0 selects the example's default line
    double p = 0.0;
    Surface surface = Surface::paraboloid();
    // Override the canonical chirp; NaN keeps r0 = 3R/4, t0 = 0.
    double r0 = std::numeric_limits<double>::quiet_NaN();
    double t0 = 0.0;
    // Narrow-band bilinear examples (regions I, IV at R >= 2): shift r0 within [3R/4, 3R/4 + span)
    // to the value maximizing the integrand at the window center.
    bool align_r0 = true;
};

/// Region I..III for R >= 2; region I with R <= 1 builds the small-R example.
/// Non-paraboloid surfaces use the band [1/8, 1/4] (sphere) or [1, 2] (elliptic) with
/// windows transferred through the local parabolic approximation.
ExtremalCase build_linear_example(const std::string& region, double R, int n, const ExampleOptions& opt = {});

ExtremalCase build_bilinear_example(Regime regime, const std::string& region, double R, double M, int n,
                                    const ExampleOptions& opt = {});

/// Probe lower bound of the case's field (or product) over its window.
double case_probe(const ExtremalCase& c, const GridSpec& grid = {});

/// Product of the L^p surface norms of the case's densities.
double case_norm_product(const ExtremalCase& c);

/// Sign vector for one draw: seed_seq{seed, draw} drives a 64-bit Mersenne generator.
std::vector<int> draw_signs(std::uint64_t seed, std::uint64_t draw, std::size_t count);

struct KhintchineResult {
    double mean = 0.0;
    double standard_error = 0.0;
    std::vector<double> values;  // per draw, in draw order
};

/// Mean over independent sign draws of the probe lower bound; draws < 8 rejected.
KhintchineResult khintchine_lower_bound(const ExtremalCase& c, int draws, std::uint64_t seed,
                                        const GridSpec& grid = {});

/// |+ branch| and |- branch| of the leading term at the window center for density `which`.
std::pair<double, double> branch_moduli_at_center(const ExtremalCase& c, std::size_t which = 0);

}  // namespace parasharp
