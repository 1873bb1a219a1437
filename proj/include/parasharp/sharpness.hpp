#pragma once

#include "parasharp/exponents.hpp"
#include "parasharp/extremals.hpp"
#include "parasharp/norms.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace parasharp {

enum class SweepAxis { R, M };

enum class SweepKind {
    Probe,       // probe lower bound of an extremal example
    Khintchine,  // mean probe over random sign draws
    Upper,       // annulus norm of a fixed test density
    Synthetic    // caller-supplied values
};

struct SweepConfig {
    SweepKind kind = SweepKind::Probe;
    Theorem theorem = Theorem::Linear;
    Regime regime = Regime::LargeR;
    std::string region = "II";  // example region, or battery density label for Upper
    int n = 3;
    double q = 0.0;  // 0 keeps the example default
    double p = 0.0;
    Surface surface = Surface::paraboloid();
    SweepAxis axis = SweepAxis::R;
    int log2_lo = 4;
    int log2_hi = 9;
    /// log2 of the scale held fixed (M for R-sweeps, R for M-sweeps).
    int fixed_log2 = -4;
    /// M-sweeps along R = 2^{coupled_log2} / M; the R-exponent is removed before fitting.
    std::optional<int> coupled_log2;
    /// Fit probe / prod ||f||_p (true) or the raw probe (false).
    bool ratio_form = true;
    int draws = 64;
    std::uint64_t seed = 1;
    double tolerance = 0.1;
    double rms_tolerance = 0.3;
    /// q = 4 linear line: slope band [theory - 0.02, theory + 0.15] (upper direction: <= theory + 0.15).
    bool epsilon_band = false;
    GridSpec grid;
    /// Upper direction: density at scale R, and the theoretical exponent used for the bound.
    std::function<RadialDensity(double R)> density;
    /// Synthetic: value at (R, M).
    std::function<double(double R, double M)> synthetic;
    std::optional<double> theoretical_override;
};

struct SweepPoint {
    double log2_R = 0.0;
    double log2_M = 0.0;
    double measured = 0.0;     // probe (or norm) value, or the ratio in ratio form
    double fit_value = 0.0;    // ordinate used in the fit
    double standard_error = 0.0;
    bool converged = true;
};

struct ExponentReport {
    SweepConfig config;
    std::string example_id;
    double p = 0.0;  // exponents actually used (example defaults resolved)
    double q = 0.0;
    std::vector<SweepPoint> points;
    double fitted_slope = 0.0;
    double intercept = 0.0;
    double theoretical = 0.0;
    double residual_rms = 0.0;
    double band_lo = 0.0;  // accepted slope interval
    double band_hi = 0.0;
    bool valid = true;     // every point converged
    bool pass = false;
};

/// Upper direction passes when slope <= theoretical + tolerance; otherwise |slope - theory| <= tolerance.
ExponentReport run_sweep(const SweepConfig& config);

/// Fixed smooth test densities on [1, 2] for the upper direction; some carry R-dependent chirps.
struct BatteryDensity {
    std::string label;
    std::function<RadialDensity(double R)> make;
};
std::vector<BatteryDensity> upper_battery();

struct UpperLine {
    Line line;
    double q = 0.0;
    double p = 0.0;
};
/// Lines of the linear theorem checked by the battery: (2, 2), (4, 4), (6, 2), (inf, 2).
std::vector<UpperLine> upper_lines();

struct UpperBatteryOptions {
    int n = 3;
    int log2_lo = 2;  // q > 2 window
    int log2_hi = 7;
    int q2_log2_lo = 4;  // q = 2 uses the full-time Plancherel norm
    int q2_log2_hi = 9;
    double tolerance = 0.1;
};

/// One report per (density, line); norms for q > 2 share one field evaluation per R.
std::vector<ExponentReport> run_upper_battery(const UpperBatteryOptions& opt = {});

/// Search family over the density F = s^beta 1_[s_lo, s_lo + w] with chirp r0 = chirp * R.
struct SearchFamily {
    std::vector<double> widths;
    std::vector<double> betas{0.0};
    std::vector<double> chirps{0.75};
    double s_lo = 1.0;
    /// Window at scale R for a density chirped to r0; unset uses the annulus norm.
    std::function<ProbeWindow(double R, double r0)> window;
    GridSpec grid;
};

struct SearchResult {
    double best_ratio = 0.0;
    double width = 0.0;
    double beta = 0.0;
    double chirp = 0.0;
    int evaluations = 0;
};

/// Coordinate ascent over the family grid from its center, then the remaining grid points in
/// lexicographic order, until `budget` evaluations. The evaluation sequence does not depend on the
/// budget, so a larger budget never lowers the result.
SearchResult ratio_search(double q, double p, int n, double R, const SearchFamily& family, int budget);

/// Knapp-type family for the linear q = 2 search: widths 2^-1..2^-k_max, beta = -(n-2)/2,
/// probe over a sqrt(R)-wide tube for tau in [R/2, R].
SearchFamily linear_region_one_family(int n, int k_max);

}  // namespace parasharp
