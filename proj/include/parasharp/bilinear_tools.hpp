#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace parasharp {

/// Generation-j dyadic intervals of [1, 2]: tau^j_k = [1 + k 2^-j, 1 + (k+1) 2^-j], 0 <= k < 2^j.
struct WhitneyPair {
    int j = 0;
    long k = 0;
    long kp = 0;

    double lo() const;
    double hi() const;
    double lo_p() const;
    double hi_p() const;
    /// Gap between the two intervals.
    double separation() const;
};

/// k and k' are not adjacent (nor equal) but their parents are adjacent.
bool whitney_related(int j, long k, long kp);

/// All ordered related pairs of generations 0..max_depth; requires 0 <= max_depth <= 20.
std::vector<WhitneyPair> whitney_decompose(int max_depth);

/// Number of related pairs (any generation <= max_depth) whose product tau_k x tau_k' contains
/// (s1, s2). Intervals are half-open except the last one of each generation.
int whitney_cover_count(int max_depth, double s1, double s2);

struct WhitneyReport {
    int max_depth = 0;
    std::vector<std::size_t> pairs_per_generation;
    std::size_t pair_count = 0;
    int max_partners = 0;           // over all generations and k
    bool symmetric = false;
    bool separation_ok = false;     // gap in [2^-j, 4 2^-j] for every pair
    std::size_t grid_points = 0;    // off-diagonal cell centers tested
    std::size_t uncovered = 0;      // tested points with |s1 - s2| >= 2^{-max_depth+2} in no pair
    int max_cover = 0;
    bool pass() const { return symmetric && separation_ok && uncovered == 0 && max_partners <= 4; }
};

/// Exhaustive checks on a grid_side x grid_side grid of cell centers in [1, 2]^2.
WhitneyReport whitney_check(int max_depth, int grid_side = 64);

/// sup of the density 1 / (2 |s2 - s1|) of the pushforward of ds1 ds2 on tau_k x tau_k' under
/// (s1, s2) -> (s1 + s2, s1^2 + s2^2), over a grid_points^2 grid (endpoints included).
double arc_convolution_sup(int j, const WhitneyPair& pair, int grid_points = 65);

struct QuasiOrthoOptions {
    int n = 3;
    double t_max = 64.0;   // box [-t_max, t_max] x [0, r_max]
    double r_max = 64.0;
    int trials = 16;
    std::uint64_t seed = 1;
    double resolution = 0.7853981633974483;
    /// Unordered pairs (k < k') to activate; empty selects every related pair of generation j.
    std::vector<std::pair<long, long>> active;
};

struct QuasiOrthoResult {
    double max_ratio = 0.0;
    std::vector<double> ratios;  // per trial
    std::size_t pairs = 0;
};

/// Per trial, random signs times magnitudes in [1/2, 3/2] on F^j_k = 1_{tau_k}; ratio of
/// ||sum c_k c_k' u_k u_k'||^2 to sum ||c_k c_k' u_k u_k'||^2 in L^2 of the box. Requires 1 <= j <= 10.
QuasiOrthoResult quasi_orthogonality_defect(int j, const QuasiOrthoOptions& opt = {});

}  // namespace parasharp
