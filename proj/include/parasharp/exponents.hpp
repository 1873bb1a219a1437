#pragma once

#include "parasharp/surfaces.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

namespace parasharp {

enum class Theorem { Linear, Bilinear };
enum class Line { Q1, Q2, Q4, Q3pPrime, QInf };

std::string theorem_name(Theorem t);
std::string line_name(Line l);

/// Exact rational with int64 parts; arithmetic throws std::overflow_error on overflow.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(Rational a, Rational b);
    friend Rational operator-(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend Rational operator/(Rational a, Rational b);
    friend Rational operator-(Rational a) { return Rational(-a.num_, a.den_); }
    friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator<(Rational a, Rational b);
    friend bool operator<=(Rational a, Rational b) { return !(b < a); }
    friend std::ostream& operator<<(std::ostream& os, Rational r);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

template <class T>
struct ExponentPair {
    T R{};
    T M{};
};

/// Exponents of R and M along one line of the linear/bilinear theorem. x = 1/p; for
/// Line::Q3pPrime, y = 1/q = (1 - x)/3 is implied. Throws std::domain_error when p is
/// outside the line's admissible range.
ExponentPair<Rational> line_exponent(Theorem th, Line line, Rational x, int n, Regime g);

/// Region label (I..V) of (x, y) = (1/p, 1/q); throws std::domain_error outside the diagram.
std::string region_of(Theorem th, Rational x, Rational y);
std::string region_of(Theorem th, double x, double y);

/// Exact interpolated exponents at (x, y) = (1/p, 1/q).
ExponentPair<Rational> exponent_exact(Theorem th, Rational x, Rational y, int n, Regime g);

/// (exponent of R, exponent of M) for the bound in regime g; p, q may be +inf. Linear
/// results have M-exponent 0 and treat MidR like LargeR.
std::pair<double, double> theoretical_exponent(Theorem th, double q, double p, int n, Regime g);

/// log2 of the bound R^a M^b as coefficients: value = cR log2 R + cM log2 M.
/// Branch continuity: bilinear A/B at R = 1/M, B/C at R = 1; linear A/B at R = 1.
bool bilinear_continuous_at_inverse_M(Rational x, Rational y, int n);
bool bilinear_continuous_at_unit_R(Rational x, Rational y, int n);
bool linear_continuous_at_unit_R(Rational x, Rational y, int n);

/// Step exponent for the summed linear estimate; requires q > 2n/(n-1).
double step_alpha(double R, double q, int n);

struct SchurResult {
    double sum_over_M = 0.0;   // sum_M (R M)^{alpha(R M)} at fixed R
    double sum_over_R = 0.0;   // sum_R (R M)^{alpha(R M)} at fixed M
    double ratio_low = 0.0;    // term ratio toward RM -> 0
    double ratio_high = 0.0;   // term ratio toward RM -> inf
    double tail_estimate = 0.0;
    bool converged = false;    // both ratios < 1
};

/// Partial sums over dyadic 2^{-truncation}..2^{truncation}; requires q > 2n/(n-1) > p >= 1.
SchurResult schur_sum_check(double q, double p, int n, int truncation, double R_fixed = 1.0, double M_fixed = 1.0);

}  // namespace parasharp
