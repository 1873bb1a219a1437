#pragma once

#include "parasharp/sharpness.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace parasharp {

/// One CSV line. For sweeps, measured is the point's value (ratio or probe) and the slope columns
/// describe the whole sweep; for threshold checks, theoretical_exponent holds the threshold.
struct CsvRow {
    std::string command;
    std::string theorem;
    std::string regime;
    std::string region;
    int n = 3;
    double p = 0.0;
    double q = 0.0;
    double log2_R = 0.0;
    double log2_M = 0.0;
    double measured = 0.0;
    double theoretical_exponent = 0.0;
    double fitted_slope = 0.0;
    double residual_rms = 0.0;
    bool converged = true;
    bool pass = false;
    std::uint64_t seed = 0;
};

/// Shortest decimal that parses back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_double(double x);

std::string csv_header();
std::string csv_line(const CsvRow& row);
/// Header followed by the rows in order, '\n' line ends.
std::string to_csv(const std::vector<CsvRow>& rows);
/// Throws std::runtime_error when the file cannot be written.
void write_csv(const std::vector<CsvRow>& rows, const std::string& path);

/// Pass flag rebuilt from the row's own columns, for rows produced with slope tolerance `tolerance`:
/// example rows and rows without a theoretical value pass when converged; rows with no scale
/// columns are threshold checks (measured <= theoretical_exponent); the rest are sweep rows judged
/// on fitted_slope (one-sided for "upper:" regions, widened for the linear q = 4 line) and rms.
bool recompute_pass(const CsvRow& row, double tolerance = 0.1, double rms_tolerance = 0.3);

/// One row per sweep point.
std::vector<CsvRow> rows_from_report(const ExponentReport& rep, const std::string& command, std::uint64_t seed);

}  // namespace parasharp
