#pragma once

#include "parasharp/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace parasharp {

struct CriterionCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CriterionOutcome {
    int id = 0;
    std::string title;
    std::vector<CriterionCheck> checks;
    std::vector<CsvRow> rows;
    bool pass() const;
};

constexpr int kCriterionCount = 12;
constexpr std::uint64_t kDefaultSeed = 2024;

/// Runs acceptance criterion `id` (1..12); the seed drives every random draw.
CriterionOutcome run_criterion(int id, std::uint64_t seed = kDefaultSeed);

}  // namespace parasharp
