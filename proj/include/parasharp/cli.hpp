#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

namespace parasharp {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2 };

/// "inf", "+inf", "infinity" (any case) or a decimal; throws std::invalid_argument otherwise.
double parse_exponent(const std::string& text);

/// "a..b" or a single integer "a"; throws std::invalid_argument on malformed text or a > b.
std::pair<int, int> parse_log2_range(const std::string& text);

/// Front end for every command. CSV goes to --out, or to `out` when --out is absent (the
/// summary then goes to `err`). Returns 0 when every row passes, 1 on a failed row, 2 on a
/// configuration error.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace parasharp
