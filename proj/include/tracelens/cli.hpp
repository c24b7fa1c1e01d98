#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tracelens/abstraction.hpp"

namespace tracelens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// "default", "nofr", or an explicit comma-separated list such as
// "none,FL,FL-FK".
std::vector<RuleCombo> parse_chain(const std::string& text);

// Entry point for every subcommand. Output goes to `out` unless --out is
// given; diagnostics go to `err` as single lines.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tracelens::cli
