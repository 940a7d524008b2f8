#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tllreach/serialization.hpp"

namespace tllreach::cli {

/// Exit codes of the tll-reach tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCostGuard = 2;

/// Runs the tll-reach command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reach result document for a problem; `wall_ms` is the only timing field.
json reach_result_json(const Problem& problem, const std::string& method, int steps, double epsilon,
                       std::ostream* log);

/// Per-instance seed used by `generate`.
std::uint64_t instance_seed(std::uint64_t seed, int N, int M, int index);

}  // namespace tllreach::cli
