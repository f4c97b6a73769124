#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace snippet_smc {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Self-contained oracle and invariant suite: exhaustive folded/unfolded
/// equivalence, a negative control proving the check can fail, the variance
/// decomposition identity, the closed-form inverse-Gaussian fit against a
/// numeric minimizer, the free-particle contraction coefficients, and the
/// 1-D Gaussian evidence estimate. Deterministic given the seed.
std::vector<CheckResult> run_verification_suite(std::uint64_t seed = 1234);

/// True iff every check passed.
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace snippet_smc
