#pragma once

// Randomized invariant suites run by the `verify` command.

#include <cstdint>
#include <string>
#include <vector>

namespace ecomp {

struct VerifyBounds {
  int max_items = 2;
  int max_support = 3;
  int max_value = 10;
  int max_n = 2;
  int max_n_prime = 6;
};

struct SuiteResult {
  std::string name;
  int instances = 0;
  int failures = 0;
  double worst_slack = 0.0;  // smallest rhs - lhs seen; 0 when nothing ran
  std::string first_failure;  // empty when everything held
};

/// Deterministic for a given (seed, count, bounds).
std::vector<SuiteResult> run_property_suites(std::uint64_t seed, int count,
                                             const VerifyBounds& bounds);

}  // namespace ecomp
