#pragma once

// Instance configuration files. Numerics are decimal strings so instance
// files read back bit-identically on every platform; plain JSON numbers are
// accepted too.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecomp/dist_core.hpp"

namespace ecomp {

enum class RunMode { kExact, kMonteCarlo };

struct ItemSpec {
  std::vector<double> values;
  std::vector<double> probs;
};

struct InstanceConfig {
  std::vector<ItemSpec> items;
  int n = 1;
  double epsilon = 1.0;
  std::optional<int> n_prime;
  double n_prime_factor = 20.0;
  RunMode mode = RunMode::kExact;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  double tolerance = kDefaultTolerance;
  EnumerationCaps caps;

  /// Validates the items; raises the dist_core errors.
  AuctionSetting setting() const;
  /// The explicit n_prime, or ceil(n_prime_factor * n / epsilon).
  int resolved_n_prime() const;
};

/// Parses shortest-round-trip decimal text; raises kConfigParse.
double parse_decimal(std::string_view text);

/// Raises kConfigParse with the byte offset for malformed JSON and the
/// offending key for schema errors.
InstanceConfig parse_config(std::string_view text);
InstanceConfig load_config(const std::string& path);

std::string_view to_string(RunMode mode);

}  // namespace ecomp
