#pragma once

// Seeded random instances for property checks. Supports are distinct small
// integers so that utility differences are exact in binary64.

#include "ecomp/dist_core.hpp"

namespace ecomp {

struct InstanceBounds {
  int min_items = 1;
  int max_items = 2;
  int min_support = 1;
  int max_support = 3;
  int max_value = 10;
  bool regular = false;
};

/// Distinct values drawn from {0, ..., max_value}, masses uniform on
/// [0.05, 1] then normalized.
ItemDistribution random_item(Rng& rng, int min_support, int max_support, int max_value);

/// Rejection-samples random_item until regular; falls back to the uniform
/// law on {1, ..., k}, which is always regular.
ItemDistribution random_regular_item(Rng& rng, int min_support, int max_support, int max_value);

ScalarDistribution random_law(Rng& rng, int max_support, int max_value);

AuctionSetting random_setting(Rng& rng, const InstanceBounds& bounds);

}  // namespace ecomp
