#pragma once

// Optimal Bayesian incentive compatible, interim individually rational
// revenue for tiny instances, as a linear program over ex-post allocation
// probabilities and interim payments.

#include <cstddef>
#include <vector>

#include "ecomp/dist_core.hpp"
#include "ecomp/lp.hpp"

namespace ecomp {

struct LpOracleCaps {
  std::size_t max_profiles = 256;        // |V|^n
  std::size_t max_variables = 20000;
  std::size_t max_tableau_entries = std::size_t{1} << 25;
};

struct MechanismSolution {
  double revenue = 0.0;
  int n = 0;
  ProductSpace valuations;
  // interim_allocation[i][v][j] = Pr(bidder i with type v gets item j).
  std::vector<std::vector<std::vector<double>>> interim_allocation;
  // interim_payment[i][v].
  std::vector<std::vector<double>> interim_payment;
  std::size_t num_variables = 0;
  std::size_t num_constraints = 0;
  LpSolution lp;
};

/// Throws kInstanceTooLarge above the caps and the lp_solve errors.
MechanismSolution optimal_revenue(const AuctionSetting& setting, int n,
                                  const LpOracleCaps& caps = {});

/// Largest violation of BIC or interim IR by a solution, recomputed from its
/// interim quantities.
double incentive_violation(const MechanismSolution& solution);

}  // namespace ecomp
