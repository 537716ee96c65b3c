#pragma once

// The independent-utilities benchmark IU(n, n'). Each bidder's valuation
// space is split into regions by the coordinate-wise max M of n' - 1 ghost
// bidders; the region probabilities mix each item's value with its positive
// ironed virtual value, and IU is the expected per-item max over n bidders
// of that mixture.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ecomp/dist_core.hpp"
#include "ecomp/myerson.hpp"

namespace ecomp {

/// Item j such that j is the smallest maximizer of v_j' - maxvec_j' over all
/// items and v_j >= maxvec_j; nullopt for the residual region.
std::optional<std::size_t> region_of(std::span<const double> v, std::span<const double> maxvec);

struct IUTables {
  int n_prime = 1;
  ProductSpace valuations;
  std::vector<IronedTable> ironed;
  // Indexed [valuation index][item].
  std::vector<std::vector<double>> p_region;
  std::vector<std::vector<double>> phi_iu;
  // Law of Phi_j(v) under v ~ D, one per item.
  std::vector<ScalarDistribution> law_phi;
};

/// Region probabilities by enumerating the joint max-vector law.
IUTables build_iu_tables(const AuctionSetting& setting, int n_prime);

/// Region probabilities for a single valuation from the per-item max
/// marginals alone: condition on M_j and use independence across items.
/// Costs O(m^2 |V_j|^2) and never enumerates the joint max vector.
std::vector<double> region_probabilities_by_marginals(const MaxVectorDistribution& maxvec,
                                                      std::span<const double> v);

double iu_from_tables(const IUTables& tables, int n);
double iu(const AuctionSetting& setting, int n, int n_prime);

struct MonteCarloEstimate {
  double estimate = 0.0;
  std::optional<double> std_error;  // none for a single sample
  std::uint64_t samples = 0;
};

/// Samples valuations only; each sampled valuation's Phi is exact.
MonteCarloEstimate monte_carlo_iu(const AuctionSetting& setting, int n, int n_prime,
                                  std::uint64_t samples, std::uint64_t seed);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool holds = false;
};

InequalityCheck make_check(double lhs, double rhs, double tolerance);

/// iu(n, n') <= (n / n') iu(n', n') + VCG(n').
InequalityCheck step2_inequality_check(const AuctionSetting& setting, int n, int n_prime,
                                       double tolerance = kDefaultTolerance);

/// Max over (s, i) of |Pr(max = s | tb = i) - Pr(max = s)| for k i.i.d.
/// draws, where tb picks uniformly among the maximizers.
double tie_break_independence_check(const ScalarDistribution& law, int k,
                                    const EnumerationCaps& caps = {});

}  // namespace ecomp
