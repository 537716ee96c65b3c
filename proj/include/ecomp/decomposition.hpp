#pragma once

// Decomposition of IU(n') into Single, Under, Over, Tail and Core, the capped
// VCG utilities behind Core, the two entry-fee constructions that bound Core,
// and the end-to-end inequality chains built from them.
//
// Bidders are exchangeable and the ghost profile enters only through its
// coordinate-wise max M, so every per-bidder sum collapses to n' times an
// expectation over M.

#include <optional>
#include <string>
#include <vector>

#include "ecomp/dist_core.hpp"
#include "ecomp/iu_benchmark.hpp"

namespace ecomp {

/// Whether Core counts values with v_j - M_j equal to the cap.
enum class CoreBoundary { kInclusive, kStrict };

struct MaxVectorStats {
  std::vector<double> maxvec;
  double prob = 0.0;
  std::vector<double> r_star;       // r*_j(M_j)
  double r_ron_total = 0.0;
  std::vector<double> thresholds;   // r_ron_total + M_j
  std::vector<ScalarDistribution> law_util_hat;  // per item
  ScalarDistribution law_u;
  ScalarDistribution law_u_hat;
  double e_u_hat = 0.0;
  double var_u_hat = 0.0;
  double fee_pd = 0.0;
  double nice_prob = 0.0;
};

struct UtilityStats {
  int n_prime = 1;
  CoreBoundary boundary = CoreBoundary::kInclusive;
  std::vector<MaxVectorStats> entries;  // one per joint max vector
};

UtilityStats build_utility_stats(const AuctionSetting& setting, int n_prime,
                                 CoreBoundary boundary = CoreBoundary::kInclusive);

/// Law of a sum of independent variables by repeated convolution.
ScalarDistribution sum_of_independent(const std::vector<ScalarDistribution>& laws);

/// Law of the capped utility for one max vector by enumerating the joint
/// valuation space; used to cross-check the convolution route.
ScalarDistribution capped_utility_law_by_enumeration(const AuctionSetting& setting,
                                                     const std::vector<double>& maxvec,
                                                     double cap, CoreBoundary boundary);

struct EventProbabilities {
  std::vector<double> p_und;  // Pr_M(v_j < M_j)
  std::vector<double> p_nf;   // Pr_M(v_j >= M_j and some j' has utility >= item j's)
};

EventProbabilities event_probabilities(const Valuation& v, const AuctionSetting& setting,
                                       int n_prime);

struct FeeConstruction {
  double fee_mass = 0.0;          // n' E_M[fee(M)]
  double participation_lb = 0.0;  // n' E_M[fee(M) Pr(capped utility >= fee(M))]
};

FeeConstruction bvcg_constructed_revenue(const UtilityStats& stats);
FeeConstruction bvcg_constructed_revenue(const AuctionSetting& setting, int n_prime);

struct SpecialBidderConstruction {
  double revenue_lb = 0.0;  // n' E_M E_{s,w}[U(s) 1(U(s) <= U(w))]
  double s_all = 0.0;       // n' E_M[nice_prob^2 E[capped utility]]
};

SpecialBidderConstruction pi_bvcg_constructed_revenue(const UtilityStats& stats);
SpecialBidderConstruction pi_bvcg_constructed_revenue(const AuctionSetting& setting, int n_prime);

struct CheckRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
  std::string anchor;
};

CheckRecord make_record(std::string name, double lhs, double rhs, double tolerance,
                        std::string anchor);

struct DecompositionReport {
  int n = 1;
  int n_prime = 1;
  CoreBoundary boundary = CoreBoundary::kInclusive;

  double single = 0.0;
  double under = 0.0;
  double over = 0.0;
  double tail = 0.0;            // clipped form
  double tail_unclipped = 0.0;  // r_total Pr(v_j > T_j) form
  double tail_exact = 0.0;      // with the exact surplus-event probability
  double core = 0.0;
  double surplus_bound = 0.0;

  double srev_nprime = 0.0;
  double ronen_sum = 0.0;  // n' E_M[r_ron_total]
  double vcg_nprime = 0.0;
  double vcg_nprime_plus_1 = 0.0;
  double fee_mass = 0.0;
  double participation_lb = 0.0;
  double bvcg_floor = 0.0;  // max(participation_lb, VCG(n'))
  double revenue_lb = 0.0;
  double s_all = 0.0;
  double pi_bvcg_floor = 0.0;  // max(revenue_lb, VCG(n' + 1))

  std::optional<double> iu_n;
  std::optional<double> iu_nprime;
  bool all_regular = false;
  bool regular_branch_checked = false;

  std::vector<CheckRecord> checks;

  bool all_hold() const;
  const CheckRecord* find(const std::string& name) const;
};

/// Terms only, no verdicts.
DecompositionReport decomposition_terms(const AuctionSetting& setting, int n_prime,
                                        CoreBoundary boundary = CoreBoundary::kInclusive);

enum class RegularBranch { kAuto, kRequire, kSkip };

struct ChainOptions {
  double tolerance = kDefaultTolerance;
  CoreBoundary boundary = CoreBoundary::kInclusive;
  RegularBranch regular_branch = RegularBranch::kAuto;
};

/// Every exactly computable link of the chain, plus the pointwise lemmas
/// (variance cap, per-item cap, participation probability, tail
/// probability, event union, nice sets on high pairs).
DecompositionReport lemma_chain_check(const AuctionSetting& setting, int n, int n_prime,
                                      const ChainOptions& options = {});

enum class TheoremBranch { kCompetitionSuffices, kSimpleAuctionBound, kUnknown, kNeither };

struct TheoremVerdict {
  int n = 1;
  int n_prime = 1;
  double epsilon = 1.0;
  std::optional<double> optimal_revenue;  // none when the LP is out of reach
  double vcg_nprime = 0.0;
  double simple_floor = 0.0;  // max(BVCG floor, SRev(n'))
  std::optional<double> pi_floor;  // regular instances only
  TheoremBranch branch = TheoremBranch::kUnknown;
  bool holds = false;
  std::optional<std::string> lp_error;
  DecompositionReport chain;
};

/// n' defaults to ceil(factor * n / epsilon).
int default_n_prime(int n, double epsilon, double factor = 20.0);

TheoremVerdict main_theorem_verdict(const AuctionSetting& setting, int n, double epsilon,
                                    std::optional<int> n_prime_override = std::nullopt,
                                    const ChainOptions& options = {});

std::string_view to_string(TheoremBranch branch);

}  // namespace ecomp
