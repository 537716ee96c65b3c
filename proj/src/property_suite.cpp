#include "ecomp/property_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "ecomp/decomposition.hpp"
#include "ecomp/duality.hpp"
#include "ecomp/iu_benchmark.hpp"
#include "ecomp/lp_oracle.hpp"
#include "ecomp/myerson.hpp"
#include "ecomp/random_instances.hpp"
#include "ecomp/simple_auctions.hpp"

namespace ecomp {

namespace {

constexpr double kTol = 1e-9;
constexpr double kExactTol = 1e-12;
constexpr double kLpTol = 1e-6;

class Tracker {
 public:
  explicit Tracker(std::string name) { result_.name = std::move(name); }

  void begin_instance() {
    ++result_.instances;
    failed_ = false;
  }

  // Records rhs - lhs; holds when lhs <= rhs up to the relative tolerance.
  void leq(double lhs, double rhs, double tolerance, const std::string& what) {
    record(rhs - lhs, leq_tol(lhs, rhs, tolerance), what);
  }

  // Absolute bound on |a - b|.
  void near(double a, double b, double tolerance, const std::string& what) {
    const double gap = std::abs(a - b);
    record(-gap, gap <= tolerance, what);
  }

  void record(double slack, bool holds, const std::string& what) {
    if (!seen_ || slack < result_.worst_slack) result_.worst_slack = slack;
    seen_ = true;
    if (holds) return;
    if (!failed_) ++result_.failures;
    failed_ = true;
    if (result_.first_failure.empty()) {
      std::ostringstream msg;
      msg << "instance " << result_.instances - 1 << ": " << what << " (slack " << slack << ")";
      result_.first_failure = msg.str();
    }
  }

  SuiteResult finish() && { return std::move(result_); }

 private:
  SuiteResult result_;
  bool seen_ = false;
  bool failed_ = false;
};

using Suite = std::function<void(Rng&, Tracker&, const VerifyBounds&)>;

InstanceBounds instance_bounds(const VerifyBounds& b, bool regular = false) {
  InstanceBounds out;
  out.max_items = b.max_items;
  out.max_support = b.max_support;
  out.max_value = b.max_value;
  out.regular = regular;
  return out;
}

int draw_n(Rng& rng, const VerifyBounds& b) { return static_cast<int>(rng.uniform_int(1, b.max_n)); }

int draw_n_prime(Rng& rng, int n, const VerifyBounds& b) {
  return static_cast<int>(rng.uniform_int(n, std::max(n, b.max_n_prime)));
}

void ironing_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const ItemDistribution item = random_item(rng, 1, b.max_support, b.max_value);
  const IronedTable table = iron(item);
  const std::size_t k = item.size();
  double mean_phi = 0.0;
  double mean_tilde = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    t.leq(table.phi_tilde[i], item.value(i), kExactTol, "ironed value above identity");
    if (i + 1 < k) t.leq(table.phi_tilde[i], table.phi_tilde[i + 1], kExactTol, "ironed values decrease");
    mean_phi += item.prob(i) * table.phi[i];
    mean_tilde += item.prob(i) * table.phi_tilde[i];
  }
  t.near(mean_phi, mean_tilde, kExactTol, "global mean not preserved");
  for (std::size_t lo = 0; lo < k;) {
    std::size_t hi = lo;
    while (hi + 1 < k && table.phi_tilde[hi + 1] == table.phi_tilde[lo]) ++hi;
    double mass = 0.0;
    double weighted = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
      mass += item.prob(i);
      weighted += item.prob(i) * table.phi[i];
    }
    t.near(weighted / mass, table.phi_tilde[lo], kExactTol, "plateau mean mismatch");
    lo = hi + 1;
  }
  for (std::size_t floor = 0; floor < k; ++floor) {
    const RestrictedIroning r = iron_restricted_at(item, floor);
    double tail_r = 0.0;
    double tail_phi = 0.0;
    for (std::size_t i = k; i-- > floor;) {
      tail_r += item.prob(i) * r.at(i);
      tail_phi += item.prob(i) * table.phi[i];
      t.leq(r.at(i), table.phi_tilde[i], kExactTol, "restricted ironing above full ironing");
      t.leq(tail_phi, tail_r, kExactTol, "restricted partial sums below phi partial sums");
    }
    t.near(tail_r, tail_phi, kExactTol, "restricted partial sum not tight at the floor");
  }
}

void posted_price_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const ItemDistribution item = random_item(rng, 1, b.max_support, b.max_value);
  double best = 0.0;
  for (std::size_t i = 0; i < item.size(); ++i) best = std::max(best, item.value(i) * item.survival_at(i));
  t.near(srev_item(item, 1), best, kTol * (1.0 + best), "srev differs from the best posted price");
}

void appendix_bounds_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const AuctionSetting setting = random_setting(rng, instance_bounds(b));
  const int n = draw_n(rng, b);
  const double s = srev(setting, n);
  t.leq(ronen_bound(setting, n), s, kTol, "ronen bound above srev");
  for (std::size_t j = 0; j < setting.num_items(); ++j) {
    const double s_j = srev_item(setting.item(j), n);
    t.leq(vcg_with_reserve_bound(setting, j, 0.0, n), s_j, kTol, "reserve VCG at zero above srev");
    for (double x : setting.item(j).values()) {
      t.leq(vcg_with_reserve_bound(setting, j, x, n), s_j, kTol, "reserve VCG above srev");
    }
  }
  std::vector<std::vector<double>> prices(static_cast<std::size_t>(n));
  for (auto& row : prices) {
    for (const ItemDistribution& item : setting.items()) {
      const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(item.size()) - 1));
      row.push_back(item.value(i));
    }
  }
  t.leq(sequential_posted_price_bound(setting, prices, n), s, kTol, "posted prices above srev");
}

void step2_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const AuctionSetting setting = random_setting(rng, instance_bounds(b));
  const int n = draw_n(rng, b);
  const int n_prime = draw_n_prime(rng, std::max(n, 2), b);
  const InequalityCheck c = step2_inequality_check(setting, n, n_prime, kTol);
  t.record(c.slack, c.holds, "step-2 inequality");
}

void iu_monotone_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const AuctionSetting setting = random_setting(rng, instance_bounds(b));
  const int n_prime = static_cast<int>(rng.uniform_int(1, b.max_n_prime));
  const IUTables tables = build_iu_tables(setting, n_prime);
  double previous = 0.0;
  for (int n = 1; n <= std::max(b.max_n, n_prime); ++n) {
    const double value = iu_from_tables(tables, n);
    t.leq(previous, value, kTol, "iu decreases in the bidder count");
    previous = value;
  }
}

void record_chain(Tracker& t, const DecompositionReport& report) {
  for (const CheckRecord& c : report.checks) t.record(c.slack, c.holds, c.name);
}

void chain_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const AuctionSetting setting = random_setting(rng, instance_bounds(b));
  const int n = draw_n(rng, b);
  const int n_prime = draw_n_prime(rng, n, b);
  ChainOptions options;
  options.tolerance = kTol;
  options.regular_branch = RegularBranch::kSkip;
  record_chain(t, lemma_chain_check(setting, n, n_prime, options));
}

void regular_chain_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const AuctionSetting setting = random_setting(rng, instance_bounds(b, true));
  const int n = draw_n(rng, b);
  const int n_prime = draw_n_prime(rng, n, b);
  ChainOptions options;
  options.tolerance = kTol;
  options.regular_branch = RegularBranch::kRequire;
  record_chain(t, lemma_chain_check(setting, n, n_prime, options));
}

void bulow_klemperer_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const AuctionSetting setting = random_setting(rng, instance_bounds(b, true));
  const int n = draw_n(rng, b);
  const BulowKlempererCheck c = bulow_klemperer_check(setting, n, kTol);
  t.record(c.vcg_n_plus_1 - c.srev_n, c.applicable && c.holds, "srev(n) above vcg(n + 1)");
}

void variance_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const ScalarDistribution law = random_law(rng, b.max_support, b.max_value);
  const VarianceBound c = variance_ub_check(law, kTol);
  t.record(c.rhs - c.lhs, c.holds, "second moment above the tail bound");
}

void tie_break_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const ScalarDistribution law = random_law(rng, std::min(b.max_support, 4), b.max_value);
  const int k = static_cast<int>(rng.uniform_int(1, 4));
  const double deviation = tie_break_independence_check(law, k);
  t.record(-deviation, deviation <= kExactTol, "tie-break index correlated with the max");
}

bool lp_tractable(const AuctionSetting& setting, int n) {
  const double profiles = std::pow(static_cast<double>(setting.valuation_count()), n);
  return profiles <= 36.0;
}

void lp_duality_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  const AuctionSetting setting = random_setting(rng, instance_bounds(b));
  const int n = draw_n(rng, b);
  const int n_prime = draw_n_prime(rng, n, b);
  if (!lp_tractable(setting, n)) return;
  const MechanismSolution solution = optimal_revenue(setting, n);
  const double violation = incentive_violation(solution);
  t.record(-violation, violation <= kLpTol, "LP mechanism violates incentive constraints");
  t.leq(srev(setting, n), solution.revenue, kLpTol, "LP revenue below srev");
  t.leq(solution.revenue, iu(setting, n, n_prime), kLpTol, "LP revenue above iu");
  if (setting.num_items() == 1) {
    t.near(solution.revenue, srev(setting, n), kLpTol, "single-item LP differs from srev");
  }
}

void dual_certificate_suite(Rng& rng, Tracker& t, const VerifyBounds& b) {
  VerifyBounds tiny = b;
  tiny.max_support = std::min(b.max_support, 2);
  const AuctionSetting setting = random_setting(rng, instance_bounds(tiny));
  const int n_prime = draw_n_prime(rng, 1, b);
  const AveragedCertificate c = verify_dual_certificate_averaged(setting, 1, n_prime, nullptr, kLpTol);
  t.record(-c.worst_flow_residual, c.worst_flow_residual <= kTol, "flow conservation residual");
  t.record(-c.worst_phi_match, c.worst_phi_match <= kTol, "flow virtual values differ from the region form");
  t.record(c.averaged_bound - c.revenue, c.revenue_le_bound, "LP revenue above the averaged bound");
  t.record(c.iu - c.averaged_bound, c.bound_le_iu, "averaged bound above iu");
}

struct NamedSuite {
  const char* name;
  Suite run;
};

}  // namespace

std::vector<SuiteResult> run_property_suites(std::uint64_t seed, int count,
                                             const VerifyBounds& bounds) {
  static const NamedSuite kSuites[] = {
      {"ironing", ironing_suite},
      {"posted_price", posted_price_suite},
      {"simple_bounds", appendix_bounds_suite},
      {"step2", step2_suite},
      {"iu_monotone", iu_monotone_suite},
      {"chain", chain_suite},
      {"regular_chain", regular_chain_suite},
      {"bulow_klemperer", bulow_klemperer_suite},
      {"variance", variance_suite},
      {"tie_break", tie_break_suite},
      {"lp_duality", lp_duality_suite},
      {"dual_certificate", dual_certificate_suite},
  };
  std::vector<SuiteResult> results;
  std::uint64_t suite_index = 0;
  for (const NamedSuite& suite : kSuites) {
    Tracker tracker(suite.name);
    const std::uint64_t suite_seed = derive_seed(seed, suite_index++);
    for (int i = 0; i < count; ++i) {
      Rng rng(suite_seed, static_cast<std::uint64_t>(i));
      tracker.begin_instance();
      try {
        suite.run(rng, tracker, bounds);
      } catch (const Error& e) {
        tracker.record(-std::numeric_limits<double>::infinity(), false,
                       std::string("error: ") + e.what());
      }
    }
    results.push_back(std::move(tracker).finish());
  }
  return results;
}

}  // namespace ecomp
