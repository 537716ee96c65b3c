// Acceptance run: one PASS/FAIL line per criterion. Every tolerance, instance
// count and runtime limit is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ecomp/decomposition.hpp"
#include "ecomp/duality.hpp"
#include "ecomp/iu_benchmark.hpp"
#include "ecomp/lp_oracle.hpp"
#include "ecomp/myerson.hpp"
#include "ecomp/random_instances.hpp"
#include "ecomp/simple_auctions.hpp"

using namespace ecomp;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Tally {
  int instances = 0;
  int failures = 0;
  double worst = 0.0;  // smallest slack seen
  std::string first;

  void check(bool holds, double slack, const std::string& what) {
    worst = std::min(worst, slack);
    if (holds) return;
    ++failures;
    if (first.empty()) first = what;
  }

  std::string summary() const {
    char buffer[256];
    std::snprintf(buffer, sizeof buffer, "%d instances, %d failures, worst slack %.3g", instances, failures,
                  worst);
    std::string out = buffer;
    if (!first.empty()) out += "; first: " + first;
    return out;
  }
};

Rng rng_for(int criterion, int instance) {
  return Rng(derive_seed(kSeed, static_cast<std::uint64_t>(criterion)), static_cast<std::uint64_t>(instance));
}

AuctionSetting draw_setting(Rng& rng, int max_items, int max_support, bool regular) {
  InstanceBounds b;
  b.max_items = max_items;
  b.max_support = max_support;
  b.regular = regular;
  return random_setting(rng, b);
}

int draw(Rng& rng, int lo, int hi) { return static_cast<int>(rng.uniform_int(lo, hi)); }

std::string num(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", x);
  return buffer;
}

// 1. Ironing correctness.
Outcome ironing() {
  constexpr double kTol = 1e-12;
  Tally t;
  for (int i = 0; i < 1000; ++i) {
    Rng rng = rng_for(1, i);
    const ItemDistribution item = random_item(rng, 1, 6, 30);
    const IronedTable table = iron(item);
    ++t.instances;
    const std::size_t k = item.size();
    double mean_phi = 0.0;
    double mean_tilde = 0.0;
    for (std::size_t v = 0; v < k; ++v) {
      t.check(table.phi_tilde[v] <= item.value(v) + kTol, item.value(v) - table.phi_tilde[v], "above identity");
      if (v + 1 < k) {
        const double gap = table.phi_tilde[v + 1] - table.phi_tilde[v];
        t.check(gap >= -kTol, gap, "not monotone");
      }
      mean_phi += item.prob(v) * table.phi[v];
      mean_tilde += item.prob(v) * table.phi_tilde[v];
    }
    t.check(std::abs(mean_phi - mean_tilde) <= kTol, -std::abs(mean_phi - mean_tilde), "global mean");
    for (std::size_t lo = 0; lo < k;) {
      std::size_t hi = lo;
      while (hi + 1 < k && table.phi_tilde[hi + 1] == table.phi_tilde[lo]) ++hi;
      double mass = 0.0;
      double weighted = 0.0;
      for (std::size_t v = lo; v <= hi; ++v) {
        mass += item.prob(v);
        weighted += item.prob(v) * table.phi[v];
      }
      const double gap = std::abs(weighted / mass - table.phi_tilde[lo]);
      t.check(gap <= kTol, -gap, "plateau mean");
      lo = hi + 1;
    }
  }
  const IronedTable d3 = iron(make_item_distribution({4, 5, 10}, {0.6, 0.2, 0.2}));
  const std::vector<double> expected = {2.5, 2.5, 10.0};
  bool d3_ok = !d3.regular;
  for (std::size_t v = 0; v < 3; ++v) d3_ok = d3_ok && std::abs(d3.phi_tilde[v] - expected[v]) <= kTol;
  return {t.failures == 0 && d3_ok,
          t.summary() + "; D3 ironed (" + num(d3.phi_tilde[0]) + ", " + num(d3.phi_tilde[1]) + ", " +
              num(d3.phi_tilde[2]) + ")"};
}

// 2. Myerson and LP agree on single items.
Outcome myerson_lp() {
  constexpr double kTol = 1e-6;
  Tally t;
  for (int i = 0; i < 200; ++i) {
    Rng rng = rng_for(2, i);
    const ItemDistribution item = random_item(rng, 1, 3, 10);
    const AuctionSetting s({item});
    for (int n = 1; n <= 2; ++n) {
      ++t.instances;
      const double gap = std::abs(srev_item(item, n) - optimal_revenue(s, n).revenue);
      t.check(gap <= kTol, -gap, "instance " + std::to_string(i) + " n=" + std::to_string(n));
    }
  }
  return {t.failures == 0, t.summary()};
}

// 3. Optimal revenue never exceeds the benchmark.
Outcome step1_duality() {
  constexpr double kTol = 1e-6;
  Tally t;
  for (int i = 0; i < 200; ++i) {
    Rng rng = rng_for(3, i);
    const AuctionSetting s = draw_setting(rng, 2, 2, false);
    const int n = draw(rng, 1, 2);
    const double rev = optimal_revenue(s, n).revenue;
    ++t.instances;
    for (int n_prime = 1; n_prime <= 5; ++n_prime) {
      const double bench = iu(s, n, n_prime);
      t.check(rev <= bench + kTol, bench - rev, "instance " + std::to_string(i));
    }
  }
  return {t.failures == 0, t.summary()};
}

// 4. Unconditional step-2 inequality.
Outcome step2() {
  constexpr double kTol = 1e-9;
  Tally t;
  for (int i = 0; i < 500; ++i) {
    Rng rng = rng_for(4, i);
    const AuctionSetting s = draw_setting(rng, 2, 3, false);
    const int n = draw(rng, 1, 3);
    const int cap = s.num_items() == 1 ? 40 : 12;
    const int n_prime = draw(rng, std::max(n, 2), cap);
    ++t.instances;
    const InequalityCheck c = step2_inequality_check(s, n, n_prime, kTol);
    t.check(c.holds, c.slack, "instance " + std::to_string(i));
  }
  return {t.failures == 0, t.summary()};
}

// 5. Simple-auction lower bounds on separate sale.
Outcome simple_bounds() {
  constexpr double kTol = 1e-9;
  Tally t;
  for (int i = 0; i < 500; ++i) {
    Rng rng = rng_for(5, i);
    const AuctionSetting s = draw_setting(rng, 2, 4, i % 2 == 0);
    const int n = draw(rng, 1, 4);
    ++t.instances;
    const double sr = srev(s, n);
    const std::string tag = "instance " + std::to_string(i);
    const double ron = ronen_bound(s, n);
    t.check(leq_tol(ron, sr, kTol), sr - ron, tag + " ronen");
    for (std::size_t j = 0; j < s.num_items(); ++j) {
      const double sj = srev_item(s.item(j), n);
      std::vector<double> reserves = {0.0};
      for (double x : s.item(j).values()) reserves.push_back(x);
      for (double x : reserves) {
        const double r = vcg_with_reserve_bound(s, j, x, n);
        t.check(leq_tol(r, sj, kTol), sj - r, tag + " reserve");
      }
    }
    for (int draw_index = 0; draw_index < 4; ++draw_index) {
      std::vector<std::vector<double>> prices(static_cast<std::size_t>(n));
      for (auto& row : prices) {
        for (const auto& item : s.items()) {
          row.push_back(item.value(static_cast<std::size_t>(draw(rng, 0, static_cast<int>(item.size()) - 1))));
        }
      }
      const double spp = sequential_posted_price_bound(s, prices, n);
      t.check(leq_tol(spp, sr, kTol), sr - spp, tag + " posted prices");
    }
  }
  return {t.failures == 0, t.summary()};
}

bool link_a_to_f(const std::string& name) {
  return name.size() > 2 && name[1] == '_' && name[0] >= 'a' && name[0] <= 'f';
}

// 6. Decomposition chain, links (a) to (f).
Outcome chain() {
  constexpr double kTol = 1e-9;
  Tally t;
  for (int i = 0; i < 200; ++i) {
    Rng rng = rng_for(6, i);
    const AuctionSetting s = draw_setting(rng, 2, 3, false);
    const int n = draw(rng, 1, 2);
    const int n_prime = draw(rng, n, 6);
    ChainOptions options;
    options.tolerance = kTol;
    options.regular_branch = RegularBranch::kSkip;
    const DecompositionReport r = lemma_chain_check(s, n, n_prime, options);
    ++t.instances;
    for (const CheckRecord& c : r.checks) {
      if (link_a_to_f(c.name)) t.check(c.holds, c.slack, c.name + " on instance " + std::to_string(i));
    }
  }
  return {t.failures == 0, t.summary()};
}

// 7. Regular branch, link (g).
Outcome regular_branch() {
  constexpr double kTol = 1e-9;
  Tally t;
  int bk_step_failures = 0;
  for (int i = 0; i < 100; ++i) {
    Rng rng = rng_for(7, i);
    const AuctionSetting s = draw_setting(rng, 2, 3, true);
    const int n = draw(rng, 1, 2);
    const int n_prime = draw(rng, n, 6);
    ChainOptions options;
    options.tolerance = kTol;
    options.regular_branch = RegularBranch::kRequire;
    const DecompositionReport r = lemma_chain_check(s, n, n_prime, options);
    ++t.instances;
    for (const char* name : {"g_iu_n_le_17_pi_floor", "g_iu_nprime_le_17_pi_floor", "g_nice_on_high_pairs",
                             "g_s_all_le_4_revenue_lb", "g_core_high_low_split"}) {
      const CheckRecord* c = r.find(name);
      if (!c) {
        t.check(false, 0.0, std::string(name) + " missing");
        continue;
      }
      t.check(c->holds, c->slack, c->name + " on instance " + std::to_string(i));
    }
    const CheckRecord* bk = r.find("g_srev_le_vcg_next");
    if (bk && !bk->holds) ++bk_step_failures;
  }
  return {t.failures == 0, t.summary() + "; SRev(n') <= VCG(n'+1) step failed on " +
                               std::to_string(bk_step_failures) + " of them (see criterion 10)"};
}

// 8. Variance machinery.
Outcome variance_machinery() {
  constexpr double kTol = 1e-9;
  Tally t;
  const auto per_entry = [&](const AuctionSetting& s, int n_prime) {
    const UtilityStats stats = build_utility_stats(s, n_prime);
    for (const MaxVectorStats& e : stats.entries) {
      const double rhs = 2.0 * e.r_ron_total * e.r_ron_total;
      t.check(leq_tol(e.var_u_hat, rhs, kTol), rhs - e.var_u_hat, "capped utility variance");
    }
  };
  for (int i = 0; i < 200; ++i) {
    Rng rng = rng_for(6, i);
    const AuctionSetting s = draw_setting(rng, 2, 3, false);
    const int n = draw(rng, 1, 2);
    per_entry(s, draw(rng, n, 6));
    ++t.instances;
  }
  for (int i = 0; i < 100; ++i) {
    Rng rng = rng_for(7, i);
    const AuctionSetting s = draw_setting(rng, 2, 3, true);
    const int n = draw(rng, 1, 2);
    per_entry(s, draw(rng, n, 6));
    ++t.instances;
  }
  for (int i = 0; i < 1000; ++i) {
    Rng rng = rng_for(8, i);
    const VarianceBound b = variance_ub_check(random_law(rng, 6, 50), kTol);
    ++t.instances;
    t.check(b.holds, b.rhs - b.lhs, "second-moment bound");
  }
  return {t.failures == 0, t.summary()};
}

// 9. Tie-break independence.
Outcome tie_break() {
  constexpr double kTol = 1e-12;
  Tally t;
  for (int size = 1; size <= 4; ++size) {
    for (int i = 0; i < 50; ++i) {
      Rng rng = rng_for(9, size * 1000 + i);
      const ScalarDistribution law = random_item(rng, size, size, 10).law();
      for (int k = 1; k <= 6; ++k) {
        ++t.instances;
        const double dev = tie_break_independence_check(law, k);
        t.check(dev <= kTol, -dev, "support " + std::to_string(size) + " k=" + std::to_string(k));
      }
    }
  }
  return {t.failures == 0, t.summary()};
}

// 10. Bulow-Klemperer on regular items.
Outcome bulow_klemperer() {
  constexpr double kTol = 1e-9;
  Tally t;
  for (int i = 0; i < 300; ++i) {
    Rng rng = rng_for(10, i);
    const AuctionSetting s = draw_setting(rng, 2, 3, true);
    const int n = draw(rng, 1, 4);
    const BulowKlempererCheck c = bulow_klemperer_check(s, n, kTol);
    ++t.instances;
    std::string what = "instance " + std::to_string(i) + " n=" + std::to_string(n) + " srev " + num(c.srev_n) +
                       " vcg " + num(c.vcg_n_plus_1);
    t.check(c.applicable && c.holds, c.vcg_n_plus_1 - c.srev_n, what);
  }
  const AuctionSetting d2({make_item_distribution({1, 2}, {0.5, 0.5})});
  const BulowKlempererCheck eq = bulow_klemperer_check(d2, 2, kTol);
  const bool d2_ok = eq.holds && std::abs(eq.srev_n - 1.5) <= kTol && std::abs(eq.vcg_n_plus_1 - 1.5) <= kTol;
  return {t.failures == 0 && d2_ok,
          t.summary() + "; D2 n=2 (" + num(eq.srev_n) + ", " + num(eq.vcg_n_plus_1) + ")"};
}

// 11. Dual certificate.
Outcome dual_certificate() {
  constexpr double kFlowTol = 1e-9;
  constexpr double kBoundTol = 1e-6;
  Tally t;
  for (int i = 0; i < 100; ++i) {
    Rng rng = rng_for(11, i);
    const AuctionSetting s = draw_setting(rng, 2, 2, false);
    const int n_prime = draw(rng, 1, 5);
    const MechanismSolution mech = optimal_revenue(s, 1);
    ++t.instances;
    const std::string tag = "instance " + std::to_string(i);
    max_vector_distribution(s, n_prime - 1).joint(s.caps()).for_each(
        [&](std::size_t, std::span<const double> m, double) {
          const DualCertificateCheck c =
              verify_dual_certificate(s, 1, n_prime, {m.begin(), m.end()}, &mech, kBoundTol);
          t.check(c.flow_residual_max <= kFlowTol, -c.flow_residual_max, tag + " flow residual");
          t.check(c.phi_match_max <= kFlowTol, -c.phi_match_max, tag + " virtual values");
          t.check(c.min_entry >= -kFlowTol, c.min_entry, tag + " negative flow");
          t.check(c.bound_holds, c.bound - c.revenue, tag + " per-max-vector bound");
        });
    const AveragedCertificate avg = verify_dual_certificate_averaged(s, 1, n_prime, &mech, kBoundTol);
    t.check(avg.revenue_le_bound, avg.averaged_bound - avg.revenue, tag + " averaged bound");
    t.check(avg.bound_le_iu, avg.iu - avg.averaged_bound, tag + " bound above benchmark");
  }
  return {t.failures == 0, t.summary()};
}

// 12. Monte-Carlo consistency.
Outcome monte_carlo() {
  constexpr std::uint64_t kSamples = 1'000'000;
  constexpr double kSigmas = 4.0;
  const ItemDistribution d2 = make_item_distribution({1, 2}, {0.5, 0.5});
  const ItemDistribution d3 = make_item_distribution({4, 5, 10}, {0.6, 0.2, 0.2});
  struct Case {
    AuctionSetting setting;
    int n;
    int n_prime;
  };
  const std::vector<Case> cases = {
      {AuctionSetting({d2}), 1, 2},
      {AuctionSetting({d2}), 2, 2},
      {AuctionSetting({d3}), 1, 3},
      {AuctionSetting({make_item_distribution({3}, {1.0})}), 1, 4},
      {AuctionSetting({d2, d2}), 1, 2},
      {AuctionSetting({d2, d3}), 2, 5},
  };
  Tally t;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
    const double exact = iu(c.setting, c.n, c.n_prime);
    const MonteCarloEstimate est = monte_carlo_iu(c.setting, c.n, c.n_prime, kSamples, kSeed + i);
    ++t.instances;
    const double se = est.std_error.value_or(0.0);
    const double gap = std::abs(est.estimate - exact);
    if (se > 0.0) worst_z = std::max(worst_z, gap / se);
    t.check(gap <= kSigmas * se + 1e-12, kSigmas * se - gap, "case " + std::to_string(i));
  }
  const MonteCarloEstimate a = monte_carlo_iu(cases[5].setting, 2, 5, kSamples, 77);
  const MonteCarloEstimate b = monte_carlo_iu(cases[5].setting, 2, 5, kSamples, 77);
  const bool identical = a.estimate == b.estimate && a.std_error == b.std_error;
  return {t.failures == 0 && identical,
          t.summary() + "; worst |z| " + num(worst_z) + (identical ? "; reruns identical" : "; reruns differ")};
}

// 13. Theorem verdict smoke test.
Outcome theorem_verdict() {
  const std::vector<std::pair<std::string, ItemDistribution>> items = {
      {"D2", make_item_distribution({1, 2}, {0.5, 0.5})},
      {"point mass", make_item_distribution({3}, {1.0})},
      {"D3", make_item_distribution({4, 5, 10}, {0.6, 0.2, 0.2})},
  };
  Tally t;
  for (const auto& [name, item] : items) {
    for (double eps : {0.5, 1.0}) {
      for (int n_prime = 1; n_prime <= 6; ++n_prime) {
        const TheoremVerdict v = main_theorem_verdict(AuctionSetting({item}), 1, eps, n_prime);
        ++t.instances;
        t.check(v.holds, 0.0, name + " eps=" + num(eps) + " n'=" + std::to_string(n_prime) + " branch " +
                                  std::string(to_string(v.branch)));
      }
    }
  }
  return {t.failures == 0, t.summary()};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "ironing correctness", 1.0, ironing},
      {2, "Myerson/LP agreement", 30.0, myerson_lp},
      {3, "optimal revenue at most the benchmark", 60.0, step1_duality},
      {4, "unconditional step-2 inequality", 30.0, step2},
      {5, "simple-auction bounds below SRev", 30.0, simple_bounds},
      {6, "decomposition chain links (a)-(f)", 60.0, chain},
      {7, "regular branch link (g)", 60.0, regular_branch},
      {8, "variance machinery", 5.0, variance_machinery},
      {9, "tie-break independence", 5.0, tie_break},
      {10, "Bulow-Klemperer on regular items", 10.0, bulow_klemperer},
      {11, "dual certificate", 60.0, dual_certificate},
      {12, "Monte-Carlo consistency", 60.0, monte_carlo},
      {13, "theorem verdict smoke test", 10.0, theorem_verdict},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.limit_seconds;
    const bool pass = outcome.ok && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s criterion %2d %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str(), seconds, c.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
