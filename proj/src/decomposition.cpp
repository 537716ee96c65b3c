#include "ecomp/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ecomp/lp_oracle.hpp"
#include "ecomp/myerson.hpp"
#include "ecomp/simple_auctions.hpp"

namespace ecomp {

namespace {

bool within_cap(double utility, double cap, CoreBoundary boundary) {
  return boundary == CoreBoundary::kInclusive ? utility <= cap : utility < cap;
}

double capped_utility(double v, double m, double cap, CoreBoundary boundary) {
  const double u = std::max(v - m, 0.0);
  return within_cap(u, cap, boundary) ? u : 0.0;
}

double vcg_or_zero(const AuctionSetting& setting, int n) {
  return n >= 2 ? vcg_revenue(setting, n) : 0.0;
}

// Pr_{v_k}(v_k - m_k < u) for one item.
double utility_below(const ItemDistribution& item, double m_k, double u) {
  double p = 0.0;
  for (std::size_t i = 0; i < item.size(); ++i) {
    if (item.value(i) - m_k < u) p += item.prob(i);
  }
  return p;
}

// Pr_{v_{-j}}(some other item's utility is at least u).
double surplus_event_probability(const AuctionSetting& setting, const std::vector<double>& maxvec,
                                 std::size_t j, double u) {
  double none = 1.0;
  for (std::size_t k = 0; k < setting.num_items(); ++k) {
    if (k != j) none *= utility_below(setting.item(k), maxvec[k], u);
  }
  return 1.0 - none;
}

// Tracks the tightest point of a pointwise inequality lhs <= rhs.
class Pointwise {
 public:
  explicit Pointwise(double tolerance) : tolerance_(tolerance) {}

  void add(double lhs, double rhs) {
    if (rhs - lhs < -tolerance_) ok_ = false;
    if (!seen_ || rhs - lhs < rhs_ - lhs_) {
      lhs_ = lhs;
      rhs_ = rhs;
      seen_ = true;
    }
  }

  CheckRecord record(std::string name, std::string anchor) const {
    CheckRecord r{std::move(name), lhs_, rhs_, rhs_ - lhs_, ok_, std::move(anchor)};
    return r;
  }

 private:
  double tolerance_;
  double lhs_ = 0.0;
  double rhs_ = 0.0;
  bool seen_ = false;
  bool ok_ = true;
};

struct Workspace {
  MaxVectorDistribution maxvec;
  IUTables tables;
  UtilityStats stats;
};

Workspace make_workspace(const AuctionSetting& setting, int n_prime, CoreBoundary boundary) {
  Workspace ws;
  ws.tables = build_iu_tables(setting, n_prime);
  ws.stats = build_utility_stats(setting, n_prime, boundary);
  ws.maxvec = max_vector_distribution(setting, n_prime - 1);
  return ws;
}

DecompositionReport terms_from(const AuctionSetting& setting, const Workspace& ws) {
  const int np = ws.stats.n_prime;
  const double scale = np;
  const std::size_t m = setting.num_items();
  DecompositionReport report;
  report.n_prime = np;
  report.boundary = ws.stats.boundary;

  std::vector<std::vector<Atom>> single_atoms(m);
  ws.tables.valuations.for_each([&](std::size_t index, std::span<const double>, double prob) {
    const auto digits = ws.tables.valuations.digits_of(index);
    for (std::size_t j = 0; j < m; ++j) {
      const double phi = std::max(ws.tables.ironed[j].phi_tilde[digits[j]], 0.0);
      single_atoms[j].push_back({phi * ws.tables.p_region[index][j], prob});
    }
  });
  for (std::size_t j = 0; j < m; ++j) {
    const ItemDistribution& item = setting.item(j);
    const ScalarDistribution& max_j = ws.maxvec.per_item[j];
    report.single += iid_max_expectation(ScalarDistribution::from_atoms(std::move(single_atoms[j])), np);
    std::vector<Atom> under;
    std::vector<Atom> over;
    for (std::size_t i = 0; i < item.size(); ++i) {
      const double x = item.value(i);
      under.push_back({x * (1.0 - max_j.cdf(x)), item.prob(i)});
      double g = 0.0;
      for (const Atom& a : max_j.atoms()) {
        if (a.value <= x) g += a.prob * a.value;
      }
      over.push_back({g, item.prob(i)});
    }
    report.under += iid_max_expectation(ScalarDistribution::from_atoms(std::move(under)), np);
    report.over += iid_max_expectation(ScalarDistribution::from_atoms(std::move(over)), np);
  }

  for (const MaxVectorStats& e : ws.stats.entries) {
    const double w = scale * e.prob;
    report.core += w * e.e_u_hat;
    report.ronen_sum += w * e.r_ron_total;
    for (std::size_t j = 0; j < m; ++j) {
      const ItemDistribution& item = setting.item(j);
      double above = 0.0;
      for (std::size_t i = 0; i < item.size(); ++i) {
        const double u = item.value(i) - e.maxvec[j];
        if (u < 0.0) continue;
        const double srp = surplus_event_probability(setting, e.maxvec, j, u);
        const double term = item.prob(i) * u * srp;
        report.surplus_bound += w * term;
        if (!within_cap(u, e.r_ron_total, ws.stats.boundary)) {
          report.tail_exact += w * term;
          above += item.prob(i);
        }
      }
      report.tail_unclipped += w * e.r_ron_total * above;
      report.tail += w * std::min(e.r_ron_total * above, e.r_star[j]);
    }
  }

  const FeeConstruction fees = bvcg_constructed_revenue(ws.stats);
  const SpecialBidderConstruction pi = pi_bvcg_constructed_revenue(ws.stats);
  report.fee_mass = fees.fee_mass;
  report.participation_lb = fees.participation_lb;
  report.revenue_lb = pi.revenue_lb;
  report.s_all = pi.s_all;
  report.srev_nprime = srev(setting, np);
  report.vcg_nprime = vcg_or_zero(setting, np);
  report.vcg_nprime_plus_1 = vcg_revenue(setting, np + 1);
  report.bvcg_floor = std::max(report.participation_lb, report.vcg_nprime);
  report.pi_bvcg_floor = std::max(report.revenue_lb, report.vcg_nprime_plus_1);
  report.all_regular = std::all_of(ws.tables.ironed.begin(), ws.tables.ironed.end(),
                                   [](const IronedTable& t) { return t.regular; });
  return report;
}

}  // namespace

ScalarDistribution sum_of_independent(const std::vector<ScalarDistribution>& laws) {
  ScalarDistribution total;
  for (const auto& law : laws) {
    std::vector<Atom> atoms;
    atoms.reserve(total.size() * law.size());
    for (const Atom& a : total.atoms()) {
      for (const Atom& b : law.atoms()) atoms.push_back({a.value + b.value, a.prob * b.prob});
    }
    total = ScalarDistribution::from_atoms(std::move(atoms));
  }
  return total;
}

ScalarDistribution capped_utility_law_by_enumeration(const AuctionSetting& setting,
                                                     const std::vector<double>& maxvec,
                                                     double cap, CoreBoundary boundary) {
  const ProductSpace space = valuation_space(setting);
  std::vector<Atom> atoms;
  atoms.reserve(space.size());
  space.for_each([&](std::size_t, std::span<const double> v, double prob) {
    double total = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) total += capped_utility(v[j], maxvec[j], cap, boundary);
    atoms.push_back({total, prob});
  });
  return ScalarDistribution::from_atoms(std::move(atoms));
}

UtilityStats build_utility_stats(const AuctionSetting& setting, int n_prime, CoreBoundary boundary) {
  if (n_prime < 1) fail(ErrorCode::kInvalidSetting, "n_prime must be positive");
  if (n_prime > setting.caps().max_n_prime) {
    fail(ErrorCode::kEnumerationCapExceeded, "n_prime exceeds the exact-mode cap; use monte_carlo mode");
  }
  const MaxVectorDistribution maxvec = max_vector_distribution(setting, n_prime - 1);
  const ProductSpace joint = maxvec.joint(setting.caps());
  const std::size_t valuations = setting.valuation_count();
  if (valuations > setting.caps().max_valuations ||
      joint.size() > setting.caps().max_joint_terms / valuations) {
    fail(ErrorCode::kEnumerationCapExceeded,
         "utility tables exceed the joint enumeration cap; use monte_carlo mode");
  }
  const std::size_t m = setting.num_items();
  std::vector<RonenTable> ronen;
  for (const auto& item : setting.items()) ronen.emplace_back(item);

  UtilityStats stats;
  stats.n_prime = n_prime;
  stats.boundary = boundary;
  stats.entries.reserve(joint.size());
  joint.for_each([&](std::size_t, std::span<const double> coords, double prob) {
    MaxVectorStats e;
    e.maxvec.assign(coords.begin(), coords.end());
    e.prob = prob;
    for (std::size_t j = 0; j < m; ++j) {
      e.r_star.push_back(ronen[j].at(coords[j]).revenue);
      e.r_ron_total += e.r_star.back();
    }
    std::vector<ScalarDistribution> util;
    for (std::size_t j = 0; j < m; ++j) {
      e.thresholds.push_back(e.r_ron_total + coords[j]);
      const ItemDistribution& item = setting.item(j);
      std::vector<Atom> raw;
      std::vector<Atom> capped;
      for (std::size_t i = 0; i < item.size(); ++i) {
        raw.push_back({std::max(item.value(i) - coords[j], 0.0), item.prob(i)});
        capped.push_back({capped_utility(item.value(i), coords[j], e.r_ron_total, boundary), item.prob(i)});
      }
      util.push_back(ScalarDistribution::from_atoms(std::move(raw)));
      e.law_util_hat.push_back(ScalarDistribution::from_atoms(std::move(capped)));
      e.e_u_hat += e.law_util_hat.back().mean();
      e.var_u_hat += variance(e.law_util_hat.back());
    }
    e.law_u = sum_of_independent(util);
    e.law_u_hat = sum_of_independent(e.law_util_hat);
    e.fee_pd = std::max(e.e_u_hat - 2.0 * e.r_ron_total, 0.0);
    e.nice_prob = e.law_u_hat.survival(e.e_u_hat / 2.0);
    stats.entries.push_back(std::move(e));
  });
  return stats;
}

EventProbabilities event_probabilities(const Valuation& v, const AuctionSetting& setting,
                                       int n_prime) {
  if (v.size() != setting.num_items()) fail(ErrorCode::kLengthMismatch, "valuation has the wrong length");
  if (n_prime < 1) fail(ErrorCode::kInvalidSetting, "n_prime must be positive");
  const MaxVectorDistribution maxvec = max_vector_distribution(setting, n_prime - 1);
  maxvec.joint(setting.caps());
  const std::size_t m = v.size();
  EventProbabilities out{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  for (std::size_t j = 0; j < m; ++j) {
    out.p_und[j] = 1.0 - maxvec.per_item[j].cdf(v[j]);
    for (const Atom& mj : maxvec.per_item[j].atoms()) {
      if (v[j] < mj.value) continue;
      const double u = v[j] - mj.value;
      double none = 1.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (k == j) continue;
        double below = 0.0;
        for (const Atom& mk : maxvec.per_item[k].atoms()) {
          if (v[k] - mk.value < u) below += mk.prob;
        }
        none *= below;
      }
      out.p_nf[j] += mj.prob * (1.0 - none);
    }
  }
  return out;
}

FeeConstruction bvcg_constructed_revenue(const UtilityStats& stats) {
  FeeConstruction out;
  for (const auto& e : stats.entries) {
    const double w = stats.n_prime * e.prob;
    out.fee_mass += w * e.fee_pd;
    if (e.fee_pd > 0.0) out.participation_lb += w * e.fee_pd * e.law_u_hat.survival(e.fee_pd);
  }
  return out;
}

FeeConstruction bvcg_constructed_revenue(const AuctionSetting& setting, int n_prime) {
  return bvcg_constructed_revenue(build_utility_stats(setting, n_prime));
}

SpecialBidderConstruction pi_bvcg_constructed_revenue(const UtilityStats& stats) {
  SpecialBidderConstruction out;
  for (const auto& e : stats.entries) {
    const double w = stats.n_prime * e.prob;
    double paid = 0.0;
    for (const Atom& a : e.law_u.atoms()) paid += a.value * a.prob * e.law_u.survival(a.value);
    out.revenue_lb += w * paid;
    out.s_all += w * e.nice_prob * e.nice_prob * e.e_u_hat;
  }
  return out;
}

SpecialBidderConstruction pi_bvcg_constructed_revenue(const AuctionSetting& setting, int n_prime) {
  return pi_bvcg_constructed_revenue(build_utility_stats(setting, n_prime));
}

CheckRecord make_record(std::string name, double lhs, double rhs, double tolerance,
                        std::string anchor) {
  return {std::move(name), lhs, rhs, rhs - lhs, rhs - lhs >= -tolerance, std::move(anchor)};
}

bool DecompositionReport::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.holds; });
}

const CheckRecord* DecompositionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

DecompositionReport decomposition_terms(const AuctionSetting& setting, int n_prime,
                                        CoreBoundary boundary) {
  return terms_from(setting, make_workspace(setting, n_prime, boundary));
}

DecompositionReport lemma_chain_check(const AuctionSetting& setting, int n, int n_prime,
                                      const ChainOptions& options) {
  if (n < 1) fail(ErrorCode::kTooFewBidders, "need at least one bidder");
  if (n > n_prime) fail(ErrorCode::kInvalidSetting, "the chain needs n <= n_prime");
  const Workspace ws = make_workspace(setting, n_prime, options.boundary);
  DecompositionReport r = terms_from(setting, ws);
  r.n = n;
  const double tol = options.tolerance;
  const std::size_t m = setting.num_items();
  auto& checks = r.checks;
  const auto add = [&](std::string name, double lhs, double rhs, std::string anchor) {
    checks.push_back(make_record(std::move(name), lhs, rhs, tol, std::move(anchor)));
  };

  const double iu_n = iu_from_tables(ws.tables, n);
  const double iu_np = iu_from_tables(ws.tables, n_prime);
  r.iu_n = iu_n;
  r.iu_nprime = iu_np;
  const double four_srev = 4.0 * r.srev_nprime;

  add("iu_monotone_in_bidders", iu_n, iu_np, "benchmark grows with the number of real bidders");
  if (n_prime >= 2) {
    add("step2_unconditional", iu_n,
        static_cast<double>(n) / n_prime * iu_np + r.vcg_nprime,
        "benchmark at n bidders vs scaled benchmark at n' plus VCG(n')");
  }
  add("benchmark_split", iu_np, r.single + r.under + r.over + r.tail_exact + r.core,
      "benchmark at most single + under + over + tail + core");
  add("surplus_split", r.surplus_bound, r.tail_exact + r.core, "surplus at most tail + core");
  add("tail_exact_le_clipped", r.tail_exact, r.tail, "exact tail at most its clipped majorant");
  add("tail_clip_inactive", r.tail_unclipped, r.tail,
      "r_total Pr(v_j > T_j) at most r*_j(M_j) for every max vector");
  add("a_iu_n_le_4srev_core", iu_n, four_srev + r.core, "benchmark at most four SRev(n') plus core");
  add("a_iu_nprime_le_4srev_core", iu_np, four_srev + r.core,
      "benchmark at most four SRev(n') plus core");
  add("b_single_le_srev", r.single, r.srev_nprime, "ironed virtual welfare at most SRev(n')");
  add("b_under_le_srev", r.under, r.srev_nprime, "reserve-price VCG revenue at most SRev(n')");
  add("b_over_le_srev", r.over, r.srev_nprime, "sequential posted prices at most SRev(n')");
  add("b_tail_le_srev", r.tail, r.srev_nprime, "Ronen-style revenue at most SRev(n')");
  add("c_core_le_fees_ronen", r.core, r.fee_mass + 2.0 * r.ronen_sum,
      "core at most entry fees plus twice the Ronen sum");
  add("d_ronen_le_srev", r.ronen_sum, r.srev_nprime, "Ronen sum at most SRev(n')");
  add("e_fee_mass_le_2_participation", r.fee_mass, 2.0 * r.participation_lb,
      "half the fee mass is collected from participating bidders");
  add("f_iu_n_le_bvcg_srev", iu_n, 2.0 * r.participation_lb + 6.0 * r.srev_nprime,
      "benchmark at most 2 BVCG(n') + 6 SRev(n')");
  add("f_iu_nprime_le_bvcg_srev", iu_np, 2.0 * r.participation_lb + 6.0 * r.srev_nprime,
      "benchmark at most 2 BVCG(n') + 6 SRev(n')");
  add("f_iu_n_le_bvcg_floor_srev", iu_n, 2.0 * r.bvcg_floor + 6.0 * r.srev_nprime,
      "benchmark at most 2 BVCG(n') + 6 SRev(n')");

  Pointwise variance_cap(tol), item_cap(tol), participation(tol), tail_prob(tol), claim(tol),
      nice(tol);
  for (const MaxVectorStats& e : ws.stats.entries) {
    variance_cap.add(e.var_u_hat, 2.0 * e.r_ron_total * e.r_ron_total);
    for (std::size_t j = 0; j < m; ++j) {
      const ScalarDistribution& law = e.law_util_hat[j];
      double worst = 0.0;
      for (const Atom& a : law.atoms()) worst = std::max(worst, a.value * law.survival(a.value));
      item_cap.add(worst, e.r_star[j]);
      const ItemDistribution& item = setting.item(j);
      double above = 0.0;
      for (std::size_t i = 0; i < item.size(); ++i) {
        const double u = item.value(i) - e.maxvec[j];
        if (u < 0.0 || within_cap(u, e.r_ron_total, options.boundary)) continue;
        above += item.prob(i);
        tail_prob.add(surplus_event_probability(setting, e.maxvec, j, u), e.r_ron_total / u);
      }
      claim.add(e.r_ron_total * above, e.r_star[j]);
    }
    if (e.fee_pd > 0.0) participation.add(1.0 - e.law_u_hat.survival(e.fee_pd), 0.5);
    if (e.e_u_hat >= 6.0 * e.r_ron_total) nice.add(7.0 / 9.0, e.nice_prob);
  }
  checks.push_back(variance_cap.record("capped_utility_variance", "Var of capped utility at most 2 r_total^2"));
  checks.push_back(item_cap.record("per_item_cap", "max_x x Pr(capped item utility >= x) at most r*_j"));
  checks.push_back(participation.record("participation_probability",
                                        "Pr(capped utility < fee) at most one half"));
  checks.push_back(tail_prob.record("tail_probability",
                                    "surplus-event probability at most r_total / (v_j - M_j)"));
  checks.push_back(claim.record("tail_claim_pointwise", "r_total Pr(v_j > T_j) at most r*_j(M_j)"));

  Pointwise event_union(tol);
  ws.tables.valuations.for_each([&](std::size_t index, std::span<const double> v, double) {
    const EventProbabilities ev = event_probabilities(Valuation(v.begin(), v.end()), setting, n_prime);
    for (std::size_t j = 0; j < m; ++j) {
      event_union.add(1.0 - ws.tables.p_region[index][j], ev.p_und[j] + ev.p_nf[j]);
    }
  });
  checks.push_back(event_union.record("event_union", "leaving region j needs an under or non-favorite event"));

  const bool regular_wanted = options.regular_branch != RegularBranch::kSkip;
  if (options.regular_branch == RegularBranch::kRequire && !r.all_regular) {
    fail(ErrorCode::kNotRegular, "the prior-independent branch needs every item regular");
  }
  if (regular_wanted && r.all_regular) {
    r.regular_branch_checked = true;
    checks.push_back(nice.record("g_nice_on_high_pairs", "nice set has mass at least 7/9 on high pairs"));
    add("g_core_high_low_split", r.core, 81.0 / 49.0 * r.s_all + 6.0 * r.ronen_sum,
        "core at most (81/49) s_all + 6 Ronen sum");
    add("g_s_all_le_4_revenue_lb", r.s_all, 4.0 * r.revenue_lb,
        "special-bidder fees collect a quarter of s_all");
    add("g_srev_le_vcg_next", r.srev_nprime, r.vcg_nprime_plus_1,
        "SRev(n') at most VCG(n' + 1) for regular items");
    const double constructed = 10.0 * r.vcg_nprime_plus_1 + 324.0 / 49.0 * r.revenue_lb;
    add("g_iu_n_le_constructed", iu_n, constructed, "benchmark at most 10 VCG(n'+1) + (324/49) fee floor");
    add("g_iu_nprime_le_constructed", iu_np, constructed,
        "benchmark at most 10 VCG(n'+1) + (324/49) fee floor");
    add("g_iu_n_le_17_pi_floor", iu_n, 17.0 * r.pi_bvcg_floor, "benchmark at most 17 PI-BVCG(n' + 1)");
    add("g_iu_nprime_le_17_pi_floor", iu_np, 17.0 * r.pi_bvcg_floor,
        "benchmark at most 17 PI-BVCG(n' + 1)");
  }
  return r;
}

int default_n_prime(int n, double epsilon, double factor) {
  if (!(epsilon > 0.0)) fail(ErrorCode::kInvalidSetting, "epsilon must be positive");
  const double raw = std::ceil(factor * n / epsilon);
  if (raw > static_cast<double>(std::numeric_limits<int>::max())) {
    fail(ErrorCode::kEnumerationCapExceeded, "n_prime overflows; use monte_carlo mode");
  }
  return std::max(static_cast<int>(raw), n);
}

std::string_view to_string(TheoremBranch branch) {
  switch (branch) {
    case TheoremBranch::kCompetitionSuffices: return "competition_suffices";
    case TheoremBranch::kSimpleAuctionBound: return "simple_auction_bound";
    case TheoremBranch::kUnknown: return "unknown";
    case TheoremBranch::kNeither: return "neither_verified";
  }
  return "unknown";
}

TheoremVerdict main_theorem_verdict(const AuctionSetting& setting, int n, double epsilon,
                                    std::optional<int> n_prime_override,
                                    const ChainOptions& options) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail(ErrorCode::kInvalidSetting, "epsilon must lie in (0, 1]");
  TheoremVerdict v;
  v.n = n;
  v.epsilon = epsilon;
  v.n_prime = n_prime_override ? *n_prime_override : default_n_prime(n, epsilon);
  if (v.n_prime > setting.caps().max_n_prime) {
    std::ostringstream msg;
    msg << "n_prime = " << v.n_prime << " exceeds the exact-mode cap of " << setting.caps().max_n_prime
        << "; use monte_carlo mode";
    fail(ErrorCode::kEnumerationCapExceeded, msg.str());
  }
  v.chain = lemma_chain_check(setting, n, v.n_prime, options);
  v.vcg_nprime = v.chain.vcg_nprime;
  v.simple_floor = std::max(v.chain.bvcg_floor, v.chain.srev_nprime);
  if (v.chain.all_regular) v.pi_floor = v.chain.pi_bvcg_floor;
  try {
    v.optimal_revenue = optimal_revenue(setting, n).revenue;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInstanceTooLarge) throw;
    v.lp_error = e.what();
  }
  const double tol = options.tolerance;
  if (!v.optimal_revenue) {
    v.branch = TheoremBranch::kUnknown;
    v.holds = v.chain.all_hold();
  } else if ((1.0 - epsilon) * *v.optimal_revenue <= v.vcg_nprime + tol) {
    v.branch = TheoremBranch::kCompetitionSuffices;
    v.holds = true;
  } else if (*v.optimal_revenue <= v.simple_floor + tol) {
    v.branch = TheoremBranch::kSimpleAuctionBound;
    v.holds = true;
  } else {
    v.branch = TheoremBranch::kNeither;
    v.holds = false;
  }
  return v;
}

}  // namespace ecomp
