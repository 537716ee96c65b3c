#include "ecomp/iu_benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "ecomp/simple_auctions.hpp"

namespace ecomp {

namespace {

void check_n_prime(const AuctionSetting& setting, int n_prime) {
  if (n_prime < 1) fail(ErrorCode::kInvalidSetting, "n_prime must be positive");
  if (n_prime > setting.caps().max_n_prime) {
    std::ostringstream msg;
    msg << "n_prime = " << n_prime << " exceeds the exact-mode cap of "
        << setting.caps().max_n_prime << "; use monte_carlo mode";
    fail(ErrorCode::kEnumerationCapExceeded, msg.str());
  }
}

double phi_value(double v_j, double phi_tilde, double p) {
  return v_j * (1.0 - p) + std::max(phi_tilde, 0.0) * p;
}

}  // namespace

std::optional<std::size_t> region_of(std::span<const double> v, std::span<const double> maxvec) {
  std::size_t best = 0;
  double best_utility = v[0] - maxvec[0];
  for (std::size_t j = 1; j < v.size(); ++j) {
    const double u = v[j] - maxvec[j];
    if (u > best_utility) {
      best = j;
      best_utility = u;
    }
  }
  if (v[best] >= maxvec[best]) return best;
  return std::nullopt;
}

IUTables build_iu_tables(const AuctionSetting& setting, int n_prime) {
  check_n_prime(setting, n_prime);
  IUTables tables;
  tables.n_prime = n_prime;
  tables.valuations = valuation_space(setting);
  const MaxVectorDistribution maxvec = max_vector_distribution(setting, n_prime - 1);
  const ProductSpace joint_max = maxvec.joint(setting.caps());
  if (tables.valuations.size() > setting.caps().max_joint_terms / joint_max.size()) {
    std::ostringstream msg;
    msg << "region table needs " << tables.valuations.size() << " x " << joint_max.size()
        << " terms, above the cap of " << setting.caps().max_joint_terms
        << "; use monte_carlo mode";
    fail(ErrorCode::kEnumerationCapExceeded, msg.str());
  }

  const std::size_t m = setting.num_items();
  for (const auto& item : setting.items()) tables.ironed.push_back(iron(item));

  // Materialize the max vectors once; the inner loop runs |V| times.
  std::vector<double> max_coords;
  std::vector<double> max_probs;
  max_coords.reserve(joint_max.size() * m);
  joint_max.for_each([&](std::size_t, std::span<const double> coords, double prob) {
    max_coords.insert(max_coords.end(), coords.begin(), coords.end());
    max_probs.push_back(prob);
  });

  const std::size_t count = tables.valuations.size();
  tables.p_region.assign(count, std::vector<double>(m, 0.0));
  tables.phi_iu.assign(count, std::vector<double>(m, 0.0));
  std::vector<std::vector<Atom>> atoms(m);
  tables.valuations.for_each([&](std::size_t index, std::span<const double> v, double prob) {
    auto& p = tables.p_region[index];
    for (std::size_t r = 0; r < max_probs.size(); ++r) {
      const auto region = region_of(v, std::span<const double>(&max_coords[r * m], m));
      if (region) p[*region] += max_probs[r];
    }
    const auto digits = tables.valuations.digits_of(index);
    for (std::size_t j = 0; j < m; ++j) {
      p[j] = std::min(p[j], 1.0);
      tables.phi_iu[index][j] = phi_value(v[j], tables.ironed[j].phi_tilde[digits[j]], p[j]);
      atoms[j].push_back({tables.phi_iu[index][j], prob});
    }
  });
  for (std::size_t j = 0; j < m; ++j) {
    tables.law_phi.push_back(ScalarDistribution::from_atoms(std::move(atoms[j])));
  }
  return tables;
}

std::vector<double> region_probabilities_by_marginals(const MaxVectorDistribution& maxvec,
                                                      std::span<const double> v) {
  const std::size_t m = v.size();
  std::vector<double> p(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (const Atom& mj : maxvec.per_item[j].atoms()) {
      if (v[j] < mj.value) continue;
      const double u = v[j] - mj.value;
      double prob = mj.prob;
      for (std::size_t k = 0; k < m && prob > 0.0; ++k) {
        if (k == j) continue;
        // Items below j must lose strictly, items above may tie.
        double ok = 0.0;
        for (const Atom& mk : maxvec.per_item[k].atoms()) {
          const double uk = v[k] - mk.value;
          if (k < j ? u > uk : u >= uk) ok += mk.prob;
        }
        prob *= ok;
      }
      p[j] += prob;
    }
    p[j] = std::min(p[j], 1.0);
  }
  return p;
}

double iu_from_tables(const IUTables& tables, int n) {
  if (n < 1) fail(ErrorCode::kTooFewBidders, "IU needs at least one bidder");
  double total = 0.0;
  for (const auto& law : tables.law_phi) total += iid_max_expectation(law, n);
  return total;
}

double iu(const AuctionSetting& setting, int n, int n_prime) {
  return iu_from_tables(build_iu_tables(setting, n_prime), n);
}

MonteCarloEstimate monte_carlo_iu(const AuctionSetting& setting, int n, int n_prime,
                                  std::uint64_t samples, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::kTooFewBidders, "IU needs at least one bidder");
  if (n_prime < 1) fail(ErrorCode::kInvalidSetting, "n_prime must be positive");
  if (samples < 1) fail(ErrorCode::kInvalidSetting, "need at least one sample");
  const std::size_t m = setting.num_items();
  const MaxVectorDistribution maxvec = max_vector_distribution(setting, n_prime - 1);
  std::vector<IronedTable> ironed;
  for (const auto& item : setting.items()) ironed.push_back(iron(item));

  // Phi per sampled valuation, keyed by its support digits.
  std::map<std::vector<std::size_t>, std::vector<double>> cache;
  const auto phi_of = [&](const std::vector<std::size_t>& digits) -> const std::vector<double>& {
    auto it = cache.find(digits);
    if (it != cache.end()) return it->second;
    std::vector<double> v(m);
    for (std::size_t j = 0; j < m; ++j) v[j] = setting.item(j).value(digits[j]);
    const auto p = region_probabilities_by_marginals(maxvec, v);
    std::vector<double> phi(m);
    for (std::size_t j = 0; j < m; ++j) phi[j] = phi_value(v[j], ironed[j].phi_tilde[digits[j]], p[j]);
    return cache.emplace(digits, std::move(phi)).first->second;
  };

  // Fixed-size chunks with derived substreams: the result depends only on
  // (seed, samples), whatever the execution order.
  constexpr std::uint64_t kChunk = 1u << 16;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<std::size_t> digits(m);
  std::vector<double> best(m);
  for (std::uint64_t start = 0, chunk = 0; start < samples; start += kChunk, ++chunk) {
    Rng rng(seed, chunk);
    const std::uint64_t stop = std::min(samples, start + kChunk);
    for (std::uint64_t s = start; s < stop; ++s) {
      std::fill(best.begin(), best.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) digits[j] = sample_index(setting.item(j), rng);
        const auto& phi = phi_of(digits);
        for (std::size_t j = 0; j < m; ++j) best[j] = std::max(best[j], phi[j]);
      }
      double x = 0.0;
      for (double b : best) x += b;
      sum += x;
      sum_sq += x * x;
    }
  }
  MonteCarloEstimate out;
  out.samples = samples;
  const double count = static_cast<double>(samples);
  out.estimate = sum / count;
  if (samples > 1) {
    const double var = std::max(0.0, (sum_sq - count * out.estimate * out.estimate) / (count - 1));
    out.std_error = std::sqrt(var / count);
  }
  return out;
}

InequalityCheck make_check(double lhs, double rhs, double tolerance) {
  return {lhs, rhs, rhs - lhs, leq_tol(lhs, rhs, tolerance)};
}

InequalityCheck step2_inequality_check(const AuctionSetting& setting, int n, int n_prime,
                                       double tolerance) {
  if (n > n_prime) fail(ErrorCode::kInvalidSetting, "step-2 check needs n <= n_prime");
  if (n_prime < 2) fail(ErrorCode::kTooFewBidders, "step-2 check needs n_prime >= 2");
  const IUTables tables = build_iu_tables(setting, n_prime);
  const double lhs = iu_from_tables(tables, n);
  const double rhs = static_cast<double>(n) / n_prime * iu_from_tables(tables, n_prime) +
                     vcg_revenue(setting, n_prime);
  return make_check(lhs, rhs, tolerance);
}

double tie_break_independence_check(const ScalarDistribution& law, int k,
                                    const EnumerationCaps& caps) {
  if (k < 1) fail(ErrorCode::kInvalidSetting, "need at least one draw");
  const std::size_t s = law.size();
  std::size_t tuples = 1;
  for (int i = 0; i < k; ++i) {
    if (tuples > caps.max_joint_terms / s) {
      fail(ErrorCode::kEnumerationCapExceeded, "too many tuples for tie-break enumeration");
    }
    tuples *= s;
  }
  // joint[a][i] = Pr(max = atom a and tb = i).
  std::vector<std::vector<double>> joint(s, std::vector<double>(static_cast<std::size_t>(k), 0.0));
  std::vector<std::size_t> digits(static_cast<std::size_t>(k), 0);
  for (std::size_t t = 0; t < tuples; ++t) {
    std::size_t rem = t;
    double prob = 1.0;
    std::size_t top = 0;
    for (auto& d : digits) {
      d = rem % s;
      rem /= s;
      prob *= law.atoms()[d].prob;
      top = std::max(top, d);
    }
    const auto ties = static_cast<double>(std::count(digits.begin(), digits.end(), top));
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (digits[i] == top) joint[top][i] += prob / ties;
    }
  }
  std::vector<double> tb(static_cast<std::size_t>(k), 0.0);
  std::vector<double> marginal(s, 0.0);
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t i = 0; i < tb.size(); ++i) {
      tb[i] += joint[a][i];
      marginal[a] += joint[a][i];
    }
  }
  double deviation = 0.0;
  for (std::size_t a = 0; a < s; ++a) {
    for (std::size_t i = 0; i < tb.size(); ++i) {
      if (tb[i] <= 0.0) continue;
      deviation = std::max(deviation, std::abs(joint[a][i] / tb[i] - marginal[a]));
    }
  }
  return deviation;
}

}  // namespace ecomp
