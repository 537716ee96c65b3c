#include "ecomp/lp_oracle.hpp"

#include <algorithm>
#include <sstream>

namespace ecomp {

namespace {

[[noreturn]] void too_large(const std::string& what, std::size_t value, std::size_t cap) {
  std::ostringstream msg;
  msg << "mechanism LP too large: " << what << " = " << value << " exceeds " << cap;
  fail(ErrorCode::kInstanceTooLarge, msg.str());
}

}  // namespace

MechanismSolution optimal_revenue(const AuctionSetting& setting, int n, const LpOracleCaps& caps) {
  if (n < 1) fail(ErrorCode::kTooFewBidders, "the mechanism LP needs at least one bidder");
  const ProductSpace space = valuation_space(setting);
  const std::size_t types = space.size();
  const std::size_t m = setting.num_items();
  const auto bidders = static_cast<std::size_t>(n);

  std::size_t profiles = 1;
  for (std::size_t i = 0; i < bidders; ++i) {
    if (profiles > caps.max_profiles / types) too_large("|V|^n", profiles * types, caps.max_profiles);
    profiles *= types;
  }
  const std::size_t alloc_vars = profiles * bidders * m;
  const std::size_t num_vars = alloc_vars + 2 * bidders * types;
  if (num_vars > caps.max_variables) too_large("variables", num_vars, caps.max_variables);
  const std::size_t num_rows = profiles * m + bidders * types * types;
  if (num_rows * (num_vars + num_rows) > caps.max_tableau_entries) {
    too_large("tableau entries", num_rows * (num_vars + num_rows), caps.max_tableau_entries);
  }

  std::vector<double> type_prob(types);
  std::vector<std::vector<double>> type_value(types);
  for (std::size_t t = 0; t < types; ++t) {
    type_prob[t] = space.prob_of(t);
    type_value[t] = space.coords_of(t);
  }
  const auto alloc = [&](std::size_t profile, std::size_t i, std::size_t j) {
    return (profile * bidders + i) * m + j;
  };
  const auto pay_plus = [&](std::size_t i, std::size_t t) { return alloc_vars + 2 * (i * types + t); };

  // interim[i][t] lists (profile, Pr(others' profile)) pairs with bidder i at type t.
  std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> interim(
      bidders, std::vector<std::vector<std::pair<std::size_t, double>>>(types));
  for (std::size_t profile = 0; profile < profiles; ++profile) {
    std::size_t rem = profile;
    std::vector<std::size_t> digits(bidders);
    double joint = 1.0;
    for (auto& d : digits) {
      d = rem % types;
      rem /= types;
      joint *= type_prob[d];
    }
    for (std::size_t i = 0; i < bidders; ++i) {
      interim[i][digits[i]].push_back({profile, joint / type_prob[digits[i]]});
    }
  }

  LinearProgram lp;
  lp.num_vars = num_vars;
  lp.objective.assign(num_vars, 0.0);
  for (std::size_t i = 0; i < bidders; ++i) {
    for (std::size_t t = 0; t < types; ++t) {
      lp.objective[pay_plus(i, t)] = type_prob[t];
      lp.objective[pay_plus(i, t) + 1] = -type_prob[t];
    }
  }
  for (std::size_t profile = 0; profile < profiles; ++profile) {
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> row(num_vars, 0.0);
      for (std::size_t i = 0; i < bidders; ++i) row[alloc(profile, i, j)] = 1.0;
      lp.add_row(std::move(row), 1.0);
    }
  }
  // Adds scale * (value of bundle at `valuation` under type t's interim allocation).
  const auto add_interim_value = [&](std::vector<double>& row, std::size_t i, std::size_t t,
                                     const std::vector<double>& valuation, double scale) {
    for (const auto& [profile, weight] : interim[i][t]) {
      for (std::size_t j = 0; j < m; ++j) row[alloc(profile, i, j)] += scale * weight * valuation[j];
    }
  };
  for (std::size_t i = 0; i < bidders; ++i) {
    for (std::size_t t = 0; t < types; ++t) {
      // Interim IR: p(t) - v_t . pi(t) <= 0.
      std::vector<double> ir(num_vars, 0.0);
      add_interim_value(ir, i, t, type_value[t], -1.0);
      ir[pay_plus(i, t)] = 1.0;
      ir[pay_plus(i, t) + 1] = -1.0;
      lp.add_row(std::move(ir), 0.0);
      // BIC: v_t . pi(t') - p(t') <= v_t . pi(t) - p(t).
      for (std::size_t d = 0; d < types; ++d) {
        if (d == t) continue;
        std::vector<double> bic(num_vars, 0.0);
        add_interim_value(bic, i, t, type_value[t], -1.0);
        add_interim_value(bic, i, d, type_value[t], 1.0);
        bic[pay_plus(i, t)] += 1.0;
        bic[pay_plus(i, t) + 1] -= 1.0;
        bic[pay_plus(i, d)] -= 1.0;
        bic[pay_plus(i, d) + 1] += 1.0;
        lp.add_row(std::move(bic), 0.0);
      }
    }
  }

  MechanismSolution out;
  out.n = n;
  out.valuations = space;
  out.num_variables = num_vars;
  out.num_constraints = lp.rows.size();
  out.lp = lp_solve(lp);
  if (out.lp.status != LpStatus::kOptimal) {
    fail(ErrorCode::kLpNumericalFailure, "mechanism LP reported infeasible; the zero mechanism is feasible");
  }
  out.revenue = out.lp.objective;
  out.interim_allocation.assign(bidders, std::vector<std::vector<double>>(types, std::vector<double>(m, 0.0)));
  out.interim_payment.assign(bidders, std::vector<double>(types, 0.0));
  for (std::size_t i = 0; i < bidders; ++i) {
    for (std::size_t t = 0; t < types; ++t) {
      for (const auto& [profile, weight] : interim[i][t]) {
        for (std::size_t j = 0; j < m; ++j) {
          out.interim_allocation[i][t][j] += weight * out.lp.x[alloc(profile, i, j)];
        }
      }
      out.interim_payment[i][t] = out.lp.x[pay_plus(i, t)] - out.lp.x[pay_plus(i, t) + 1];
    }
  }
  return out;
}

double incentive_violation(const MechanismSolution& solution) {
  double worst = 0.0;
  const std::size_t types = solution.valuations.size();
  for (std::size_t i = 0; i < solution.interim_allocation.size(); ++i) {
    const auto& pi = solution.interim_allocation[i];
    const auto& pay = solution.interim_payment[i];
    const auto utility = [&](std::size_t truth, std::size_t report) {
      const auto v = solution.valuations.coords_of(truth);
      double u = -pay[report];
      for (std::size_t j = 0; j < v.size(); ++j) u += v[j] * pi[report][j];
      return u;
    };
    for (std::size_t t = 0; t < types; ++t) {
      const double truthful = utility(t, t);
      worst = std::max(worst, -truthful);
      for (std::size_t d = 0; d < types; ++d) worst = std::max(worst, utility(t, d) - truthful);
    }
  }
  return worst;
}

}  // namespace ecomp
