#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ecomp/lp.hpp"
#include "ecomp/lp_oracle.hpp"
#include "ecomp/myerson.hpp"
#include "ecomp/random_instances.hpp"
#include "ecomp/simple_auctions.hpp"
#include "fixtures.hpp"

using namespace ecomp;
using fixtures::close;

namespace {

// Solves the square system M x = r by Gaussian elimination with partial
// pivoting; nullopt when singular.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> M, std::vector<double> r) {
  const std::size_t n = r.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i) {
      if (std::abs(M[i][c]) > std::abs(M[p][c])) p = i;
    }
    if (std::abs(M[p][c]) < 1e-10) return std::nullopt;
    std::swap(M[p], M[c]);
    std::swap(r[p], r[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = M[i][c] / M[c][c];
      for (std::size_t k = c; k < n; ++k) M[i][k] -= f * M[c][k];
      r[i] -= f * r[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = r[i] / M[i][i];
  return x;
}

// Best objective over all basic feasible points of {A x <= b, x >= 0}.
std::optional<double> vertex_enumeration(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  std::vector<std::vector<double>> all = lp.rows;
  std::vector<double> rhs = lp.rhs;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(n, 0.0);
    row[j] = -1.0;
    all.push_back(row);
    rhs.push_back(0.0);
  }
  const std::size_t k = all.size();
  std::optional<double> best;
  std::vector<bool> pick(k, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
  do {
    std::vector<std::vector<double>> M;
    std::vector<double> r;
    for (std::size_t i = 0; i < k; ++i) {
      if (!pick[i]) continue;
      M.push_back(all[i]);
      r.push_back(rhs[i]);
    }
    const auto x = solve_square(M, r);
    if (!x) continue;
    bool feasible = true;
    for (std::size_t i = 0; i < k && feasible; ++i) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += all[i][j] * (*x)[j];
      feasible = lhs <= rhs[i] + 1e-9;
    }
    if (!feasible) continue;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * (*x)[j];
    if (!best || obj > *best) best = obj;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

LinearProgram random_program(Rng& rng) {
  LinearProgram lp;
  lp.num_vars = static_cast<std::size_t>(rng.uniform_int(1, 4));
  for (std::size_t j = 0; j < lp.num_vars; ++j) lp.objective.push_back(static_cast<double>(rng.uniform_int(-3, 5)));
  const auto rows = rng.uniform_int(1, 5);
  for (std::int64_t i = 0; i < rows; ++i) {
    std::vector<double> row;
    for (std::size_t j = 0; j < lp.num_vars; ++j) row.push_back(static_cast<double>(rng.uniform_int(-2, 4)));
    lp.add_row(row, static_cast<double>(rng.uniform_int(-2, 8)));
  }
  lp.add_row(std::vector<double>(lp.num_vars, 1.0), 10.0);
  return lp;
}

}  // namespace

TEST_CASE("tiny programs") {
  LinearProgram one;
  one.num_vars = 1;
  one.objective = {1.0};
  one.add_row({1.0}, 1.0);
  const LpSolution s = lp_solve(one);
  CHECK(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(1.0));
  CHECK(s.duals[0] == doctest::Approx(1.0));

  LinearProgram zero;
  zero.num_vars = 2;
  zero.objective = {0.0, 0.0};
  zero.add_row({1.0, 1.0}, 3.0);
  CHECK(lp_solve(zero).objective == 0.0);

  LinearProgram infeasible;
  infeasible.num_vars = 1;
  infeasible.objective = {1.0};
  infeasible.add_row({1.0}, -1.0);
  const LpSolution bad = lp_solve(infeasible);
  CHECK(bad.status == LpStatus::kInfeasible);
  REQUIRE(bad.farkas.size() == 1);
  CHECK(bad.farkas[0] >= 0.0);
  CHECK(bad.farkas[0] * -1.0 < 0.0);

  LinearProgram unbounded;
  unbounded.num_vars = 2;
  unbounded.objective = {1.0, 0.0};
  unbounded.add_row({-1.0, 1.0}, 1.0);
  try {
    lp_solve(unbounded);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLpUnbounded);
  }
}

TEST_CASE("simplex agrees with vertex enumeration on seeded programs") {
  Rng rng(73);
  int optimal = 0;
  for (int t = 0; t < 400; ++t) {
    const LinearProgram lp = random_program(rng);
    const std::optional<double> oracle = vertex_enumeration(lp);
    const LpSolution s = lp_solve(lp);
    if (!oracle) {
      CHECK(s.status == LpStatus::kInfeasible);
      double bty = 0.0;
      for (std::size_t i = 0; i < lp.rhs.size(); ++i) {
        CHECK(s.farkas[i] >= -1e-12);
        bty += lp.rhs[i] * s.farkas[i];
      }
      CHECK(bty < 0.0);
      for (std::size_t j = 0; j < lp.num_vars; ++j) {
        double aty = 0.0;
        for (std::size_t i = 0; i < lp.rhs.size(); ++i) aty += lp.rows[i][j] * s.farkas[i];
        CHECK(aty >= -1e-9);
      }
      continue;
    }
    ++optimal;
    REQUIRE(s.status == LpStatus::kOptimal);
    CHECK(close(s.objective, *oracle, 1e-7));
    CHECK(s.duality_gap <= 1e-9 * (1.0 + std::abs(s.objective)));
    CHECK(s.primal_residual <= 1e-9);
    CHECK(s.dual_residual <= 1e-9);
  }
  CHECK(optimal > 100);
}

TEST_CASE("mechanism LP on the frozen examples") {
  const AuctionSetting d2 = fixtures::single(fixtures::d2());
  CHECK(optimal_revenue(d2, 1).revenue == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(optimal_revenue(d2, 2).revenue == doctest::Approx(1.5).epsilon(1e-7));
  const MechanismSolution pair = optimal_revenue(fixtures::d2xd2(), 1);
  CHECK(pair.revenue >= 2.25 - 1e-7);
  CHECK(pair.revenue >= 2.0 - 1e-7);
  CHECK(incentive_violation(pair) <= 1e-7);
}

TEST_CASE("mechanism LP dominates simple auctions and scales linearly") {
  Rng rng(79);
  for (int t = 0; t < 40; ++t) {
    InstanceBounds bounds;
    bounds.max_support = 2;
    const AuctionSetting s = random_setting(rng, bounds);
    const int n = static_cast<int>(rng.uniform_int(1, 2));
    const MechanismSolution sol = optimal_revenue(s, n);
    CHECK(incentive_violation(sol) <= 1e-7);
    CHECK(sol.revenue >= srev(s, n) - 1e-6);
    CHECK(sol.revenue >= ronen_bound(s, n) - 1e-6);
    if (n >= 2) CHECK(sol.revenue >= vcg_revenue(s, n) - 1e-6);

    std::vector<ItemDistribution> scaled;
    for (const auto& item : s.items()) {
      std::vector<double> values(item.values().begin(), item.values().end());
      for (double& v : values) v *= 3.0;
      scaled.push_back(make_item_distribution(values, {item.probs().begin(), item.probs().end()}));
    }
    CHECK(close(optimal_revenue(AuctionSetting(scaled), n).revenue, 3.0 * sol.revenue, 1e-6));
  }
}

TEST_CASE("mechanism LP size caps") {
  const AuctionSetting big({fixtures::d3(), fixtures::d3()});
  try {
    optimal_revenue(big, 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInstanceTooLarge);
  }
}
