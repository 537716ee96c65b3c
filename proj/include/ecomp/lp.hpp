#pragma once

// Dense two-phase tableau simplex for
//   maximize c^T x  subject to  A x <= b,  x >= 0.
// Intended for the small programs built by the mechanism oracle; it is not a
// general-purpose solver.

#include <cstddef>
#include <vector>

namespace ecomp {

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;           // length num_vars
  std::vector<std::vector<double>> rows;   // each of length num_vars
  std::vector<double> rhs;

  std::size_t add_row(std::vector<double> row, double bound);
};

enum class LpStatus { kOptimal, kInfeasible };

struct LpSolution {
  LpStatus status = LpStatus::kOptimal;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;       // y >= 0 with A^T y >= c at optimality
  std::vector<double> farkas;      // y >= 0, A^T y >= 0, b^T y < 0 when infeasible
  double duality_gap = 0.0;        // |c^T x - b^T y|
  double primal_residual = 0.0;    // max violation of A x <= b, x >= 0
  double dual_residual = 0.0;      // max violation of A^T y >= c, y >= 0
  std::size_t iterations = 0;
};

struct LpOptions {
  std::size_t max_iterations = 200000;
  double pivot_tolerance = 1e-11;
  double optimality_tolerance = 1e-10;
  // Residuals above this (scaled by 1 + |objective|) raise kLpNumericalFailure.
  double residual_tolerance = 1e-7;
  // Consecutive degenerate pivots tolerated before switching to Bland's rule.
  std::size_t degenerate_limit = 50;
};

/// Throws kLpUnbounded, kLpMaxIterations or kLpNumericalFailure.
LpSolution lp_solve(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace ecomp
