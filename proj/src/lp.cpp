#include "ecomp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ecomp/error.hpp"

namespace ecomp {

std::size_t LinearProgram::add_row(std::vector<double> row, double bound) {
  if (row.size() != num_vars) fail(ErrorCode::kShapeMismatch, "LP row has the wrong length");
  rows.push_back(std::move(row));
  rhs.push_back(bound);
  return rows.size() - 1;
}

namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const LpOptions& options)
      : options_(options), n_(lp.num_vars), m_(lp.rows.size()) {
    k_ = static_cast<std::size_t>(std::count_if(lp.rhs.begin(), lp.rhs.end(), [](double b) { return b < 0.0; }));
    width_ = n_ + m_ + k_ + 1;
    data_.assign(m_ * width_, 0.0);
    basis_.resize(m_);
    std::size_t next_artificial = 0;
    for (std::size_t r = 0; r < m_; ++r) {
      const bool flip = lp.rhs[r] < 0.0;
      const double s = flip ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(r, j) = s * lp.rows[r][j];
      at(r, n_ + r) = s;
      at(r, rhs_col()) = s * lp.rhs[r];
      if (flip) {
        const std::size_t a = n_ + m_ + next_artificial++;
        at(r, a) = 1.0;
        basis_[r] = a;
      } else {
        basis_[r] = n_ + r;
      }
    }
  }

  // Phase 1: maximize minus the sum of artificials. Returns true if feasible.
  bool phase_one(std::vector<double>& farkas) {
    if (k_ == 0) return true;
    obj_.assign(width_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (std::size_t j = 0; j < width_; ++j) obj_[j] -= at(r, j);
    }
    for (std::size_t a = n_ + m_; a < n_ + m_ + k_; ++a) obj_[a] += 1.0;
    run(true);
    double scale = 1.0;
    for (std::size_t r = 0; r < m_; ++r) scale = std::max(scale, std::abs(at(r, rhs_col())));
    if (-obj_[rhs_col()] > options_.residual_tolerance * scale) {
      farkas.assign(m_, 0.0);
      for (std::size_t r = 0; r < m_; ++r) farkas[r] = std::max(0.0, obj_[n_ + r]);
      return false;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (std::abs(at(r, j)) > options_.pivot_tolerance) {
          pivot(r, j);
          break;
        }
      }
    }
    return true;
  }

  void phase_two(const std::vector<double>& c) {
    obj_.assign(width_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) obj_[j] = -c[j];
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t b = basis_[r];
      if (b >= n_ || c[b] == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) obj_[j] += c[b] * at(r, j);
    }
    run(false);
  }

  std::vector<double> primal() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) x[basis_[r]] = std::max(0.0, at(r, rhs_col()));
    }
    return x;
  }

  std::vector<double> duals() const {
    std::vector<double> y(m_);
    for (std::size_t r = 0; r < m_; ++r) y[r] = std::max(0.0, obj_[n_ + r]);
    return y;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  double& at(std::size_t r, std::size_t c) { return data_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * width_ + c]; }
  std::size_t rhs_col() const { return width_ - 1; }
  bool is_artificial(std::size_t col) const { return col >= n_ + m_ && col < n_ + m_ + k_; }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t j = 0; j < width_; ++j) at(row, j) /= p;
    at(row, col) = 1.0;
    const auto eliminate = [&](double* target) {
      const double factor = target[col];
      if (factor == 0.0) return;
      const double* src = &data_[row * width_];
      for (std::size_t j = 0; j < width_; ++j) target[j] -= factor * src[j];
      target[col] = 0.0;
    };
    for (std::size_t r = 0; r < m_; ++r) {
      if (r != row) eliminate(&data_[r * width_]);
    }
    eliminate(obj_.data());
    basis_[row] = col;
  }

  void run(bool allow_artificials) {
    const std::size_t columns = allow_artificials ? n_ + m_ + k_ : n_ + m_;
    bool bland = false;
    std::size_t degenerate = 0;
    while (true) {
      std::size_t enter = columns;
      double best = -options_.optimality_tolerance;
      for (std::size_t j = 0; j < columns; ++j) {
        if (obj_[j] < best) {
          enter = j;
          if (bland) break;
          best = obj_[j];
        }
      }
      if (enter == columns) return;
      if (++iterations_ > options_.max_iterations) {
        fail(ErrorCode::kLpMaxIterations, "simplex iteration limit reached");
      }
      std::size_t leave = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = at(r, enter);
        if (a <= options_.pivot_tolerance) continue;
        const double q = at(r, rhs_col()) / a;
        if (leave == m_ || q < ratio - 1e-12 || (q <= ratio + 1e-12 && basis_[r] < basis_[leave])) {
          ratio = std::min(ratio, q);
          leave = r;
        }
      }
      if (leave == m_) fail(ErrorCode::kLpUnbounded, "linear program is unbounded");
      if (ratio <= 1e-12) {
        if (++degenerate > options_.degenerate_limit) bland = true;
      } else {
        degenerate = 0;
      }
      pivot(leave, enter);
    }
  }

  LpOptions options_;
  std::size_t n_;
  std::size_t m_;
  std::size_t k_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
  std::vector<double> obj_;
  std::vector<std::size_t> basis_;
  std::size_t iterations_ = 0;
};

}  // namespace

LpSolution lp_solve(const LinearProgram& lp, const LpOptions& options) {
  if (lp.objective.size() != lp.num_vars || lp.rhs.size() != lp.rows.size()) {
    fail(ErrorCode::kShapeMismatch, "LP objective or bounds have the wrong length");
  }
  for (const auto& row : lp.rows) {
    if (row.size() != lp.num_vars) fail(ErrorCode::kShapeMismatch, "LP row has the wrong length");
  }
  Tableau tableau(lp, options);
  LpSolution out;
  if (!tableau.phase_one(out.farkas)) {
    out.status = LpStatus::kInfeasible;
    out.iterations = tableau.iterations();
    return out;
  }
  tableau.phase_two(lp.objective);
  out.x = tableau.primal();
  out.duals = tableau.duals();
  out.iterations = tableau.iterations();

  for (std::size_t j = 0; j < lp.num_vars; ++j) out.objective += lp.objective[j] * out.x[j];
  double dual_objective = 0.0;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) lhs += lp.rows[r][j] * out.x[j];
    out.primal_residual = std::max(out.primal_residual, lhs - lp.rhs[r]);
    dual_objective += lp.rhs[r] * out.duals[r];
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    double reduced = -lp.objective[j];
    for (std::size_t r = 0; r < lp.rows.size(); ++r) reduced += lp.rows[r][j] * out.duals[r];
    out.dual_residual = std::max(out.dual_residual, -reduced);
  }
  out.duality_gap = std::abs(out.objective - dual_objective);

  const double scale = 1.0 + std::abs(out.objective);
  const double worst = std::max({out.primal_residual, out.dual_residual, out.duality_gap});
  if (worst > options.residual_tolerance * scale) {
    std::ostringstream msg;
    msg << "LP residuals too large: primal " << out.primal_residual << ", dual "
        << out.dual_residual << ", gap " << out.duality_gap;
    fail(ErrorCode::kLpNumericalFailure, msg.str());
  }
  return out;
}

}  // namespace ecomp
