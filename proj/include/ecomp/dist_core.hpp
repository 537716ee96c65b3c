#pragma once

// Finite discrete distributions and the exact order-statistic machinery the
// rest of the toolkit is built on. Everything here is an immutable value type
// or a pure function.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ecomp/error.hpp"

namespace ecomp {

/// Absolute-plus-relative slack used by every inequality check by default.
inline constexpr double kDefaultTolerance = 1e-9;

/// Limits on exact enumeration. Exceeding one is an error that points the
/// caller at Monte-Carlo mode.
struct EnumerationCaps {
  std::size_t max_valuations = 4096;          // prod_j |V_j|
  std::size_t max_joint_terms = std::size_t{1} << 24;  // valuations x max-vectors
  int max_n_prime = 1'000'000;
};

struct Atom {
  double value;
  double prob;
};

/// Law of a real random variable with finitely many atoms, values strictly
/// increasing and probabilities summing to one.
class ScalarDistribution {
 public:
  /// Point mass at zero.
  ScalarDistribution();

  /// Sorts, merges equal values, drops exact-zero masses and renormalizes.
  /// Negative masses or a total far from one are rejected.
  static ScalarDistribution from_atoms(std::vector<Atom> atoms);
  static ScalarDistribution point_mass(double value);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double min() const { return atoms_.front().value; }
  double max() const { return atoms_.back().value; }

  double mean() const;
  double second_moment() const;
  /// Pr(X <= x).
  double cdf(double x) const;
  /// Pr(X >= x).
  double survival(double x) const;

 private:
  std::vector<Atom> atoms_;
};

/// One item's value distribution: strictly increasing non-negative support,
/// every point with positive mass.
class ItemDistribution {
 public:
  std::span<const double> values() const { return values_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return values_.size(); }
  double value(std::size_t i) const { return values_[i]; }
  double prob(std::size_t i) const { return probs_[i]; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

  /// F(values[i]).
  double cdf_at(std::size_t i) const { return cdf_[i]; }
  /// Pr(v >= values[i]).
  double survival_at(std::size_t i) const { return i == 0 ? 1.0 : 1.0 - cdf_[i - 1]; }
  /// F(x) for arbitrary real x.
  double cdf(double x) const;
  /// Pr(v >= x) for arbitrary real x.
  double survival(double x) const;
  std::optional<std::size_t> index_of(double x) const;

  ScalarDistribution law() const;

 private:
  friend ItemDistribution make_item_distribution(std::vector<double>, std::vector<double>);
  ItemDistribution() = default;

  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
};

/// Validating factory: sorts the support, merges duplicate values and
/// renormalizes probabilities that are off by at most 1e-6.
ItemDistribution make_item_distribution(std::vector<double> values, std::vector<double> probs);

/// m independent items, the real bidder count n, the enhanced count n' and
/// epsilon. The per-call bidder counts accepted by most operations are
/// independent of the n stored here.
class AuctionSetting {
 public:
  explicit AuctionSetting(std::vector<ItemDistribution> items, int n = 1, int n_prime = 1,
                          double epsilon = 1.0, EnumerationCaps caps = {});

  std::span<const ItemDistribution> items() const { return items_; }
  const ItemDistribution& item(std::size_t j) const { return items_.at(j); }
  std::size_t num_items() const { return items_.size(); }
  int n() const { return n_; }
  int n_prime() const { return n_prime_; }
  double epsilon() const { return epsilon_; }
  const EnumerationCaps& caps() const { return caps_; }

  /// prod_j |V_j|, saturating at SIZE_MAX.
  std::size_t valuation_count() const;

 private:
  std::vector<ItemDistribution> items_;
  int n_;
  int n_prime_;
  double epsilon_;
  EnumerationCaps caps_;
};

using Valuation = std::vector<double>;

/// Mixed-radix enumeration of a product of independent finite laws. Index 0
/// is the all-minimum point; the first factor varies fastest.
class ProductSpace {
 public:
  ProductSpace() = default;
  explicit ProductSpace(std::vector<ScalarDistribution> factors);

  std::size_t size() const { return size_; }
  std::size_t dims() const { return factors_.size(); }
  const ScalarDistribution& factor(std::size_t j) const { return factors_[j]; }

  std::size_t index_of(std::span<const std::size_t> digits) const;
  std::vector<std::size_t> digits_of(std::size_t index) const;
  std::vector<double> coords_of(std::size_t index) const;
  double prob_of(std::size_t index) const;

  /// Calls fn(index, coords, prob) for every point in index order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    if (size_ == 0) return;
    std::vector<std::size_t> digits(dims(), 0);
    std::vector<double> coords(dims());
    for (std::size_t j = 0; j < dims(); ++j) coords[j] = factors_[j].atoms()[0].value;
    for (std::size_t index = 0; index < size_; ++index) {
      double prob = 1.0;
      for (std::size_t j = 0; j < dims(); ++j) prob *= factors_[j].atoms()[digits[j]].prob;
      fn(index, std::span<const double>(coords), prob);
      for (std::size_t j = 0; j < dims(); ++j) {
        if (++digits[j] < factors_[j].size()) {
          coords[j] = factors_[j].atoms()[digits[j]].value;
          break;
        }
        digits[j] = 0;
        coords[j] = factors_[j].atoms()[0].value;
      }
    }
  }

 private:
  std::vector<ScalarDistribution> factors_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// The valuation space V with its product law; enforces caps.max_valuations.
ProductSpace valuation_space(const AuctionSetting& setting);

/// Law of the coordinate-wise maximum of k i.i.d. valuations. Items stay
/// independent, so only the per-item marginals are stored.
struct MaxVectorDistribution {
  int k = 0;
  std::vector<ScalarDistribution> per_item;

  /// Joint enumeration of the max vector; enforces caps.max_valuations.
  ProductSpace joint(const EnumerationCaps& caps) const;
};

/// Law of max of k i.i.d. draws; k = 0 gives the point mass at zero.
ScalarDistribution max_of_iid(const ScalarDistribution& law, int k);
MaxVectorDistribution max_vector_distribution(const AuctionSetting& setting, int k);

double iid_max_expectation(const ScalarDistribution& law, int n);
double iid_second_max_expectation(const ScalarDistribution& law, int n);
double variance(const ScalarDistribution& law);

/// Pr(|X - E[X]| >= a), by exact tail summation.
double deviation_probability(const ScalarDistribution& law, double a);

struct VarianceBound {
  double lhs;  // E[X^2]
  double rhs;  // 2 * max_x x Pr(X >= x) * max X
  bool holds;
};

/// Second-moment bound for a non-negative random variable.
VarianceBound variance_ub_check(const ScalarDistribution& law, double tolerance = kDefaultTolerance);

/// a <= b up to absolute-plus-relative slack.
inline bool leq_tol(double a, double b, double tolerance) {
  const double scale = 1.0 + (a < 0 ? -a : a) + (b < 0 ? -b : b);
  return a <= b + tolerance * scale;
}

/// Seeded generator. mt19937_64 is fully specified by the standard, and the
/// uniform mapping below avoids implementation-defined distributions, so
/// streams are bit-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

/// Counter-based substream seed derivation.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

/// Inverse-CDF draw of a support index.
std::size_t sample_index(const ItemDistribution& item, Rng& rng);

}  // namespace ecomp
