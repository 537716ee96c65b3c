#include "ecomp/dist_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ecomp {

namespace {

constexpr double kRenormalizeSlack = 1e-6;

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    return std::numeric_limits<std::size_t>::max();
  }
  return a * b;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeValue: return "NegativeValue";
    case ErrorCode::kEmptySupport: return "EmptySupport";
    case ErrorCode::kNonPositiveProbability: return "NonPositiveProbability";
    case ErrorCode::kProbabilityMismatch: return "ProbabilityMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidSetting: return "InvalidSetting";
    case ErrorCode::kTooFewBidders: return "TooFewBidders";
    case ErrorCode::kFloorNotInSupport: return "FloorNotInSupport";
    case ErrorCode::kBadItemIndex: return "BadItemIndex";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::kNotRegular: return "NotRegular";
    case ErrorCode::kInstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::kLpNumericalFailure: return "LPNumericalFailure";
    case ErrorCode::kLpUnbounded: return "Unbounded";
    case ErrorCode::kLpMaxIterations: return "MaxIterations";
    case ErrorCode::kConfigParse: return "ConfigParseError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

// ---------------------------------------------------------------------------
// ScalarDistribution

ScalarDistribution::ScalarDistribution() : atoms_{{0.0, 1.0}} {}

ScalarDistribution ScalarDistribution::from_atoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  ScalarDistribution out;
  out.atoms_.clear();
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.value) || !std::isfinite(a.prob)) {
      fail(ErrorCode::kNonPositiveProbability, "non-finite atom in scalar law");
    }
    if (a.prob < 0.0) fail(ErrorCode::kNonPositiveProbability, "negative atom mass");
    if (a.prob == 0.0) continue;
    total += a.prob;
    if (!out.atoms_.empty() && out.atoms_.back().value == a.value) {
      out.atoms_.back().prob += a.prob;
    } else {
      out.atoms_.push_back(a);
    }
  }
  if (out.atoms_.empty()) fail(ErrorCode::kEmptySupport, "scalar law has no mass");
  if (std::abs(total - 1.0) > kRenormalizeSlack) {
    std::ostringstream msg;
    msg << "scalar law mass " << total << " is not 1";
    fail(ErrorCode::kProbabilityMismatch, msg.str());
  }
  for (Atom& a : out.atoms_) a.prob /= total;
  return out;
}

ScalarDistribution ScalarDistribution::point_mass(double value) {
  return from_atoms({{value, 1.0}});
}

double ScalarDistribution::mean() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.value * a.prob;
  return s;
}

double ScalarDistribution::second_moment() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.value * a.value * a.prob;
  return s;
}

double ScalarDistribution::cdf(double x) const {
  double s = 0.0;
  for (const Atom& a : atoms_) {
    if (a.value > x) break;
    s += a.prob;
  }
  return std::min(s, 1.0);
}

double ScalarDistribution::survival(double x) const {
  double s = 0.0;
  for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) {
    if (it->value < x) break;
    s += it->prob;
  }
  return std::min(s, 1.0);
}

// ---------------------------------------------------------------------------
// ItemDistribution

ItemDistribution make_item_distribution(std::vector<double> values, std::vector<double> probs) {
  if (values.empty()) fail(ErrorCode::kEmptySupport, "item support is empty");
  if (values.size() != probs.size()) {
    fail(ErrorCode::kLengthMismatch, "values and probs differ in length");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      fail(ErrorCode::kNegativeValue, "support values must be finite and non-negative");
    }
    if (!std::isfinite(probs[i]) || probs[i] <= 0.0) {
      fail(ErrorCode::kNonPositiveProbability, "support probabilities must be positive");
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  ItemDistribution item;
  double total = 0.0;
  for (std::size_t i : order) {
    total += probs[i];
    if (!item.values_.empty() && item.values_.back() == values[i]) {
      item.probs_.back() += probs[i];
    } else {
      item.values_.push_back(values[i]);
      item.probs_.push_back(probs[i]);
    }
  }
  if (std::abs(total - 1.0) > kRenormalizeSlack) {
    std::ostringstream msg;
    msg << "item probabilities sum to " << total << ", off by more than 1e-6";
    fail(ErrorCode::kProbabilityMismatch, msg.str());
  }
  double running = 0.0;
  item.cdf_.reserve(item.probs_.size());
  for (double& p : item.probs_) {
    p /= total;
    running += p;
    item.cdf_.push_back(running);
  }
  item.cdf_.back() = 1.0;
  return item;
}

double ItemDistribution::cdf(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin()) return 0.0;
  return cdf_[static_cast<std::size_t>(it - values_.begin()) - 1];
}

double ItemDistribution::survival(double x) const {
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  return survival_at(static_cast<std::size_t>(it - values_.begin()));
}

std::optional<std::size_t> ItemDistribution::index_of(double x) const {
  const auto it = std::lower_bound(values_.begin(), values_.end(), x);
  if (it == values_.end() || *it != x) return std::nullopt;
  return static_cast<std::size_t>(it - values_.begin());
}

ScalarDistribution ItemDistribution::law() const {
  std::vector<Atom> atoms;
  atoms.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) atoms.push_back({values_[i], probs_[i]});
  return ScalarDistribution::from_atoms(std::move(atoms));
}

// ---------------------------------------------------------------------------
// AuctionSetting

AuctionSetting::AuctionSetting(std::vector<ItemDistribution> items, int n, int n_prime,
                               double epsilon, EnumerationCaps caps)
    : items_(std::move(items)), n_(n), n_prime_(n_prime), epsilon_(epsilon), caps_(caps) {
  if (items_.empty()) fail(ErrorCode::kInvalidSetting, "a setting needs at least one item");
  if (n_ < 1) fail(ErrorCode::kInvalidSetting, "n must be positive");
  if (n_prime_ < n_) fail(ErrorCode::kInvalidSetting, "n_prime must be at least n");
  if (!(epsilon_ > 0.0 && epsilon_ <= 1.0)) {
    fail(ErrorCode::kInvalidSetting, "epsilon must lie in (0, 1]");
  }
}

std::size_t AuctionSetting::valuation_count() const {
  std::size_t count = 1;
  for (const auto& item : items_) count = saturating_mul(count, item.size());
  return count;
}

// ---------------------------------------------------------------------------
// ProductSpace

ProductSpace::ProductSpace(std::vector<ScalarDistribution> factors)
    : factors_(std::move(factors)) {
  strides_.resize(factors_.size());
  size_ = 1;
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    strides_[j] = size_;
    size_ = saturating_mul(size_, factors_[j].size());
  }
}

std::size_t ProductSpace::index_of(std::span<const std::size_t> digits) const {
  std::size_t index = 0;
  for (std::size_t j = 0; j < digits.size(); ++j) index += digits[j] * strides_[j];
  return index;
}

std::vector<std::size_t> ProductSpace::digits_of(std::size_t index) const {
  std::vector<std::size_t> digits(dims());
  for (std::size_t j = 0; j < dims(); ++j) {
    digits[j] = index % factors_[j].size();
    index /= factors_[j].size();
  }
  return digits;
}

std::vector<double> ProductSpace::coords_of(std::size_t index) const {
  std::vector<double> coords(dims());
  for (std::size_t j = 0; j < dims(); ++j) {
    coords[j] = factors_[j].atoms()[index % factors_[j].size()].value;
    index /= factors_[j].size();
  }
  return coords;
}

double ProductSpace::prob_of(std::size_t index) const {
  double prob = 1.0;
  for (std::size_t j = 0; j < dims(); ++j) {
    prob *= factors_[j].atoms()[index % factors_[j].size()].prob;
    index /= factors_[j].size();
  }
  return prob;
}

ProductSpace valuation_space(const AuctionSetting& setting) {
  if (setting.valuation_count() > setting.caps().max_valuations) {
    std::ostringstream msg;
    msg << "valuation space has " << setting.valuation_count() << " points, above the cap of "
        << setting.caps().max_valuations << "; use monte_carlo mode";
    fail(ErrorCode::kEnumerationCapExceeded, msg.str());
  }
  std::vector<ScalarDistribution> laws;
  for (const auto& item : setting.items()) laws.push_back(item.law());
  return ProductSpace(std::move(laws));
}

// ---------------------------------------------------------------------------
// Order statistics

ScalarDistribution max_of_iid(const ScalarDistribution& law, int k) {
  if (k < 0) fail(ErrorCode::kInvalidSetting, "negative draw count");
  if (k == 0) return ScalarDistribution::point_mass(0.0);
  std::vector<Atom> atoms;
  atoms.reserve(law.size());
  double below = 0.0;
  double prev_pow = 0.0;
  for (const Atom& a : law.atoms()) {
    below += a.prob;
    const double cur_pow = std::pow(std::min(below, 1.0), k);
    atoms.push_back({a.value, std::max(cur_pow - prev_pow, 0.0)});
    prev_pow = cur_pow;
  }
  // The top atom absorbs round-off so the CDF ends at exactly one.
  atoms.back().prob += 1.0 - prev_pow;
  return ScalarDistribution::from_atoms(std::move(atoms));
}

MaxVectorDistribution max_vector_distribution(const AuctionSetting& setting, int k) {
  if (k < 0) fail(ErrorCode::kInvalidSetting, "negative draw count");
  MaxVectorDistribution out;
  out.k = k;
  for (const auto& item : setting.items()) out.per_item.push_back(max_of_iid(item.law(), k));
  return out;
}

ProductSpace MaxVectorDistribution::joint(const EnumerationCaps& caps) const {
  std::size_t count = 1;
  for (const auto& law : per_item) count = saturating_mul(count, law.size());
  if (count > caps.max_valuations) {
    std::ostringstream msg;
    msg << "max-vector support has " << count << " points, above the cap of "
        << caps.max_valuations << "; use monte_carlo mode";
    fail(ErrorCode::kEnumerationCapExceeded, msg.str());
  }
  return ProductSpace(per_item);
}

double iid_max_expectation(const ScalarDistribution& law, int n) {
  if (n < 1) fail(ErrorCode::kTooFewBidders, "need at least one draw");
  double expectation = 0.0;
  double below = 0.0;
  double prev_pow = 0.0;
  for (const Atom& a : law.atoms()) {
    below = std::min(below + a.prob, 1.0);
    const double cur_pow = std::pow(below, n);
    expectation += a.value * (cur_pow - prev_pow);
    prev_pow = cur_pow;
  }
  expectation += law.max() * (1.0 - prev_pow);
  return expectation;
}

double iid_second_max_expectation(const ScalarDistribution& law, int n) {
  if (n < 2) fail(ErrorCode::kTooFewBidders, "second order statistic needs at least two draws");
  // Pr(second max <= s) = F^n + n F^(n-1) (1 - F).
  const auto second_cdf = [n](double f) {
    return std::pow(f, n) + n * std::pow(f, n - 1) * (1.0 - f);
  };
  double expectation = 0.0;
  double below = 0.0;
  double prev = 0.0;
  for (const Atom& a : law.atoms()) {
    below = std::min(below + a.prob, 1.0);
    const double cur = second_cdf(below);
    expectation += a.value * (cur - prev);
    prev = cur;
  }
  expectation += law.max() * (1.0 - prev);
  return expectation;
}

double variance(const ScalarDistribution& law) {
  const double mu = law.mean();
  double s = 0.0;
  for (const Atom& a : law.atoms()) s += a.prob * (a.value - mu) * (a.value - mu);
  return s;
}

double deviation_probability(const ScalarDistribution& law, double a) {
  const double mu = law.mean();
  double s = 0.0;
  for (const Atom& atom : law.atoms()) {
    if (std::abs(atom.value - mu) >= a) s += atom.prob;
  }
  return s;
}

VarianceBound variance_ub_check(const ScalarDistribution& law, double tolerance) {
  if (law.min() < 0.0) fail(ErrorCode::kNegativeValue, "variance bound needs a non-negative law");
  double best_revenue = 0.0;
  for (const Atom& a : law.atoms()) {
    best_revenue = std::max(best_revenue, a.value * law.survival(a.value));
  }
  VarianceBound out{law.second_moment(), 2.0 * best_revenue * law.max(), false};
  out.holds = leq_tol(out.lhs, out.rhs, tolerance);
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  // splitmix64 finalizer over (root, stream).
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

std::size_t sample_index(const ItemDistribution& item, Rng& rng) {
  const double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < item.size(); ++i) {
    if (u < item.cdf_at(i)) return i;
  }
  return item.size() - 1;
}

}  // namespace ecomp
