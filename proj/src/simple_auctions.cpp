#include "ecomp/simple_auctions.hpp"

#include <algorithm>
#include <cmath>

#include "ecomp/myerson.hpp"

namespace ecomp {

double vcg_revenue(const AuctionSetting& setting, int n) {
  if (n < 2) fail(ErrorCode::kTooFewBidders, "VCG revenue needs at least two bidders");
  double total = 0.0;
  for (const auto& item : setting.items()) total += iid_second_max_expectation(item.law(), n);
  return total;
}

RonenTable::RonenTable(const ItemDistribution& item)
    : values_(item.values().begin(), item.values().end()), suffix_(item.size() + 1) {
  for (std::size_t i = item.size(); i-- > 0;) {
    const double revenue = item.value(i) * item.survival_at(i);
    // >= keeps the smaller price on ties since we sweep downwards.
    if (!suffix_[i + 1].argmax || revenue >= suffix_[i + 1].revenue) {
      suffix_[i] = {revenue, item.value(i)};
    } else {
      suffix_[i] = suffix_[i + 1];
    }
  }
}

RonenValue RonenTable::at(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return suffix_[static_cast<std::size_t>(it - values_.begin())];
}

RonenValue ronen_r_star(const ItemDistribution& item, double x) {
  if (x < 0.0) fail(ErrorCode::kNegativeValue, "r_star is defined for x >= 0");
  RonenValue best;
  for (std::size_t i = 0; i < item.size(); ++i) {
    if (item.value(i) <= x) continue;
    const double revenue = item.value(i) * item.survival_at(i);
    if (!best.argmax || revenue > best.revenue) best = {revenue, item.value(i)};
  }
  return best;
}

double ronen_bound(const AuctionSetting& setting, int n) {
  if (n < 1) fail(ErrorCode::kTooFewBidders, "ronen bound needs at least one bidder");
  double total = 0.0;
  for (const auto& item : setting.items()) {
    const RonenTable table(item);
    const ScalarDistribution others = max_of_iid(item.law(), n - 1);
    double expectation = 0.0;
    for (const Atom& a : others.atoms()) expectation += a.prob * table.at(a.value).revenue;
    total += n * expectation;
  }
  return total;
}

double vcg_with_reserve_bound(const AuctionSetting& setting, std::size_t j, double x, int n) {
  if (j >= setting.num_items()) fail(ErrorCode::kBadItemIndex, "item index out of range");
  if (x < 0.0) fail(ErrorCode::kNegativeValue, "reserve must be non-negative");
  if (n < 1) fail(ErrorCode::kTooFewBidders, "need at least one bidder");
  const ItemDistribution& item = setting.item(j);
  // Pr(max >= x) = 1 - F(x^-)^n.
  const double below = 1.0 - item.survival(x);
  return x * (1.0 - std::pow(below, n));
}

double sequential_posted_price_bound(const AuctionSetting& setting,
                                     const std::vector<std::vector<double>>& prices, int n) {
  if (n < 1) fail(ErrorCode::kTooFewBidders, "need at least one bidder");
  if (prices.size() != static_cast<std::size_t>(n)) {
    fail(ErrorCode::kShapeMismatch, "price matrix must have one row per bidder");
  }
  for (const auto& row : prices) {
    if (row.size() != setting.num_items()) {
      fail(ErrorCode::kShapeMismatch, "price matrix must have one column per item");
    }
    for (double p : row) {
      if (p < 0.0) fail(ErrorCode::kNegativeValue, "posted prices must be non-negative");
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < setting.num_items(); ++j) {
    const ItemDistribution& item = setting.item(j);
    std::vector<double> levels;
    for (const auto& row : prices) {
      if (row[j] > 0.0) levels.push_back(row[j]);
    }
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    // Layer cake: E[max] = sum_k (L_k - L_{k+1}) Pr(max >= L_k), and the max
    // reaches L exactly when some bidder priced at >= L accepts.
    for (std::size_t k = 0; k < levels.size(); ++k) {
      double none_accept = 1.0;
      for (const auto& row : prices) {
        if (row[j] >= levels[k]) none_accept *= 1.0 - item.survival(row[j]);
      }
      const double next = k + 1 < levels.size() ? levels[k + 1] : 0.0;
      total += (levels[k] - next) * (1.0 - none_accept);
    }
  }
  return total;
}

BulowKlempererCheck bulow_klemperer_check(const AuctionSetting& setting, int n,
                                          double tolerance) {
  BulowKlempererCheck out;
  out.applicable = std::all_of(setting.items().begin(), setting.items().end(),
                               [](const ItemDistribution& item) { return iron(item).regular; });
  out.srev_n = srev(setting, n);
  out.vcg_n_plus_1 = vcg_revenue(setting, n + 1);
  out.holds = leq_tol(out.srev_n, out.vcg_n_plus_1, tolerance);
  return out;
}

}  // namespace ecomp
