#pragma once

// Exact expected revenue of the simple benchmark auctions, and the
// separate-sale lower bounds (reserve VCG, sequential posted prices, and the
// Ronen-style "price above the others' max" auction).

#include <cstddef>
#include <optional>
#include <vector>

#include "ecomp/dist_core.hpp"

namespace ecomp {

/// Sum over items of the expected second order statistic of n draws.
double vcg_revenue(const AuctionSetting& setting, int n);

struct RonenValue {
  double revenue = 0.0;
  std::optional<double> argmax;  // smallest maximizing price, if any
};

/// max over support y > x of y * Pr(v >= y); (0, none) when no y > x.
RonenValue ronen_r_star(const ItemDistribution& item, double x);

/// r_star tabulated at every support point plus at zero.
class RonenTable {
 public:
  explicit RonenTable(const ItemDistribution& item);
  RonenValue at(double x) const;

 private:
  std::vector<double> values_;
  // suffix_[i] = best (revenue, price) over support indices >= i.
  std::vector<RonenValue> suffix_;
};

/// sum_j n * E_M[r_star_j(M_j)], M the max of n - 1 i.i.d. draws.
double ronen_bound(const AuctionSetting& setting, int n);

/// x * Pr(max of n draws from D_j >= x).
double vcg_with_reserve_bound(const AuctionSetting& setting, std::size_t j, double x, int n);

/// sum_j E[max_i prices[i][j] * 1(v_ij >= prices[i][j])]; prices is n x m.
double sequential_posted_price_bound(const AuctionSetting& setting,
                                     const std::vector<std::vector<double>>& prices, int n);

struct BulowKlempererCheck {
  bool applicable = false;  // false when some item is irregular
  double srev_n = 0.0;
  double vcg_n_plus_1 = 0.0;
  bool holds = false;
};

BulowKlempererCheck bulow_klemperer_check(const AuctionSetting& setting, int n,
                                          double tolerance = kDefaultTolerance);

}  // namespace ecomp
