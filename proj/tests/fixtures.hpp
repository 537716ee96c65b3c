#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ecomp/dist_core.hpp"

namespace fixtures {

inline ecomp::ItemDistribution d2() { return ecomp::make_item_distribution({1, 2}, {0.5, 0.5}); }
inline ecomp::ItemDistribution d3() { return ecomp::make_item_distribution({4, 5, 10}, {0.6, 0.2, 0.2}); }
inline ecomp::ItemDistribution point(double c) { return ecomp::make_item_distribution({c}, {1.0}); }

inline ecomp::AuctionSetting single(const ecomp::ItemDistribution& item) {
  return ecomp::AuctionSetting({item});
}
inline ecomp::AuctionSetting d2xd2() { return ecomp::AuctionSetting({d2(), d2()}); }

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

/// Calls fn(tuple, prob) for every n-tuple of support indices of a law.
template <class Fn>
void for_each_tuple(const ecomp::ScalarDistribution& law, int n, Fn&& fn) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  const std::size_t k = law.size();
  while (true) {
    std::vector<double> values(idx.size());
    double prob = 1.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      values[i] = law.atoms()[idx[i]].value;
      prob *= law.atoms()[idx[i]].prob;
    }
    fn(values, prob);
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == k) idx[pos++] = 0;
    if (pos == idx.size()) return;
  }
}

}  // namespace fixtures
