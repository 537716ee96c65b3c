#include "ecomp/random_instances.hpp"

#include <algorithm>
#include <numeric>

#include "ecomp/myerson.hpp"

namespace ecomp {

namespace {

std::vector<double> distinct_values(Rng& rng, int count, int max_value) {
  std::vector<int> pool(static_cast<std::size_t>(max_value) + 1);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(rng.uniform_int(i, max_value));
    std::swap(pool[static_cast<std::size_t>(i)], pool[k]);
  }
  std::vector<double> out(pool.begin(), pool.begin() + count);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> random_masses(Rng& rng, int count) {
  std::vector<double> p(static_cast<std::size_t>(count));
  double total = 0.0;
  for (double& x : p) {
    x = 0.05 + 0.95 * rng.uniform();
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

}  // namespace

ItemDistribution random_item(Rng& rng, int min_support, int max_support, int max_value) {
  if (min_support < 1 || max_support < min_support || max_value + 1 < max_support) {
    fail(ErrorCode::kInvalidSetting, "bad random item bounds");
  }
  const auto size = static_cast<int>(rng.uniform_int(min_support, max_support));
  return make_item_distribution(distinct_values(rng, size, max_value), random_masses(rng, size));
}

ItemDistribution random_regular_item(Rng& rng, int min_support, int max_support, int max_value) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    ItemDistribution item = random_item(rng, min_support, max_support, max_value);
    if (iron(item).regular) return item;
  }
  const auto size = static_cast<std::size_t>(rng.uniform_int(min_support, max_support));
  std::vector<double> values(size);
  std::iota(values.begin(), values.end(), 1.0);
  return make_item_distribution(values, std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

ScalarDistribution random_law(Rng& rng, int max_support, int max_value) {
  return random_item(rng, 1, max_support, max_value).law();
}

AuctionSetting random_setting(Rng& rng, const InstanceBounds& bounds) {
  const auto m = static_cast<int>(rng.uniform_int(bounds.min_items, bounds.max_items));
  std::vector<ItemDistribution> items;
  for (int j = 0; j < m; ++j) {
    items.push_back(bounds.regular
                        ? random_regular_item(rng, bounds.min_support, bounds.max_support, bounds.max_value)
                        : random_item(rng, bounds.min_support, bounds.max_support, bounds.max_value));
  }
  return AuctionSetting(std::move(items));
}

}  // namespace ecomp
