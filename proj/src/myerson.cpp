#include "ecomp/myerson.hpp"

#include <algorithm>
#include <cmath>

namespace ecomp {

namespace {

constexpr double kRegularSlack = 1e-12;

// Runs the plateau-averaging loop over support indices [floor_index, top].
// The argmax only looks at y >= floor_index and the loop stops once the
// chosen left end reaches floor_index. Ties go to the larger y: candidates
// are scanned from the right and replaced only on strict improvement.
std::vector<double> iron_from(const ItemDistribution& item, const std::vector<double>& phi,
                              std::size_t floor_index) {
  const std::size_t size = item.size();
  std::vector<double> out(size - floor_index, 0.0);
  std::size_t x = size - 1;
  while (true) {
    double mass = 0.0;
    double weighted = 0.0;
    double best = 0.0;
    std::size_t best_y = x;
    for (std::size_t y = x + 1; y-- > floor_index;) {
      mass += item.prob(y);
      weighted += item.prob(y) * phi[y];
      const double a = weighted / mass;
      if (y == x || a > best) {
        best = a;
        best_y = y;
      }
    }
    for (std::size_t y = best_y; y <= x; ++y) out[y - floor_index] = best;
    if (best_y == floor_index) break;
    x = best_y - 1;
  }
  return out;
}

}  // namespace

std::vector<double> virtual_values(const ItemDistribution& item) {
  std::vector<double> phi(item.size());
  for (std::size_t i = 0; i < item.size(); ++i) {
    if (i + 1 == item.size()) {
      phi[i] = item.value(i);
    } else {
      const double gap = item.value(i + 1) - item.value(i);
      phi[i] = item.value(i) - gap * (1.0 - item.cdf_at(i)) / item.prob(i);
    }
  }
  return phi;
}

IronedTable iron(const ItemDistribution& item) {
  IronedTable table{item, virtual_values(item), {}, true};
  table.phi_tilde = iron_from(item, table.phi, 0);
  for (std::size_t i = 0; i + 1 < table.phi.size(); ++i) {
    if (table.phi[i + 1] < table.phi[i] - kRegularSlack) table.regular = false;
  }
  return table;
}

RestrictedIroning iron_restricted_at(const ItemDistribution& item, std::size_t floor_index) {
  if (floor_index >= item.size()) fail(ErrorCode::kFloorNotInSupport, "floor index out of range");
  return {floor_index, iron_from(item, virtual_values(item), floor_index)};
}

RestrictedIroning iron_restricted(const ItemDistribution& item, double floor) {
  const auto index = item.index_of(floor);
  if (!index) fail(ErrorCode::kFloorNotInSupport, "restriction floor is not a support point");
  return iron_restricted_at(item, *index);
}

ScalarDistribution positive_ironed_law(const IronedTable& table) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < table.item.size(); ++i) {
    atoms.push_back({std::max(table.phi_tilde[i], 0.0), table.item.prob(i)});
  }
  return ScalarDistribution::from_atoms(std::move(atoms));
}

double srev_item(const ItemDistribution& item, int n) {
  if (n < 1) fail(ErrorCode::kTooFewBidders, "srev needs at least one bidder");
  return iid_max_expectation(positive_ironed_law(iron(item)), n);
}

double srev(const AuctionSetting& setting, int n) {
  double total = 0.0;
  for (const auto& item : setting.items()) total += srev_item(item, n);
  return total;
}

}  // namespace ecomp
