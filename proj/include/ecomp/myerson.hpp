#pragma once

// Myerson virtual values for discrete items, the plateau-averaging ironing
// procedure and its floor-restricted variant, and separate-sale revenue.

#include <cstddef>
#include <vector>

#include "ecomp/dist_core.hpp"

namespace ecomp {

/// phi(x) = x at the top of the support, x - (x' - x)(1 - F(x)) / f(x)
/// otherwise, with x' the successor of x.
std::vector<double> virtual_values(const ItemDistribution& item);

struct IronedTable {
  ItemDistribution item;
  std::vector<double> phi;
  std::vector<double> phi_tilde;
  bool regular = false;
};

IronedTable iron(const ItemDistribution& item);

/// Output of the ironing procedure restricted to support points at or above
/// a floor: phi[k] is the value for support index floor_index + k.
struct RestrictedIroning {
  std::size_t floor_index = 0;
  std::vector<double> phi;

  double at(std::size_t support_index) const { return phi.at(support_index - floor_index); }
};

RestrictedIroning iron_restricted(const ItemDistribution& item, double floor);
RestrictedIroning iron_restricted_at(const ItemDistribution& item, std::size_t floor_index);

/// Law of phi_tilde(v)^+ under v ~ D_j.
ScalarDistribution positive_ironed_law(const IronedTable& table);

double srev_item(const ItemDistribution& item, int n);
double srev(const AuctionSetting& setting, int n);

}  // namespace ecomp
