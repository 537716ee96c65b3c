#include "ecomp/duality.hpp"

#include <algorithm>
#include <cmath>

#include "ecomp/iu_benchmark.hpp"
#include "ecomp/myerson.hpp"

namespace ecomp {

DualFlow::DualFlow(const AuctionSetting& setting, std::vector<double> maxvec)
    : setting_(setting), maxvec_(std::move(maxvec)), valuations_(valuation_space(setting)) {
  if (maxvec_.size() != setting.num_items()) {
    fail(ErrorCode::kLengthMismatch, "max vector has the wrong length");
  }
  for (double x : maxvec_) {
    if (x < 0.0) fail(ErrorCode::kNegativeValue, "max vector coordinates must be non-negative");
  }
  region_.resize(valuations_.size());
  simplified_phi_.assign(valuations_.size(), std::vector<double>(setting.num_items(), 0.0));
  valuations_.for_each([&](std::size_t index, std::span<const double> v, double) {
    region_[index] = region_of(v, maxvec_);
    for (std::size_t j = 0; j < v.size(); ++j) simplified_phi_[index][j] = v[j];
  });
}

double DualFlow::lambda(std::size_t from, std::size_t to) const {
  double total = 0.0;
  if (auto it = lambda_prime_.find({from, to}); it != lambda_prime_.end()) total += it->second;
  if (auto it = lambda_star_.find({from, to}); it != lambda_star_.end()) total += it->second;
  return total;
}

void DualFlow::build_lambda_prime() {
  lambda_prime_.clear();
  const std::size_t m = setting_.num_items();
  for (std::size_t index = 0; index < valuations_.size(); ++index) {
    const auto region = region_[index];
    if (!region) {
      lambda_prime_[{index, kEmpty}] = valuations_.prob_of(index);
      continue;
    }
    const std::size_t j = *region;
    auto digits = valuations_.digits_of(index);
    const ItemDistribution& item = setting_.item(j);
    double others = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k != j) others *= setting_.item(k).prob(digits[k]);
    }
    const double weight = item.survival_at(digits[j]) * others;
    std::size_t target = kEmpty;
    if (digits[j] > 0) {
      --digits[j];
      const std::size_t below = valuations_.index_of(digits);
      if (region_[below] == j) target = below;
    }
    lambda_prime_[{index, target}] = weight;
  }
}

void DualFlow::build_lambda_star() {
  lambda_star_.clear();
  const std::size_t m = setting_.num_items();
  for (std::size_t j = 0; j < m; ++j) {
    const ItemDistribution& item = setting_.item(j);
    const std::vector<double> phi = virtual_values(item);
    for (std::size_t base = 0; base < valuations_.size(); ++base) {
      auto digits = valuations_.digits_of(base);
      if (digits[j] != 0) continue;
      double others = 1.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (k != j) others *= setting_.item(k).prob(digits[k]);
      }
      std::vector<std::size_t> slice(item.size());
      std::optional<std::size_t> floor;
      for (std::size_t t = 0; t < item.size(); ++t) {
        digits[j] = t;
        slice[t] = valuations_.index_of(digits);
        if (!floor && region_[slice[t]] == j) floor = t;
      }
      if (!floor) continue;
      const RestrictedIroning restricted = iron_restricted_at(item, *floor);
      for (std::size_t t = *floor; t < item.size(); ++t) {
        simplified_phi_[slice[t]][j] = restricted.at(t);
      }
      for (std::size_t t = *floor; t + 1 < item.size(); ++t) {
        double excess = 0.0;
        for (std::size_t u = t + 1; u < item.size(); ++u) {
          excess += item.prob(u) * (restricted.at(u) - phi[u]);
        }
        const double weight = others / (item.value(t + 1) - item.value(t)) * excess;
        lambda_star_[{slice[t], slice[t + 1]}] = weight;
        lambda_star_[{slice[t + 1], slice[t]}] = weight;
      }
    }
  }
}

std::vector<double> DualFlow::flow_residuals() const {
  std::vector<double> residual(valuations_.size());
  for (std::size_t v = 0; v < residual.size(); ++v) residual[v] = valuations_.prob_of(v);
  for (const Edges* edges : {&lambda_prime_, &lambda_star_}) {
    for (const auto& [edge, weight] : *edges) {
      residual[edge.first] -= weight;
      if (edge.second != kEmpty) residual[edge.second] += weight;
    }
  }
  return residual;
}

std::vector<std::vector<double>> DualFlow::phi_lambda() const {
  const std::size_t m = setting_.num_items();
  std::vector<std::vector<double>> inflow(valuations_.size(), std::vector<double>(m, 0.0));
  for (const Edges* edges : {&lambda_prime_, &lambda_star_}) {
    for (const auto& [edge, weight] : *edges) {
      if (edge.second == kEmpty) continue;
      const auto from = valuations_.coords_of(edge.first);
      const auto to = valuations_.coords_of(edge.second);
      for (std::size_t j = 0; j < m; ++j) inflow[edge.second][j] += weight * (from[j] - to[j]);
    }
  }
  std::vector<std::vector<double>> phi(valuations_.size(), std::vector<double>(m));
  for (std::size_t v = 0; v < phi.size(); ++v) {
    const auto coords = valuations_.coords_of(v);
    const double f = valuations_.prob_of(v);
    for (std::size_t j = 0; j < m; ++j) phi[v][j] = coords[j] - inflow[v][j] / f;
  }
  return phi;
}

double DualFlow::min_entry() const {
  double lowest = 0.0;
  for (const Edges* edges : {&lambda_prime_, &lambda_star_}) {
    for (const auto& [edge, weight] : *edges) lowest = std::min(lowest, weight);
  }
  return lowest;
}

DualFlow build_lambda_prime(const AuctionSetting& setting, const std::vector<double>& maxvec) {
  DualFlow flow(setting, maxvec);
  flow.build_lambda_prime();
  return flow;
}

DualFlow build_lambda_star(const AuctionSetting& setting, const std::vector<double>& maxvec) {
  DualFlow flow(setting, maxvec);
  flow.build_lambda_star();
  return flow;
}

DualFlow build_dual_flow(const AuctionSetting& setting, const std::vector<double>& maxvec) {
  DualFlow flow(setting, maxvec);
  flow.build_lambda_prime();
  flow.build_lambda_star();
  return flow;
}

namespace {

struct Bounds {
  double flow_bound = 0.0;
  double bound = 0.0;
};

Bounds evaluate_bounds(const DualFlow& flow, const std::vector<IronedTable>& ironed,
                       const MechanismSolution& mechanism) {
  const auto phi = flow.phi_lambda();
  const ProductSpace& space = flow.valuations();
  Bounds out;
  for (std::size_t v = 0; v < space.size(); ++v) {
    const auto coords = space.coords_of(v);
    const auto digits = space.digits_of(v);
    const double f = space.prob_of(v);
    for (std::size_t j = 0; j < coords.size(); ++j) {
      const double region_value = flow.region(v) == j
                                      ? std::max(ironed[j].phi_tilde[digits[j]], 0.0)
                                      : coords[j];
      for (const auto& alloc : mechanism.interim_allocation) {
        out.flow_bound += f * alloc[v][j] * phi[v][j];
        out.bound += f * alloc[v][j] * region_value;
      }
    }
  }
  return out;
}

}  // namespace

DualCertificateCheck verify_dual_certificate(const AuctionSetting& setting, int n, int n_prime,
                                             const std::vector<double>& maxvec,
                                             const MechanismSolution* mechanism, double tolerance) {
  if (n_prime < 1) fail(ErrorCode::kInvalidSetting, "n_prime must be positive");
  std::optional<MechanismSolution> solved;
  if (!mechanism) {
    solved = optimal_revenue(setting, n);
    mechanism = &*solved;
  }
  const DualFlow flow = build_dual_flow(setting, maxvec);
  std::vector<IronedTable> ironed;
  for (const auto& item : setting.items()) ironed.push_back(iron(item));

  DualCertificateCheck out;
  for (double r : flow.flow_residuals()) out.flow_residual_max = std::max(out.flow_residual_max, std::abs(r));
  const auto phi = flow.phi_lambda();
  for (std::size_t v = 0; v < phi.size(); ++v) {
    for (std::size_t j = 0; j < phi[v].size(); ++j) {
      out.phi_match_max = std::max(out.phi_match_max, std::abs(phi[v][j] - flow.simplified_phi()[v][j]));
    }
  }
  out.min_entry = flow.min_entry();
  out.revenue = mechanism->revenue;
  const Bounds bounds = evaluate_bounds(flow, ironed, *mechanism);
  out.flow_bound = bounds.flow_bound;
  out.bound = bounds.bound;
  out.bound_holds = out.revenue <= out.bound + tolerance;
  return out;
}

AveragedCertificate verify_dual_certificate_averaged(const AuctionSetting& setting, int n,
                                                     int n_prime,
                                                     const MechanismSolution* mechanism,
                                                     double tolerance) {
  std::optional<MechanismSolution> solved;
  if (!mechanism) {
    solved = optimal_revenue(setting, n);
    mechanism = &*solved;
  }
  std::vector<IronedTable> ironed;
  for (const auto& item : setting.items()) ironed.push_back(iron(item));
  const ProductSpace joint = max_vector_distribution(setting, n_prime - 1).joint(setting.caps());

  AveragedCertificate out;
  out.revenue = mechanism->revenue;
  joint.for_each([&](std::size_t, std::span<const double> coords, double prob) {
    const DualFlow flow = build_dual_flow(setting, std::vector<double>(coords.begin(), coords.end()));
    for (double r : flow.flow_residuals()) out.worst_flow_residual = std::max(out.worst_flow_residual, std::abs(r));
    const auto phi = flow.phi_lambda();
    for (std::size_t v = 0; v < phi.size(); ++v) {
      for (std::size_t j = 0; j < phi[v].size(); ++j) {
        out.worst_phi_match = std::max(out.worst_phi_match, std::abs(phi[v][j] - flow.simplified_phi()[v][j]));
      }
    }
    out.averaged_bound += prob * evaluate_bounds(flow, ironed, *mechanism).bound;
  });
  out.iu = iu(setting, n, n_prime);
  out.revenue_le_bound = out.revenue <= out.averaged_bound + tolerance;
  out.bound_le_iu = out.averaged_bound <= out.iu + tolerance;
  return out;
}

}  // namespace ecomp
