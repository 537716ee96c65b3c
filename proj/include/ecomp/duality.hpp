#pragma once

// Dual flow certificate for a fixed ghost max vector M: a non-negative flow
// on one bidder's valuations whose virtual values reduce to v_j outside
// region j and to the restricted ironed virtual value inside it.

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ecomp/dist_core.hpp"
#include "ecomp/lp_oracle.hpp"

namespace ecomp {

class DualFlow {
 public:
  /// Target index standing for the dummy valuation.
  static constexpr std::size_t kEmpty = std::numeric_limits<std::size_t>::max();
  using Edges = std::map<std::pair<std::size_t, std::size_t>, double>;

  DualFlow(const AuctionSetting& setting, std::vector<double> maxvec);

  const ProductSpace& valuations() const { return valuations_; }
  const std::vector<double>& maxvec() const { return maxvec_; }
  std::optional<std::size_t> region(std::size_t v) const { return region_[v]; }

  const Edges& lambda_prime() const { return lambda_prime_; }
  const Edges& lambda_star() const { return lambda_star_; }
  /// lambda' + lambda* on one edge.
  double lambda(std::size_t from, std::size_t to) const;

  /// f(v) - outflow(v) + inflow(v), per valuation.
  std::vector<double> flow_residuals() const;
  /// Virtual values induced by the flow, indexed [v][j].
  std::vector<std::vector<double>> phi_lambda() const;
  /// v_j outside region j and the restricted ironed value inside, [v][j].
  const std::vector<std::vector<double>>& simplified_phi() const { return simplified_phi_; }
  double min_entry() const;

  void build_lambda_prime();
  void build_lambda_star();

 private:
  AuctionSetting setting_;
  std::vector<double> maxvec_;
  ProductSpace valuations_;
  std::vector<std::optional<std::size_t>> region_;
  Edges lambda_prime_;
  Edges lambda_star_;
  std::vector<std::vector<double>> simplified_phi_;
};

DualFlow build_lambda_prime(const AuctionSetting& setting, const std::vector<double>& maxvec);
DualFlow build_lambda_star(const AuctionSetting& setting, const std::vector<double>& maxvec);
DualFlow build_dual_flow(const AuctionSetting& setting, const std::vector<double>& maxvec);

struct DualCertificateCheck {
  double flow_residual_max = 0.0;
  double phi_match_max = 0.0;
  double min_entry = 0.0;
  double revenue = 0.0;
  double flow_bound = 0.0;  // sum f pi Phi^Lambda
  double bound = 0.0;       // sum f pi (v_j outside, ironed+ inside)
  bool bound_holds = false;
};

/// Uses `mechanism` when given, otherwise solves the LP for n bidders.
DualCertificateCheck verify_dual_certificate(const AuctionSetting& setting, int n, int n_prime,
                                             const std::vector<double>& maxvec,
                                             const MechanismSolution* mechanism = nullptr,
                                             double tolerance = 1e-6);

struct AveragedCertificate {
  double revenue = 0.0;
  double averaged_bound = 0.0;  // sum over M of f*(M) times the per-M bound
  double iu = 0.0;              // iu(n, n')
  bool revenue_le_bound = false;
  bool bound_le_iu = false;
  double worst_flow_residual = 0.0;
  double worst_phi_match = 0.0;
};

AveragedCertificate verify_dual_certificate_averaged(const AuctionSetting& setting, int n,
                                                     int n_prime,
                                                     const MechanismSolution* mechanism = nullptr,
                                                     double tolerance = 1e-6);

}  // namespace ecomp
