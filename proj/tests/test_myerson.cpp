#include <doctest.h>

#include <algorithm>

#include "ecomp/lp_oracle.hpp"
#include "ecomp/myerson.hpp"
#include "ecomp/random_instances.hpp"
#include "fixtures.hpp"

using namespace ecomp;
using fixtures::close;

TEST_CASE("virtual values") {
  const auto d2 = virtual_values(fixtures::d2());
  CHECK(d2[0] == doctest::Approx(0.0));
  CHECK(d2[1] == doctest::Approx(2.0));
  const auto d3 = virtual_values(fixtures::d3());
  CHECK(d3[0] == doctest::Approx(10.0 / 3.0));
  CHECK(close(d3[1], 0.0, 1e-12));
  CHECK(d3[2] == doctest::Approx(10.0));
  CHECK(virtual_values(fixtures::point(7)) == std::vector<double>{7.0});
}

TEST_CASE("ironing") {
  const IronedTable d2 = iron(fixtures::d2());
  CHECK(d2.regular);
  CHECK(d2.phi_tilde[0] == doctest::Approx(0.0));
  CHECK(d2.phi_tilde[1] == doctest::Approx(2.0));

  const IronedTable d3 = iron(fixtures::d3());
  CHECK_FALSE(d3.regular);
  CHECK(close(d3.phi_tilde[0], 2.5, 1e-12));
  CHECK(close(d3.phi_tilde[1], 2.5, 1e-12));
  CHECK(close(d3.phi_tilde[2], 10.0, 1e-12));

  const IronedTable p = iron(fixtures::point(3));
  CHECK(p.regular);
  CHECK(p.phi_tilde == std::vector<double>{3.0});
}

TEST_CASE("ironing invariants on seeded items") {
  Rng rng(101);
  for (int t = 0; t < 300; ++t) {
    const ItemDistribution item = random_item(rng, 1, 6, 30);
    const IronedTable table = iron(item);
    const std::size_t k = item.size();
    CHECK(table.phi[k - 1] == item.max());
    double mean_phi = 0.0;
    double mean_tilde = 0.0;
    bool phi_monotone = true;
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(table.phi_tilde[i] <= item.value(i) + 1e-12);
      if (i + 1 < k) {
        CHECK(table.phi_tilde[i] <= table.phi_tilde[i + 1] + 1e-12);
        phi_monotone = phi_monotone && table.phi[i] <= table.phi[i + 1] + 1e-12;
      }
      mean_phi += item.prob(i) * table.phi[i];
      mean_tilde += item.prob(i) * table.phi_tilde[i];
    }
    CHECK(close(mean_phi, mean_tilde, 1e-12));
    CHECK(table.regular == phi_monotone);
    if (table.regular) {
      for (std::size_t i = 0; i < k; ++i) CHECK(close(table.phi[i], table.phi_tilde[i], 1e-12));
    }
  }
}

TEST_CASE("restricted ironing") {
  const ItemDistribution d3 = fixtures::d3();
  const RestrictedIroning full = iron_restricted(d3, 4);
  REQUIRE(full.phi.size() == 3);
  CHECK(close(full.at(0), 2.5, 1e-12));
  CHECK(close(full.at(1), 2.5, 1e-12));
  CHECK(close(full.at(2), 10.0, 1e-12));

  const RestrictedIroning top = iron_restricted(d3, 10);
  CHECK(top.floor_index == 2);
  CHECK(top.phi == std::vector<double>{10.0});

  const RestrictedIroning mid = iron_restricted(d3, 5);
  const auto phi = virtual_values(d3);
  const IronedTable table = iron(d3);
  double tail_r = 0.0;
  double tail_phi = 0.0;
  for (std::size_t i = 3; i-- > 1;) {
    tail_r += d3.prob(i) * mid.at(i);
    tail_phi += d3.prob(i) * phi[i];
    CHECK(tail_r >= tail_phi - 1e-12);
    CHECK(mid.at(i) <= table.phi_tilde[i] + 1e-12);
  }
  CHECK(close(tail_r, tail_phi, 1e-12));

  try {
    iron_restricted(d3, 6);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFloorNotInSupport);
  }
}

TEST_CASE("restricted ironing dominance on seeded items") {
  Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    const ItemDistribution item = random_item(rng, 1, 6, 30);
    const auto phi = virtual_values(item);
    const IronedTable table = iron(item);
    for (std::size_t floor = 0; floor < item.size(); ++floor) {
      const RestrictedIroning r = iron_restricted_at(item, floor);
      double tail_r = 0.0;
      double tail_phi = 0.0;
      for (std::size_t i = item.size(); i-- > floor;) {
        tail_r += item.prob(i) * r.at(i);
        tail_phi += item.prob(i) * phi[i];
        CHECK(tail_r >= tail_phi - 1e-12);
        CHECK(r.at(i) <= table.phi_tilde[i] + 1e-12);
      }
      CHECK(close(tail_r, tail_phi, 1e-12));
    }
  }
}

TEST_CASE("separate-sale revenue") {
  CHECK(srev_item(fixtures::d2(), 1) == doctest::Approx(1.0));
  CHECK(srev_item(fixtures::d2(), 2) == doctest::Approx(1.5));
  CHECK(srev_item(fixtures::d3(), 1) == doctest::Approx(4.0));
  CHECK(srev(fixtures::d2xd2(), 1) == doctest::Approx(2.0));
  CHECK(srev(fixtures::single(fixtures::d3()), 1) == doctest::Approx(4.0));
  CHECK(srev(AuctionSetting({fixtures::d2(), fixtures::d3()}), 1) == doctest::Approx(5.0));
}

TEST_CASE("single-bidder srev is the best posted price") {
  Rng rng(13);
  for (int t = 0; t < 500; ++t) {
    const ItemDistribution item = random_item(rng, 1, 6, 40);
    double best = 0.0;
    for (std::size_t i = 0; i < item.size(); ++i) best = std::max(best, item.value(i) * item.survival_at(i));
    CHECK(close(srev_item(item, 1), best, 1e-9));
  }
}

TEST_CASE("single-item srev matches the LP optimum") {
  Rng rng(19);
  for (int t = 0; t < 40; ++t) {
    const ItemDistribution item = random_item(rng, 1, 3, 10);
    for (int n = 1; n <= 2; ++n) {
      CHECK(close(srev_item(item, n), optimal_revenue(fixtures::single(item), n).revenue, 1e-6));
    }
  }
}
