#include "doctest.h"

#include <cmath>

#include "gridrl/microgrid.hpp"
#include "gridrl/rng.hpp"

using namespace gridrl;

TEST_SUITE("microgrid") {

TEST_CASE("net_power subtraction and domain") {
  CHECK(net_power(3000.0, 1000.0) == 2000.0);
  CHECK(net_power(0.0, 1500.0) == -1500.0);
  CHECK(net_power(1234.5, 1234.5) == 0.0);
  CHECK_THROWS_AS(net_power(-1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(net_power(0.0, -1.0), std::domain_error);
}

TEST_CASE("dispatch splits and clamps") {
  const std::pair<double, double> wide{-1e9, 1e9};

  Dispatch d = dispatch(0.3, -2000.0, wide);
  CHECK(d.p_batt_w == doctest::Approx(-600.0));
  CHECK(d.p_grid_w == doctest::Approx(-1400.0));
  CHECK(d.p_batt_w + d.p_grid_w == -2000.0);
  CHECK(d.clip_magnitude_w == 0.0);

  d = dispatch(1.0, 5000.0, {-1e9, 0.0});
  CHECK(d.p_batt_w == 0.0);
  CHECK(d.a_effective == 0.0);
  CHECK(d.clip_magnitude_w == 5000.0);
  CHECK(d.p_grid_w == 5000.0);

  d = dispatch(0.7, 0.0, wide);
  CHECK(d.p_batt_w == 0.0);
  CHECK(d.p_grid_w == 0.0);
  CHECK(d.a_effective == 0.7);
  CHECK(d.clip_magnitude_w == 0.0);

  CHECK_THROWS_AS(dispatch(1.5, 100.0, wide), std::domain_error);
  CHECK_THROWS_AS(dispatch(-0.1, 100.0, wide), std::domain_error);
}

TEST_CASE("dispatch conserves power bit-exactly") {
  Rng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const double p_net = rng.uniform(-9000.0, 9000.0);
    const double lo = rng.uniform(-8000.0, 0.0);
    const double hi = rng.uniform(0.0, 8000.0);
    const Dispatch d = dispatch(rng.uniform(), p_net, {lo, hi});
    CHECK(d.p_batt_w + d.p_grid_w == p_net); // bit-exact conservation
    // interval membership up to the sub-ulp conservation correction
    CHECK(d.p_batt_w >= lo - 1e-9);
    CHECK(d.p_batt_w <= hi + 1e-9);
    CHECK(d.a_effective >= 0.0);
    CHECK(d.a_effective <= 1.0);
  }
}

TEST_CASE("reward_trading direct evaluations") {
  const PriceQuote q{0.30, 0.10};
  CHECK(reward_trading(2000.0, q, 1.0) == doctest::Approx(0.20));
  CHECK(reward_trading(-3000.0, q, 1.0) == doctest::Approx(-0.90));
  CHECK(reward_trading(0.0, q, 1.0) == 0.0);
  // half-hour step halves the energy
  CHECK(reward_trading(2000.0, q, 0.5) == doctest::Approx(0.10));
  CHECK_THROWS_AS(reward_trading(100.0, q, 0.0), std::domain_error);
}

TEST_CASE("reward_trading sign follows the grid power") {
  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const double p_e = rng.uniform(-5000.0, 5000.0);
    const PriceQuote q{rng.uniform(0.2, 0.5), rng.uniform(0.01, 0.19)};
    const double r = reward_trading(p_e, q, 1.0);
    if (p_e > 0.0) CHECK(r > 0.0);
    if (p_e < 0.0) CHECK(r < 0.0);
    if (p_e == 0.0) CHECK(r == 0.0);
  }
}

TEST_CASE("reward_degradation pro-rata accounting") {
  CHECK(reward_degradation(1.0, 0.9998, 0.8, 3000.0) == doctest::Approx(-3.0));
  CHECK(reward_degradation(0.95, 0.95, 0.8, 3000.0) == 0.0);
  CHECK(reward_degradation(1.0, 0.8, 0.8, 3000.0) == doctest::Approx(-3000.0));
  CHECK_THROWS_AS(reward_degradation(0.9, 0.91, 0.8, 3000.0), std::domain_error);
  CHECK_THROWS_AS(reward_degradation(1.0, 0.9, 1.2, 3000.0), std::domain_error);
  CHECK_THROWS_AS(reward_degradation(1.0, 0.9, 0.8, -5.0), std::domain_error);
}

TEST_CASE("degradation telescopes over a trajectory") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const double eol = rng.uniform(0.5, 0.9);
    const double cost = rng.uniform(100.0, 10000.0);
    double rho = 1.0;
    double total = 0.0;
    const double rho_initial = rho;
    for (int k = 0; k < 50; ++k) {
      const double next = rho - rng.uniform(0.0, 1e-3);
      total += reward_degradation(rho, next, eol, cost);
      rho = next;
    }
    const double expected = (rho - rho_initial) / (1.0 - eol) * cost;
    CHECK(total == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("reward_clip matches the printed max-of-three expression") {
  // feasible request
  CHECK(reward_clip(0.5, 1000.0, 0.5, 0.1, 0.9, 60.0, 350.0, 1.0) == 0.0);
  // no charge headroom: sigma at sigma_max, full action on surplus
  CHECK(reward_clip(1.0, 5000.0, 0.9, 0.1, 0.9, 60.0, 350.0, 1.0) == doctest::Approx(-5000.0));
  // no discharge headroom: sigma at sigma_min, full action on deficit
  CHECK(reward_clip(1.0, -5000.0, 0.1, 0.1, 0.9, 60.0, 350.0, 1.0) == doctest::Approx(-5000.0));
}

TEST_CASE("penalty consistency with soc-headroom dispatch") {
  Rng rng(13);
  for (int k = 0; k < 2000; ++k) {
    const double soc = rng.uniform(0.1, 0.9);
    const double capacity = rng.uniform(20.0, 100.0);
    const double v = rng.uniform(300.0, 400.0);
    const double dt = 1.0;
    const double a = rng.uniform();
    const double p_net = rng.uniform(-20000.0, 20000.0);

    const double per_soc = capacity * v / dt;
    const std::pair<double, double> soc_bounds{(0.1 - soc) * per_soc, (0.9 - soc) * per_soc};
    const Dispatch d = dispatch(a, p_net, soc_bounds);
    const double penalty = reward_clip(a, p_net, soc, 0.1, 0.9, capacity, v, dt);

    CHECK((penalty == 0.0) == (d.clip_magnitude_w == 0.0));
    CHECK(penalty <= 0.0);
  }
}

TEST_CASE("total reward is affine in lambda with slope r_clip") {
  Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    const double trading = rng.uniform(-5.0, 5.0);
    const double degradation = -rng.uniform(0.0, 2.0);
    const double clip = -rng.uniform(0.0, 4000.0);
    const double l1 = rng.uniform(0.0, 1.0);
    const double l2 = rng.uniform(1.0, 2.0);
    const RewardBreakdown r1 = combine_rewards(trading, degradation, clip, l1);
    const RewardBreakdown r2 = combine_rewards(trading, degradation, clip, l2);
    CHECK(r2.total - r1.total == doctest::Approx((l2 - l1) * clip).epsilon(1e-12));
    CHECK(r1.total == doctest::Approx(trading + degradation + l1 * clip));
  }
}

} // TEST_SUITE
