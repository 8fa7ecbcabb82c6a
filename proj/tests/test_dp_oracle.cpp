#include "doctest.h"

#include <cmath>
#include <memory>

#include "gridrl/dp_oracle.hpp"
#include "gridrl/policies.hpp"
#include "toy_scenario.hpp"

using namespace gridrl;

namespace {

// Two-step scenario small enough to fill the SoC window in one hour, so the
// optimum is computable by exhaustive enumeration.
ToyScenario two_step_scenario() {
  ToyScenario toy = testing::make_toy_scenario();
  toy.battery.nominal_capacity_ah = 20.0;
  toy.mdp.horizon_steps = 2;
  toy.mdp.episode_stride = 2;
  toy.mdp.initial_soc = 0.1;

  ExogenousBundle& b = toy.bundle;
  b.generation_w.assign(2, 0.0);
  b.demand_profiles_w.assign(1, std::vector<double>(2, 0.0));
  b.price_buy_eur_kwh.assign(2, 0.0);
  b.price_sell_eur_kwh.assign(2, 0.0);
  b.ambient_c.assign(2, 25.0);

  b.generation_w[0] = 8000.0; // surplus hour: store, selling is cheap
  b.price_buy_eur_kwh[0] = 0.30;
  b.price_sell_eur_kwh[0] = 0.03;

  b.demand_profiles_w[0][1] = 8000.0; // deficit hour: buying is very expensive
  b.price_buy_eur_kwh[1] = 1.0;
  b.price_sell_eur_kwh[1] = 0.10;
  return toy;
}

double simulate_toy_in_env(const ToyScenario& toy, const Policy& policy) {
  auto bundle = std::make_shared<ExogenousBundle>(toy.bundle);
  Environment env(bundle, toy.battery, toy.mdp, 0);
  const Trajectory traj = run_episode(env, policy, 0);
  double total = 0.0;
  for (const auto& rec : traj) total += rec.reward.trading_eur + rec.reward.degradation_eur;
  return total;
}

}  // namespace

TEST_SUITE("dp-oracle") {

TEST_CASE("near-zero prices and zero aging give a near-zero optimum") {
  ToyScenario toy = testing::make_toy_scenario();
  for (double& p : toy.bundle.price_buy_eur_kwh) p = 2e-15;
  for (double& p : toy.bundle.price_sell_eur_kwh) p = 1e-15;
  const DpResult res = dp_oracle(toy);
  CHECK(std::abs(res.optimal_return) < 1e-9);
}

TEST_CASE("two-step optimum equals exhaustive enumeration") {
  const ToyScenario toy = two_step_scenario();

  double best = -1e300;
  for (int i = 0; i < 21; ++i) {
    for (int j = 0; j < 21; ++j) {
      const double a0 = i / 20.0;
      const double a1 = j / 20.0;
      const auto t0 = dp_detail::toy_step(toy, toy.mdp.initial_soc, a0, 0);
      const auto t1 = dp_detail::toy_step(toy, t0.soc_next, a1, 1);
      best = std::max(best, t0.reward + t1.reward);
    }
  }

  const DpResult res = dp_oracle(toy);
  CHECK(res.optimal_return == doctest::Approx(best).epsilon(1e-9));

  // hand value of the charge-then-discharge sequence:
  //   step 0: fill the window, 0.8*20*310 = 4960 W to the battery,
  //           sell the remaining 3040 W at 0.03 -> +0.0912
  //   step 1: drain the window, 0.8*20*390 = 6240 W from the battery,
  //           buy the remaining 1760 W at 1.0 -> -1.76
  CHECK(res.optimal_return == doctest::Approx(0.0912 - 1.76).epsilon(1e-9));
}

TEST_CASE("oracle dominates rule-based policies on the toy scenario") {
  const ToyScenario toy = testing::make_toy_scenario();
  const DpResult res = dp_oracle(toy);
  CHECK(res.optimal_return > 0.0);

  const double slack = 0.01 * std::abs(res.optimal_return);
  for (double x : {0.0, 20.0, 50.0, 80.0, 100.0}) {
    const double ret = simulate_toy_in_env(toy, xy_policy(x));
    CHECK(ret <= res.optimal_return + slack);
  }
}

TEST_CASE("greedy playback of the value function attains the optimum") {
  const ToyScenario toy = testing::make_toy_scenario();
  const DpResult res = dp_oracle(toy);

  auto bundle = std::make_shared<ExogenousBundle>(toy.bundle);
  Environment env(bundle, toy.battery, toy.mdp, 0);
  env.reset(0);
  double total = 0.0;
  std::size_t t = 0;
  while (!env.done()) {
    const double a = dp_greedy_action(toy, res, t, env.battery().soc);
    const StepOutcome out = env.step(a);
    total += out.reward.trading_eur + out.reward.degradation_eur;
    ++t;
  }
  CHECK(total == doctest::Approx(res.optimal_return).epsilon(5e-3));
  CHECK(total <= res.optimal_return + 0.01 * std::abs(res.optimal_return));
}

TEST_CASE("refining the discretization moves the optimum by less than 1%") {
  const ToyScenario toy = testing::make_toy_scenario();
  const DpResult coarse = dp_oracle(toy, 51, 21);
  const DpResult fine = dp_oracle(toy, 101, 41);
  CHECK(std::abs(fine.optimal_return - coarse.optimal_return) <
        0.01 * std::abs(coarse.optimal_return));
}

TEST_CASE("linear aging variant prices the throughput") {
  const ToyScenario plain = testing::make_toy_scenario(false);
  const ToyScenario aged = testing::make_toy_scenario(true);
  const DpResult r0 = dp_oracle(plain);
  const DpResult r1 = dp_oracle(aged);
  CHECK(r1.optimal_return < r0.optimal_return); // cycling now costs money
}

TEST_CASE("grid that cannot represent the soc window is rejected") {
  ToyScenario toy = testing::make_toy_scenario();
  CHECK_THROWS_AS(dp_oracle(toy, 50, 21), ConfigError); // 0.1 not on a 50-level grid
  CHECK_NOTHROW(dp_oracle(toy, 51, 21));
  CHECK_NOTHROW(dp_oracle(toy, 11, 5)); // 0.1 steps also represent 0.1/0.9
}

TEST_CASE("toy validation rejects non-simplified batteries") {
  ToyScenario toy = testing::make_toy_scenario();
  toy.battery.r0_ohm = 0.1;
  CHECK_THROWS_AS(dp_oracle(toy), ConfigError);

  ToyScenario toy2 = testing::make_toy_scenario();
  toy2.battery.aging.k_cal = 1e-6;
  CHECK_THROWS_AS(dp_oracle(toy2), ConfigError);
}

} // TEST_SUITE
