#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridrl/env.hpp"
#include "gridrl/rng.hpp"
#include "gridrl/series.hpp"

// Rule-based controllers and the policy interface shared by evaluation and
// training.

namespace gridrl {

class Policy {
public:
  virtual ~Policy() = default;
  virtual double act(const Observation& obs) const = 0;
  virtual double act_stochastic(const Observation& obs, Rng&) const { return act(obs); }
};

// X-Y strategy: a constant fraction of the net power goes to the battery.
class ConstantPolicy final : public Policy {
public:
  explicit ConstantPolicy(double action) : action_(action) {}
  double act(const Observation&) const override { return action_; }
  double action() const { return action_; }

private:
  double action_;
};

inline ConstantPolicy xy_policy(double x_percent) {
  if (!(x_percent >= 0.0 && x_percent <= 100.0))
    throw std::domain_error("xy_policy: X must lie in [0,100], got " + std::to_string(x_percent));
  return ConstantPolicy(x_percent / 100.0);
}

inline ConstantPolicy only_grid_policy() { return xy_policy(0.0); }
inline ConstantPolicy battery_first_policy() { return xy_policy(100.0); }

// Training-condition ablations. The degraded baselines are realized as
// bundle transformations fed to the standard learner: temperature pinned to
// a constant, and (for the plain variant) each price series replaced by its
// hour-of-year average across the training years.
inline ExogenousBundle rl_base_plus_bundle(const ExogenousBundle& bundle, double fixed_temp_c) {
  ExogenousBundle out = bundle;
  for (double& k : out.ambient_c) k = fixed_temp_c;
  return out;
}

inline ExogenousBundle rl_base_bundle(const ExogenousBundle& bundle, double fixed_temp_c) {
  ExogenousBundle out = rl_base_plus_bundle(bundle, fixed_temp_c);
  auto average_by_hour = [&](const std::vector<double>& series) {
    std::vector<double> sum(kHoursPerYear, 0.0);
    std::vector<std::size_t> count(kHoursPerYear, 0);
    for (std::size_t h = 0; h < series.size(); ++h) {
      const std::size_t bucket = (bundle.start_hour_of_year + h) % kHoursPerYear;
      sum[bucket] += series[h];
      ++count[bucket];
    }
    std::vector<double> out_series(series.size());
    for (std::size_t h = 0; h < series.size(); ++h) {
      const std::size_t bucket = (bundle.start_hour_of_year + h) % kHoursPerYear;
      out_series[h] = sum[bucket] / static_cast<double>(count[bucket]);
    }
    return out_series;
  };
  out.price_buy_eur_kwh = average_by_hour(bundle.price_buy_eur_kwh);
  out.price_sell_eur_kwh = average_by_hour(bundle.price_sell_eur_kwh);
  return out;
}

// Rolls one full episode with a deterministic policy. The environment must
// be reset by the caller (pinned or random) just before.
inline Trajectory run_episode(Environment& env, const Policy& policy, Observation obs) {
  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(env.config().horizon_steps));
  while (!env.done()) {
    TransitionRecord rec;
    rec.observation = obs;
    rec.action = policy.act(obs);
    StepOutcome out = env.step(rec.action);
    rec.reward = out.reward;
    rec.info = out.info;
    traj.push_back(rec);
    obs = out.observation;
  }
  return traj;
}

inline Trajectory run_episode(Environment& env, const Policy& policy,
                              std::size_t profile_index, std::size_t block_index = 0) {
  return run_episode(env, policy, env.reset(profile_index, block_index));
}

}  // namespace gridrl
