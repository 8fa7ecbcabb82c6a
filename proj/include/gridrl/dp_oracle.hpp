#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridrl/battery.hpp"
#include "gridrl/env.hpp"
#include "gridrl/microgrid.hpp"
#include "gridrl/series.hpp"

// Dynamic-programming oracle for acceptance testing: exact backward
// induction of max sum(r_trad + r_deg) over a deterministic toy scenario on
// a discretized SoC grid. The toy battery must have r0 = 0 and a negligible
// RC branch so the twin's dynamics coincide with the oracle's model
// (i = P/V(soc), soc' = soc + i*dt/C), and aging either disabled or the
// state-independent linear-in-|i| form (k_cal = 0, theta_t = 0, slope = 0).

namespace gridrl {

struct ToyScenario {
  ExogenousBundle bundle;  // deterministic series, single demand profile
  BatteryParams battery;
  MdpConfig mdp;
};

struct DpResult {
  double optimal_return = 0.0;
  std::vector<double> soc_grid;
  std::vector<std::vector<double>> value;       // (horizon+1) x n_soc
  std::vector<std::vector<double>> best_action; // horizon x n_soc
};

namespace dp_detail {

inline double interp_value(const std::vector<double>& grid, const std::vector<double>& values,
                           double soc) {
  if (soc <= grid.front()) return values.front();
  if (soc >= grid.back()) return values.back();
  const double pos = (soc - grid.front()) / (grid[1] - grid[0]);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo >= grid.size() - 1) lo = grid.size() - 2;
  const double frac = (soc - grid[lo]) / (grid[lo + 1] - grid[lo]);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

// One oracle-model transition from a given SoC; mirrors Environment::step
// for the restricted battery (no r0, no RC, constant capacity).
struct ToyTransition {
  double soc_next = 0.0;
  double reward = 0.0; // r_trad + r_deg
};

inline ToyTransition toy_step(const ToyScenario& toy, double soc, double action, std::size_t t) {
  const BatteryParams& bp = toy.battery;
  const double dt = toy.mdp.dt_hours;
  const double capacity = toy.mdp.initial_soh * bp.nominal_capacity_ah;
  const double v = ocv(soc, bp);

  const double p_net = toy.bundle.generation_w[t] - toy.bundle.demand_profiles_w[0][t];
  const double per_soc = capacity * v / dt;
  const double lo = std::max(bp.p_discharge_max_w, (bp.soc_min - soc) * per_soc);
  const double hi = std::min(bp.p_charge_max_w, (bp.soc_max - soc) * per_soc);
  const double p_batt = std::clamp(action * p_net, lo, hi);
  const double p_grid = p_net - p_batt;
  const double i = p_batt / v;

  ToyTransition tr;
  tr.soc_next = soc + i * dt / capacity;
  const PriceQuote quote{toy.bundle.price_buy_eur_kwh[t], toy.bundle.price_sell_eur_kwh[t]};
  tr.reward = reward_trading(p_grid, quote, dt);
  const double drho = -bp.aging.k_cyc * std::abs(i) / bp.nominal_capacity_ah * dt;
  tr.reward += drho / (1.0 - bp.soh_eol) * toy.mdp.replacement_cost_eur;
  return tr;
}

}  // namespace dp_detail

inline void validate_toy_scenario(const ToyScenario& toy) {
  auto fail = [](const std::string& msg) { throw ConfigError("dp_oracle: " + msg); };
  toy.bundle.validate();
  toy.battery.validate();
  toy.mdp.validate();
  if (toy.bundle.n_profiles() != 1) fail("toy scenario needs exactly one demand profile");
  if (static_cast<std::size_t>(toy.mdp.horizon_steps) > toy.bundle.length())
    fail("horizon exceeds series length");
  if (toy.battery.r0_ohm != 0.0) fail("toy battery must have r0 = 0");
  if (toy.battery.r1_ohm > 1e-6) fail("toy battery RC branch must be negligible (r1 <= 1e-6)");
  const AgingParams& a = toy.battery.aging;
  if (a.k_cal != 0.0 || a.theta_t != 0.0 || a.soc_stress_slope != 0.0)
    fail("toy aging must be zero or linear in |i| (k_cal = theta_t = slope = 0)");
}

// Backward induction over (step, soc). The grid spans [0,1]; soc_min and
// soc_max must fall exactly on grid nodes or the discretization cannot
// represent the feasibility boundary.
inline DpResult dp_oracle(const ToyScenario& toy, std::size_t soc_levels = 51,
                          std::size_t action_levels = 21) {
  validate_toy_scenario(toy);
  if (soc_levels < 2 || action_levels < 2)
    throw ConfigError("dp_oracle: need at least two SoC levels and two actions");

  const double grid_step = 1.0 / static_cast<double>(soc_levels - 1);
  auto on_grid = [&](double x) {
    const double r = x / grid_step;
    return std::abs(r - std::round(r)) < 1e-9;
  };
  if (!on_grid(toy.battery.soc_min) || !on_grid(toy.battery.soc_max))
    throw ConfigError("dp_oracle: soc grid with " + std::to_string(soc_levels) +
                      " levels cannot represent soc_min/soc_max exactly");

  DpResult res;
  res.soc_grid.resize(soc_levels);
  for (std::size_t j = 0; j < soc_levels; ++j)
    res.soc_grid[j] = static_cast<double>(j) * grid_step;

  const std::size_t horizon = static_cast<std::size_t>(toy.mdp.horizon_steps);
  res.value.assign(horizon + 1, std::vector<double>(soc_levels, 0.0));
  res.best_action.assign(horizon, std::vector<double>(soc_levels, 0.0));

  std::vector<double> actions(action_levels);
  for (std::size_t k = 0; k < action_levels; ++k)
    actions[k] = static_cast<double>(k) / static_cast<double>(action_levels - 1);

  for (std::size_t t = horizon; t-- > 0;) {
    for (std::size_t j = 0; j < soc_levels; ++j) {
      double best = -std::numeric_limits<double>::infinity();
      double best_a = 0.0;
      for (double a : actions) {
        const auto tr = dp_detail::toy_step(toy, res.soc_grid[j], a, t);
        const double q =
            tr.reward + dp_detail::interp_value(res.soc_grid, res.value[t + 1], tr.soc_next);
        if (q > best) {
          best = q;
          best_a = a;
        }
      }
      res.value[t][j] = best;
      res.best_action[t][j] = best_a;
    }
  }
  res.optimal_return = dp_detail::interp_value(res.soc_grid, res.value[0], toy.mdp.initial_soc);
  return res;
}

// Greedy one-step-lookahead playback against the oracle's value function;
// used to simulate the DP policy in the continuous environment.
inline double dp_greedy_action(const ToyScenario& toy, const DpResult& res, std::size_t t,
                               double soc, std::size_t action_levels = 21) {
  double best = -std::numeric_limits<double>::infinity();
  double best_a = 0.0;
  for (std::size_t k = 0; k < action_levels; ++k) {
    const double a = static_cast<double>(k) / static_cast<double>(action_levels - 1);
    const auto tr = dp_detail::toy_step(toy, soc, a, t);
    const double q = tr.reward + dp_detail::interp_value(res.soc_grid, res.value[t + 1], tr.soc_next);
    if (q > best) {
      best = q;
      best_a = a;
    }
  }
  return best_a;
}

}  // namespace gridrl
