#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gridrl/errors.hpp"

// Digital twin of the battery energy storage system: a first-order Thevenin
// equivalent circuit (OCV source + series resistance + one RC polarization
// branch), a lumped thermal node, and a separable calendar+cycling capacity
// fade model. All state transitions are pure functions of (state, params).

namespace gridrl {

struct AgingParams {
  double k_cal = 2.4e-6;          // calendar fade rate [1/h] at reference conditions
  double k_cyc = 1.6e-4;          // cycling fade per unit of throughput/C_N
  double theta_t = 0.05;          // exponential temperature stress [1/K]
  double t_ref_c = 25.0;          // reference temperature [degC]
  double soc_stress_slope = 0.5;  // linear SoC stress around 0.5
};

struct BatteryParams {
  // Pack sizing: 350 V nominal, 21 kWh -> 60 Ah.
  double nominal_capacity_ah = 60.0;
  double nominal_voltage_v = 350.0;
  double energy_capacity_kwh = 21.0;

  // Open-circuit voltage map, (soc, volt) pairs, strictly increasing in both.
  std::vector<std::pair<double, double>> ocv_table = {
      {0.0, 300.0}, {0.1, 330.0}, {0.25, 342.0}, {0.5, 352.0},
      {0.75, 366.0}, {0.9, 382.0}, {1.0, 400.0}};

  double r0_ohm = 0.1;      // series resistance
  double r1_ohm = 0.02;     // RC branch resistance
  double c1_farad = 5000.0; // RC branch capacitance
  double r_th = 4.0;        // thermal resistance [K/W]
  double c_th = 20000.0;    // heat capacity [J/K]

  double p_charge_max_w = 10000.0;     // > 0
  double p_discharge_max_w = -10000.0; // < 0

  double soc_min = 0.1;
  double soc_max = 0.9;
  double soh_eol = 0.8;

  AgingParams aging;

  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("battery: " + msg); };
    if (!(nominal_capacity_ah > 0.0)) fail("nominal capacity must be > 0");
    if (!(nominal_voltage_v > 0.0)) fail("nominal voltage must be > 0");
    if (ocv_table.size() < 2) fail("ocv_table needs at least two points");
    if (std::abs(ocv_table.front().first) > 1e-12 || std::abs(ocv_table.back().first - 1.0) > 1e-12)
      fail("ocv_table must span soc 0 to 1");
    for (std::size_t k = 1; k < ocv_table.size(); ++k) {
      if (!(ocv_table[k].first > ocv_table[k - 1].first)) fail("ocv_table soc not strictly increasing");
      if (!(ocv_table[k].second > ocv_table[k - 1].second)) fail("ocv_table voltage not strictly increasing");
    }
    if (!(ocv_table.front().second > 0.0)) fail("ocv must be positive");
    if (!(r0_ohm >= 0.0)) fail("r0 must be >= 0");
    if (!(r1_ohm > 0.0 && c1_farad > 0.0)) fail("r1 and c1 must be > 0");
    if (!(r_th > 0.0 && c_th > 0.0)) fail("r_th and c_th must be > 0");
    if (!(p_discharge_max_w < 0.0 && p_charge_max_w > 0.0)) fail("need p_dch < 0 < p_ch");
    if (!(0.0 <= soc_min && soc_min < soc_max && soc_max <= 1.0)) fail("need 0 <= soc_min < soc_max <= 1");
    if (!(soh_eol > 0.0 && soh_eol < 1.0)) fail("soh_eol must lie in (0,1)");
    if (aging.k_cal < 0.0 || aging.k_cyc < 0.0) fail("aging rates must be >= 0");
  }
};

struct BatteryState {
  double soc = 0.5;           // sigma, fraction of current capacity
  double temp_c = 25.0;       // internal temperature
  double soh = 1.0;           // rho = C_t / C_N
  double capacity_ah = 60.0;  // C_t = soh * C_N
  double v_rc = 0.0;          // polarization voltage of the RC branch
  double throughput_ah = 0.0; // cumulative |charge| moved
};

inline BatteryState initial_battery_state(const BatteryParams& params, double soc,
                                          double ambient_c, double soh = 1.0) {
  BatteryState s;
  s.soc = soc;
  s.temp_c = ambient_c;
  s.soh = soh;
  s.capacity_ah = soh * params.nominal_capacity_ah;
  s.v_rc = 0.0;
  s.throughput_ah = 0.0;
  return s;
}

// Piecewise-linear open-circuit voltage lookup.
inline double ocv(double soc, const BatteryParams& params) {
  if (!(soc >= 0.0 && soc <= 1.0))
    throw std::domain_error("ocv: soc " + std::to_string(soc) + " outside [0,1]");
  const auto& tab = params.ocv_table;
  if (soc <= tab.front().first) return tab.front().second;
  if (soc >= tab.back().first) return tab.back().second;
  std::size_t hi = 1;
  while (tab[hi].first < soc) ++hi;
  const auto& a = tab[hi - 1];
  const auto& b = tab[hi];
  const double w = (soc - a.first) / (b.first - a.first);
  return a.second + w * (b.second - a.second);
}

// Terminal voltage seen by the power converter before the ohmic drop.
inline double terminal_voltage(const BatteryState& state, const BatteryParams& params) {
  return ocv(state.soc, params) + state.v_rc;
}

// Solves the terminal power balance P = (ocv + v_rc + i*r0) * i for the
// current, taking the real root with smaller |i|. Sign convention: i > 0
// charges. The expanded form 2P / (V + sqrt(V^2 + 4*r0*P)) is stable for
// r0 -> 0 and reduces to P/V there.
inline double power_to_current(const BatteryState& state, const BatteryParams& params,
                               double p_batt_w) {
  const double v = terminal_voltage(state, params);
  const double disc = v * v + 4.0 * params.r0_ohm * p_batt_w;
  if (disc < 0.0)
    throw InfeasiblePowerError("power_to_current: requested " + std::to_string(p_batt_w) +
                               " W exceeds deliverable maximum " +
                               std::to_string(-v * v / (4.0 * params.r0_ohm)) + " W");
  const double denom = v + std::sqrt(disc);
  if (!(denom > 0.0))
    throw InfeasiblePowerError("power_to_current: non-positive terminal voltage");
  return 2.0 * p_batt_w / denom;
}

// Power interval admissible at the current state: the intersection of the
// converter rating with the SoC-headroom constraint evaluated at the
// step-start voltage.
inline std::pair<double, double> feasible_power_bounds(const BatteryState& state,
                                                       const BatteryParams& params,
                                                       double dt_h) {
  const double v = terminal_voltage(state, params);
  const double per_soc = state.capacity_ah * v / dt_h;
  const double lo = std::max(params.p_discharge_max_w, (params.soc_min - state.soc) * per_soc);
  const double hi = std::min(params.p_charge_max_w, (params.soc_max - state.soc) * per_soc);
  return {lo, hi};
}

// Lumped thermal node, forward Euler: Joule heating on r0+r1 against Newton
// cooling toward ambient.
inline double thermal_step(const BatteryState& state, const BatteryParams& params,
                           double ambient_c, double current_a, double dt_h) {
  const double dt_s = dt_h * 3600.0;
  const double heat_w = current_a * current_a * (params.r0_ohm + params.r1_ohm);
  const double cool_w = (state.temp_c - ambient_c) / params.r_th;
  return state.temp_c + dt_s / params.c_th * (heat_w - cool_w);
}

// SoH decrement over one step: calendar fade with temperature and SoC stress
// plus throughput-proportional cycling fade. Never positive.
inline double aging_step(const BatteryState& state, const BatteryParams& params,
                         double current_a, double dt_h) {
  const AgingParams& a = params.aging;
  const double g_t = std::exp(a.theta_t * (state.temp_c - a.t_ref_c));
  const double g_soc = 1.0 + a.soc_stress_slope * (state.soc - 0.5);
  const double rate = a.k_cal * g_t * g_soc + a.k_cyc * std::abs(current_a) * g_t / params.nominal_capacity_ah;
  return -std::max(0.0, rate) * dt_h;
}

struct BatteryStepResult {
  BatteryState state;
  double current_a = 0.0;
};

// Advances the twin by one decision step. The caller is expected to have
// clipped p_batt_w into feasible_power_bounds; the current is additionally
// trimmed to the SoC window so the post-step SoC never leaves
// [soc_min, soc_max] through the quadratic V*i vs P discrepancy.
inline BatteryStepResult step(const BatteryState& state, const BatteryParams& params,
                              double ambient_c, double p_batt_w, double dt_h) {
  double i = power_to_current(state, params, p_batt_w);

  const double per_soc = state.capacity_ah / dt_h;
  const double lo_i = (params.soc_min - state.soc) * per_soc;
  const double hi_i = (params.soc_max - state.soc) * per_soc;
  if (i > 0.0 && i > hi_i) i = std::max(hi_i, 0.0);
  if (i < 0.0 && i < lo_i) i = std::min(lo_i, 0.0);

  BatteryState next = state;
  next.soc = state.soc + i * dt_h / state.capacity_ah;

  const double decay = std::exp(-dt_h * 3600.0 / (params.r1_ohm * params.c1_farad));
  next.v_rc = state.v_rc * decay + i * params.r1_ohm * (1.0 - decay);

  next.temp_c = thermal_step(state, params, ambient_c, i, dt_h);
  next.soh = std::max(0.0, state.soh + aging_step(state, params, i, dt_h));
  next.capacity_ah = next.soh * params.nominal_capacity_ah;
  next.throughput_ah = state.throughput_ah + std::abs(i) * dt_h;
  return {next, i};
}

}  // namespace gridrl
