#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

// Dispatch arithmetic and reward algebra of the microgrid: action split of
// the net power, feasibility clipping, and the trading / degradation /
// clipping reward components. Everything here is a stateless pure function.

namespace gridrl {

struct PriceQuote {
  double buy_eur_kwh = 0.0;  // > 0
  double sell_eur_kwh = 0.0; // > 0 and < buy
};

struct Dispatch {
  double a_requested = 0.0;
  double a_effective = 0.0;
  double p_net_w = 0.0;
  double p_batt_w = 0.0;
  double p_grid_w = 0.0;
  double clip_magnitude_w = 0.0; // |requested battery power - actuated|
};

struct RewardBreakdown {
  double trading_eur = 0.0;
  double degradation_eur = 0.0; // <= 0
  double clip_penalty_w = 0.0;  // <= 0, kept in watts; lambda absorbs the unit
  double total = 0.0;           // trading + degradation + lambda * clip
};

inline double net_power(double p_generation_w, double p_demand_w) {
  if (!(p_generation_w >= 0.0) || !(p_demand_w >= 0.0))
    throw std::domain_error("net_power: generation and demand must be >= 0");
  return p_generation_w - p_demand_w;
}

// Splits net power by the action and clamps the battery share into the
// feasible interval. P_B + P_E = P_N holds bit-exactly: when the naive sum
// is one ulp off, the battery side is recomputed from the grid side (which
// may leave P_B a sub-ulp outside the interval; the twin trims the current
// against the SoC window regardless).
inline Dispatch dispatch(double action, double p_net_w, std::pair<double, double> bounds_w) {
  if (!(action >= 0.0 && action <= 1.0))
    throw std::domain_error("dispatch: action " + std::to_string(action) + " outside [0,1]");
  Dispatch d;
  d.a_requested = action;
  d.p_net_w = p_net_w;
  const double raw = action * p_net_w;
  const double clamped = std::clamp(raw, bounds_w.first, bounds_w.second);
  d.clip_magnitude_w = std::abs(raw - clamped);
  d.p_batt_w = clamped;
  d.p_grid_w = p_net_w - d.p_batt_w;
  if (d.p_batt_w + d.p_grid_w != p_net_w) d.p_batt_w = p_net_w - d.p_grid_w;
  d.a_effective = (p_net_w != 0.0) ? std::clamp(d.p_batt_w / p_net_w, 0.0, 1.0) : action;
  return d;
}

// Money exchanged with the main grid over the step: sold surplus at p_sell,
// bought deficit at p_buy. Positive when selling.
inline double reward_trading(double p_grid_w, const PriceQuote& quote, double dt_h) {
  if (!(dt_h > 0.0)) throw std::domain_error("reward_trading: dt must be > 0");
  const double p_kw = p_grid_w / 1000.0;
  return (quote.sell_eur_kwh * std::max(0.0, p_kw) + quote.buy_eur_kwh * std::min(0.0, p_kw)) * dt_h;
}

// Pro-rata replacement cost of the SoH consumed during the step.
inline double reward_degradation(double soh_prev, double soh_curr, double soh_eol,
                                 double replacement_cost_eur) {
  if (!(soh_eol > 0.0 && soh_eol < 1.0))
    throw std::domain_error("reward_degradation: soh_eol must lie in (0,1)");
  if (!(replacement_cost_eur >= 0.0))
    throw std::domain_error("reward_degradation: replacement cost must be >= 0");
  if (soh_curr > soh_prev)
    throw std::domain_error("reward_degradation: SoH cannot rise");
  return (soh_curr - soh_prev) / (1.0 - soh_eol) * replacement_cost_eur;
}

// Penalty for requesting a battery power outside the SoC-headroom constraint;
// zero when a*P_N is admissible. Expressed in watts.
inline double reward_clip(double action, double p_net_w, double soc, double soc_min,
                          double soc_max, double capacity_ah, double v_terminal,
                          double dt_h) {
  const double per_soc = capacity_ah * v_terminal / dt_h;
  const double requested = action * p_net_w;
  const double over_charge = requested + (soc - soc_max) * per_soc;
  const double over_discharge = (soc_min - soc) * per_soc - requested;
  return -std::max({0.0, over_charge, over_discharge});
}

inline RewardBreakdown combine_rewards(double trading_eur, double degradation_eur,
                                       double clip_penalty_w, double lambda) {
  RewardBreakdown r;
  r.trading_eur = trading_eur;
  r.degradation_eur = degradation_eur;
  r.clip_penalty_w = clip_penalty_w;
  r.total = trading_eur + degradation_eur + lambda * clip_penalty_w;
  return r;
}

}  // namespace gridrl
