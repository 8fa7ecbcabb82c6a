#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gridrl/battery.hpp"
#include "gridrl/errors.hpp"
#include "gridrl/microgrid.hpp"
#include "gridrl/rng.hpp"
#include "gridrl/series.hpp"

// The episodic dispatch MDP: one decision per hour, continuous action
// a in [0,1] splitting net power between battery and grid, reward =
// trading + degradation + lambda * clipping penalty.

namespace gridrl {

// How the demand/generation estimates in the observation are formed: the
// previous step's values (the default) or the true current ones. Estimates
// only ever enter the observation; dynamics and rewards always use the true
// current values.
enum class EstimateRule { Lag1, Current };

struct MdpConfig {
  double gamma = 0.99;
  int horizon_steps = static_cast<int>(kHoursPerYear);
  double dt_hours = 1.0;
  // weight on the clip penalty, absorbing EUR/W; 1e-4 here corresponds to a
  // weight of 0.1 on a kW-scale penalty
  double lambda_clip = 1e-4;
  double initial_soc = 0.5;
  double initial_soh = 1.0;
  double replacement_cost_eur = 3000.0;
  EstimateRule estimate_rule = EstimateRule::Lag1;
  // start offsets are multiples of this stride (one calendar year by default)
  int episode_stride = static_cast<int>(kHoursPerYear);

  void validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("mdp: " + msg); };
    if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0,1]");
    if (horizon_steps < 1) fail("horizon must be >= 1");
    if (!(dt_hours > 0.0)) fail("dt must be > 0");
    if (!(lambda_clip >= 0.0)) fail("lambda must be >= 0");
    if (!(initial_soc >= 0.0 && initial_soc <= 1.0)) fail("initial soc must lie in [0,1]");
    if (!(initial_soh > 0.0 && initial_soh <= 1.0)) fail("initial soh must lie in (0,1]");
    if (episode_stride < 1) fail("episode stride must be >= 1");
  }
};

// The 10-component state vector handed to policies.
struct Observation {
  double soc = 0.0;
  double battery_temp_c = 0.0;
  double demand_est_w = 0.0;
  double generation_est_w = 0.0;
  double price_buy = 0.0;
  double price_sell = 0.0;
  double cos_day = 1.0;
  double sin_day = 0.0;
  double cos_year = 1.0;
  double sin_year = 0.0;

  std::array<double, 10> as_array() const {
    return {soc, battery_temp_c, demand_est_w, generation_est_w, price_buy,
            price_sell, cos_day, sin_day, cos_year, sin_year};
  }
};

constexpr std::size_t kObservationDim = 10;

struct StepInfo {
  double p_net_w = 0.0;
  double p_batt_w = 0.0;
  double p_grid_w = 0.0;
  double p_demand_w = 0.0;
  double p_generation_w = 0.0;
  double a_requested = 0.0;
  double a_effective = 0.0;
  double clip_magnitude_w = 0.0;
  double current_a = 0.0;
  double soh = 1.0;
};

struct StepOutcome {
  Observation observation;
  RewardBreakdown reward;
  bool done = false;
  StepInfo info;
};

class Environment {
public:
  Environment(std::shared_ptr<const ExogenousBundle> bundle, BatteryParams battery,
              MdpConfig config, std::uint64_t seed = 0)
      : bundle_(std::move(bundle)), params_(std::move(battery)), config_(config), rng_(seed) {
    if (!bundle_) throw ConfigError("environment: null bundle");
    bundle_->validate();
    params_.validate();
    config_.validate();
    if (static_cast<std::size_t>(config_.horizon_steps) > bundle_->length())
      throw ConfigError("environment: horizon exceeds exogenous series length");
  }

  // Number of admissible episode start offsets (stride-aligned blocks).
  std::size_t n_start_blocks() const {
    const std::size_t stride = static_cast<std::size_t>(config_.episode_stride);
    const std::size_t horizon = static_cast<std::size_t>(config_.horizon_steps);
    std::size_t count = 0;
    for (std::size_t off = 0; off + horizon <= bundle_->length(); off += stride) ++count;
    return count;
  }

  // Uniformly draws a demand profile and a start block from the instance rng.
  Observation reset() {
    const std::size_t profile = static_cast<std::size_t>(rng_.uniform_index(bundle_->n_profiles()));
    const std::size_t block = static_cast<std::size_t>(rng_.uniform_index(n_start_blocks()));
    return reset(profile, block);
  }

  // Pinned reset used for evaluation.
  Observation reset(std::size_t profile_index, std::size_t block_index = 0) {
    if (profile_index >= bundle_->n_profiles())
      throw ConfigError("environment: profile index out of range");
    if (block_index >= n_start_blocks())
      throw ConfigError("environment: start block out of range");
    profile_ = profile_index;
    offset_ = block_index * static_cast<std::size_t>(config_.episode_stride);
    t_ = 0;
    battery_ = initial_battery_state(params_, config_.initial_soc,
                                     bundle_->ambient_c[offset_], config_.initial_soh);
    return build_observation(0);
  }

  bool done() const { return t_ >= config_.horizon_steps; }
  int current_step() const { return t_; }
  std::size_t profile_index() const { return profile_; }
  const BatteryState& battery() const { return battery_; }
  const BatteryParams& battery_params() const { return params_; }
  const MdpConfig& config() const { return config_; }
  const ExogenousBundle& bundle() const { return *bundle_; }

  StepOutcome step(double action) {
    if (done()) throw std::logic_error("environment: step after episode end");

    const std::size_t g = offset_ + static_cast<std::size_t>(t_);
    const double p_gen = bundle_->generation_w[g];
    const double p_dem = bundle_->demand_profiles_w[profile_][g];
    const double p_net = net_power(p_gen, p_dem);
    const PriceQuote quote{bundle_->price_buy_eur_kwh[g], bundle_->price_sell_eur_kwh[g]};

    // The penalty is judged on the requested action against the SoC-headroom
    // constraint alone; dispatch then clamps to the full feasible interval.
    const double v_t = terminal_voltage(battery_, params_);
    const double clip_penalty =
        reward_clip(action, p_net, battery_.soc, params_.soc_min, params_.soc_max,
                    battery_.capacity_ah, v_t, config_.dt_hours);

    const auto bounds = feasible_power_bounds(battery_, params_, config_.dt_hours);
    const Dispatch d = dispatch(action, p_net, bounds);

    const double soh_prev = battery_.soh;
    const BatteryStepResult br =
        gridrl::step(battery_, params_, bundle_->ambient_c[g], d.p_batt_w, config_.dt_hours);
    battery_ = br.state;

    const double r_trad = reward_trading(d.p_grid_w, quote, config_.dt_hours);
    const double r_deg = reward_degradation(soh_prev, battery_.soh, params_.soh_eol,
                                            config_.replacement_cost_eur);

    StepOutcome out;
    out.reward = combine_rewards(r_trad, r_deg, clip_penalty, config_.lambda_clip);
    out.info.p_net_w = p_net;
    out.info.p_batt_w = d.p_batt_w;
    out.info.p_grid_w = d.p_grid_w;
    out.info.p_demand_w = p_dem;
    out.info.p_generation_w = p_gen;
    out.info.a_requested = d.a_requested;
    out.info.a_effective = d.a_effective;
    out.info.clip_magnitude_w = d.clip_magnitude_w;
    out.info.current_a = br.current_a;
    out.info.soh = battery_.soh;

    ++t_;
    out.done = done();
    out.observation = build_observation(t_);
    return out;
  }

  // Observation for episode step k: battery state, lag-1 demand/generation
  // estimates (current values at the first step), current prices, and the
  // day/year clock angles.
  Observation build_observation(int k) const {
    const std::size_t horizon_last = static_cast<std::size_t>(config_.horizon_steps) - 1;
    const std::size_t g = offset_ + std::min(static_cast<std::size_t>(k), horizon_last);
    const std::size_t g_est = config_.estimate_rule == EstimateRule::Current
                                  ? g
                                  : offset_ + (k > 0 ? static_cast<std::size_t>(k) - 1
                                                     : static_cast<std::size_t>(0));

    Observation obs;
    obs.soc = battery_.soc;
    obs.battery_temp_c = battery_.temp_c;
    obs.demand_est_w = bundle_->demand_profiles_w[profile_][g_est];
    obs.generation_est_w = bundle_->generation_w[g_est];
    obs.price_buy = bundle_->price_buy_eur_kwh[g];
    obs.price_sell = bundle_->price_sell_eur_kwh[g];

    const double hours_into_year =
        static_cast<double>((bundle_->start_hour_of_year + g) % kHoursPerYear);
    const double day_angle = 6.283185307179586476925286766559 *
                             std::fmod(hours_into_year, 24.0) / 24.0;
    const double year_angle = 6.283185307179586476925286766559 * hours_into_year /
                              static_cast<double>(kHoursPerYear);
    obs.cos_day = std::cos(day_angle);
    obs.sin_day = std::sin(day_angle);
    obs.cos_year = std::cos(year_angle);
    obs.sin_year = std::sin(year_angle);
    return obs;
  }

private:
  std::shared_ptr<const ExogenousBundle> bundle_;
  BatteryParams params_;
  MdpConfig config_;
  Rng rng_;
  BatteryState battery_;
  std::size_t profile_ = 0;
  std::size_t offset_ = 0;
  int t_ = 0;
};

// One recorded transition of an episode roll.
struct TransitionRecord {
  Observation observation;
  double action = 0.0;
  RewardBreakdown reward;
  StepInfo info;
};

using Trajectory = std::vector<TransitionRecord>;

}  // namespace gridrl
