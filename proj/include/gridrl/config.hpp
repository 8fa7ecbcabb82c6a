#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gridrl/battery.hpp"
#include "gridrl/env.hpp"
#include "gridrl/errors.hpp"
#include "gridrl/ppo.hpp"
#include "gridrl/synth.hpp"

// Experiment configuration: one structured JSON file with defaults for every
// field, CLI flags overriding. The resolved config is snapshotted next to
// every output for provenance, and its hash is stamped into checkpoints.

namespace gridrl {

struct DataConfig {
  std::string mode = "synth"; // synth | csv
  double price_scale = 1.0;   // alpha multiplier applied to both price series
  // synth mode
  std::uint64_t synth_seed = 7;
  int years = 3; // last year is the test year; the rest train
  std::size_t n_validation = 4;
  SynthKnobs knobs;
  // csv mode
  std::string generation_path, price_buy_path, price_sell_path, ambient_path;
  std::string profiles_dir, manifest_path;
};

struct EvalConfig {
  std::vector<std::string> methods = {"20-80", "50-50",  "80-20",  "og",
                                      "bf",    "rl",     "rl-base", "rl-base-plus"};
  std::string baseline = "50-50";
  std::size_t action_bins = 21;
  std::size_t demand_bins = 20;
  double fixed_ambient_temp_c = 25.0; // for the rl-base training ablations
};

struct SweepConfig {
  std::vector<double> alpha = {0.1, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> replacement = {200.0, 1000.0, 3000.0, 5000.0, 10000.0};
  std::vector<double> lambda = {0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0};
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  DataConfig data;
  BatteryParams battery;
  MdpConfig mdp;
  LearnerConfig learner;
  EvalConfig eval;
  SweepConfig sweep;

  nlohmann::json resolved_json() const;
  std::uint64_t config_hash() const; // excludes out_dir
  void validate() const {
    battery.validate();
    mdp.validate();
    learner.validate();
    if (data.mode != "synth" && data.mode != "csv")
      throw ConfigError("config: data.mode must be 'synth' or 'csv'");
    if (eval.methods.empty()) throw ConfigError("config: evaluate.methods is empty");
  }
};

namespace config_detail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::set<std::string>& allowed,
                       const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("config: unknown key '" + it.key() + "' in " + context);
}

template <typename T>
void read(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) {
    try {
      target = obj.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
  }
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace config_detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  using namespace config_detail;
  ExperimentConfig cfg;

  check_keys(j, {"seed", "out_dir", "data", "battery", "mdp", "learner", "evaluate", "sweep"},
             "top level");
  read(j, "seed", cfg.seed);
  read(j, "out_dir", cfg.out_dir);

  if (j.contains("data")) {
    const auto& d = j.at("data");
    check_keys(d, {"mode", "price_scale", "synth", "csv"}, "data");
    read(d, "mode", cfg.data.mode);
    read(d, "price_scale", cfg.data.price_scale);
    if (d.contains("synth")) {
      const auto& s = d.at("synth");
      check_keys(s,
                 {"seed", "years", "n_profiles", "n_validation", "pv_peak_w", "pv_weather_floor",
                  "demand_annual_min_mwh", "demand_annual_max_mwh", "price_buy_mean", "sell_ratio",
                  "temp_mean_c", "temp_seasonal_amp_c", "temp_diurnal_amp_c", "start_year"},
                 "data.synth");
      read(s, "seed", cfg.data.synth_seed);
      read(s, "years", cfg.data.years);
      read(s, "n_validation", cfg.data.n_validation);
      read(s, "n_profiles", cfg.data.knobs.n_profiles);
      read(s, "pv_peak_w", cfg.data.knobs.pv_peak_w);
      read(s, "pv_weather_floor", cfg.data.knobs.pv_weather_floor);
      read(s, "demand_annual_min_mwh", cfg.data.knobs.demand_annual_min_mwh);
      read(s, "demand_annual_max_mwh", cfg.data.knobs.demand_annual_max_mwh);
      read(s, "price_buy_mean", cfg.data.knobs.price_buy_mean);
      read(s, "sell_ratio", cfg.data.knobs.sell_ratio);
      read(s, "temp_mean_c", cfg.data.knobs.temp_mean_c);
      read(s, "temp_seasonal_amp_c", cfg.data.knobs.temp_seasonal_amp_c);
      read(s, "temp_diurnal_amp_c", cfg.data.knobs.temp_diurnal_amp_c);
      read(s, "start_year", cfg.data.knobs.start_year);
    }
    if (d.contains("csv")) {
      const auto& c = d.at("csv");
      check_keys(c,
                 {"generation", "price_buy", "price_sell", "ambient", "profiles_dir", "manifest",
                  "n_validation"},
                 "data.csv");
      read(c, "generation", cfg.data.generation_path);
      read(c, "price_buy", cfg.data.price_buy_path);
      read(c, "price_sell", cfg.data.price_sell_path);
      read(c, "ambient", cfg.data.ambient_path);
      read(c, "profiles_dir", cfg.data.profiles_dir);
      read(c, "manifest", cfg.data.manifest_path);
      read(c, "n_validation", cfg.data.n_validation);
    }
  }

  if (j.contains("battery")) {
    const auto& b = j.at("battery");
    check_keys(b,
               {"nominal_capacity_ah", "nominal_voltage_v", "energy_capacity_kwh", "ocv_table",
                "r0_ohm", "r1_ohm", "c1_farad", "r_th", "c_th", "p_charge_max_w",
                "p_discharge_max_w", "soc_min", "soc_max", "soh_eol", "aging"},
               "battery");
    read(b, "nominal_capacity_ah", cfg.battery.nominal_capacity_ah);
    read(b, "nominal_voltage_v", cfg.battery.nominal_voltage_v);
    read(b, "energy_capacity_kwh", cfg.battery.energy_capacity_kwh);
    if (b.contains("ocv_table")) {
      cfg.battery.ocv_table.clear();
      for (const auto& row : b.at("ocv_table")) {
        if (!row.is_array() || row.size() != 2)
          throw ConfigError("config: battery.ocv_table rows must be [soc, voltage] pairs");
        cfg.battery.ocv_table.emplace_back(row[0].get<double>(), row[1].get<double>());
      }
    }
    read(b, "r0_ohm", cfg.battery.r0_ohm);
    read(b, "r1_ohm", cfg.battery.r1_ohm);
    read(b, "c1_farad", cfg.battery.c1_farad);
    read(b, "r_th", cfg.battery.r_th);
    read(b, "c_th", cfg.battery.c_th);
    read(b, "p_charge_max_w", cfg.battery.p_charge_max_w);
    read(b, "p_discharge_max_w", cfg.battery.p_discharge_max_w);
    read(b, "soc_min", cfg.battery.soc_min);
    read(b, "soc_max", cfg.battery.soc_max);
    read(b, "soh_eol", cfg.battery.soh_eol);
    if (b.contains("aging")) {
      const auto& a = b.at("aging");
      check_keys(a, {"k_cal", "k_cyc", "theta_t", "t_ref_c", "soc_stress_slope"}, "battery.aging");
      read(a, "k_cal", cfg.battery.aging.k_cal);
      read(a, "k_cyc", cfg.battery.aging.k_cyc);
      read(a, "theta_t", cfg.battery.aging.theta_t);
      read(a, "t_ref_c", cfg.battery.aging.t_ref_c);
      read(a, "soc_stress_slope", cfg.battery.aging.soc_stress_slope);
    }
  }

  if (j.contains("mdp")) {
    const auto& m = j.at("mdp");
    check_keys(m,
               {"gamma", "horizon_steps", "dt_seconds", "lambda", "initial_soc", "initial_soh",
                "replacement_cost", "estimate_rule", "episode_stride"},
               "mdp");
    read(m, "gamma", cfg.mdp.gamma);
    read(m, "horizon_steps", cfg.mdp.horizon_steps);
    if (m.contains("dt_seconds")) cfg.mdp.dt_hours = m.at("dt_seconds").get<double>() / 3600.0;
    read(m, "lambda", cfg.mdp.lambda_clip);
    read(m, "initial_soc", cfg.mdp.initial_soc);
    read(m, "initial_soh", cfg.mdp.initial_soh);
    read(m, "replacement_cost", cfg.mdp.replacement_cost_eur);
    if (m.contains("estimate_rule")) {
      const std::string rule = m.at("estimate_rule").get<std::string>();
      if (rule == "lag1")
        cfg.mdp.estimate_rule = EstimateRule::Lag1;
      else if (rule == "current")
        cfg.mdp.estimate_rule = EstimateRule::Current;
      else
        throw ConfigError("config: mdp.estimate_rule must be 'lag1' or 'current'");
    }
    read(m, "episode_stride", cfg.mdp.episode_stride);
  }

  if (j.contains("learner")) {
    const auto& l = j.at("learner");
    check_keys(l,
               {"n_envs", "n_episodes", "rollout_steps", "minibatch_size", "update_epochs",
                "clip_ratio", "learning_rate", "gamma", "gae_lambda", "value_coef", "entropy_coef",
                "normalize_observations", "reward_scale", "log_std_init"},
               "learner");
    read(l, "n_envs", cfg.learner.n_envs);
    read(l, "n_episodes", cfg.learner.n_episodes);
    read(l, "rollout_steps", cfg.learner.rollout_steps);
    read(l, "minibatch_size", cfg.learner.minibatch_size);
    read(l, "update_epochs", cfg.learner.update_epochs);
    read(l, "clip_ratio", cfg.learner.clip_ratio);
    read(l, "learning_rate", cfg.learner.learning_rate);
    read(l, "gamma", cfg.learner.gamma);
    read(l, "gae_lambda", cfg.learner.gae_lambda);
    read(l, "value_coef", cfg.learner.value_coef);
    read(l, "entropy_coef", cfg.learner.entropy_coef);
    read(l, "normalize_observations", cfg.learner.normalize_observations);
    read(l, "reward_scale", cfg.learner.reward_scale);
    read(l, "log_std_init", cfg.learner.log_std_init);
  }

  if (j.contains("evaluate")) {
    const auto& e = j.at("evaluate");
    check_keys(e, {"methods", "baseline", "action_bins", "demand_bins", "fixed_ambient_temp"},
               "evaluate");
    read(e, "methods", cfg.eval.methods);
    read(e, "baseline", cfg.eval.baseline);
    read(e, "action_bins", cfg.eval.action_bins);
    read(e, "demand_bins", cfg.eval.demand_bins);
    read(e, "fixed_ambient_temp", cfg.eval.fixed_ambient_temp_c);
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, {"alpha", "replacement", "lambda"}, "sweep");
    read(s, "alpha", cfg.sweep.alpha);
    read(s, "replacement", cfg.sweep.replacement);
    read(s, "lambda", cfg.sweep.lambda);
  }

  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
  }
  return parse_experiment_config(j);
}

inline nlohmann::json ExperimentConfig::resolved_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["out_dir"] = out_dir;

  j["data"]["mode"] = data.mode;
  j["data"]["price_scale"] = data.price_scale;
  j["data"]["synth"] = {{"seed", data.synth_seed},
                        {"years", data.years},
                        {"n_profiles", data.knobs.n_profiles},
                        {"n_validation", data.n_validation},
                        {"pv_peak_w", data.knobs.pv_peak_w},
                        {"pv_weather_floor", data.knobs.pv_weather_floor},
                        {"demand_annual_min_mwh", data.knobs.demand_annual_min_mwh},
                        {"demand_annual_max_mwh", data.knobs.demand_annual_max_mwh},
                        {"price_buy_mean", data.knobs.price_buy_mean},
                        {"sell_ratio", data.knobs.sell_ratio},
                        {"temp_mean_c", data.knobs.temp_mean_c},
                        {"temp_seasonal_amp_c", data.knobs.temp_seasonal_amp_c},
                        {"temp_diurnal_amp_c", data.knobs.temp_diurnal_amp_c},
                        {"start_year", data.knobs.start_year}};
  j["data"]["csv"] = {{"generation", data.generation_path},
                      {"price_buy", data.price_buy_path},
                      {"price_sell", data.price_sell_path},
                      {"ambient", data.ambient_path},
                      {"profiles_dir", data.profiles_dir},
                      {"manifest", data.manifest_path},
                      {"n_validation", data.n_validation}};

  nlohmann::json table = nlohmann::json::array();
  for (const auto& [soc, volt] : battery.ocv_table) table.push_back({soc, volt});
  j["battery"] = {{"nominal_capacity_ah", battery.nominal_capacity_ah},
                  {"nominal_voltage_v", battery.nominal_voltage_v},
                  {"energy_capacity_kwh", battery.energy_capacity_kwh},
                  {"ocv_table", table},
                  {"r0_ohm", battery.r0_ohm},
                  {"r1_ohm", battery.r1_ohm},
                  {"c1_farad", battery.c1_farad},
                  {"r_th", battery.r_th},
                  {"c_th", battery.c_th},
                  {"p_charge_max_w", battery.p_charge_max_w},
                  {"p_discharge_max_w", battery.p_discharge_max_w},
                  {"soc_min", battery.soc_min},
                  {"soc_max", battery.soc_max},
                  {"soh_eol", battery.soh_eol},
                  {"aging",
                   {{"k_cal", battery.aging.k_cal},
                    {"k_cyc", battery.aging.k_cyc},
                    {"theta_t", battery.aging.theta_t},
                    {"t_ref_c", battery.aging.t_ref_c},
                    {"soc_stress_slope", battery.aging.soc_stress_slope}}}};

  j["mdp"] = {{"gamma", mdp.gamma},
              {"horizon_steps", mdp.horizon_steps},
              {"dt_seconds", mdp.dt_hours * 3600.0},
              {"lambda", mdp.lambda_clip},
              {"initial_soc", mdp.initial_soc},
              {"initial_soh", mdp.initial_soh},
              {"replacement_cost", mdp.replacement_cost_eur},
              {"estimate_rule", mdp.estimate_rule == EstimateRule::Current ? "current" : "lag1"},
              {"episode_stride", mdp.episode_stride}};

  j["learner"] = {{"n_envs", learner.n_envs},
                  {"n_episodes", learner.n_episodes},
                  {"rollout_steps", learner.rollout_steps},
                  {"minibatch_size", learner.minibatch_size},
                  {"update_epochs", learner.update_epochs},
                  {"clip_ratio", learner.clip_ratio},
                  {"learning_rate", learner.learning_rate},
                  {"gamma", learner.gamma},
                  {"gae_lambda", learner.gae_lambda},
                  {"value_coef", learner.value_coef},
                  {"entropy_coef", learner.entropy_coef},
                  {"normalize_observations", learner.normalize_observations},
                  {"reward_scale", learner.reward_scale},
                  {"log_std_init", learner.log_std_init}};

  j["evaluate"] = {{"methods", eval.methods},
                   {"baseline", eval.baseline},
                   {"action_bins", eval.action_bins},
                   {"demand_bins", eval.demand_bins},
                   {"fixed_ambient_temp", eval.fixed_ambient_temp_c}};

  j["sweep"] = {{"alpha", sweep.alpha},
                {"replacement", sweep.replacement},
                {"lambda", sweep.lambda}};
  return j;
}

inline std::uint64_t ExperimentConfig::config_hash() const {
  nlohmann::json j = resolved_json();
  j.erase("out_dir"); // identity should not depend on where outputs land
  return config_detail::fnv1a(j.dump());
}

}  // namespace gridrl
