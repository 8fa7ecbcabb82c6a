#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "gridrl/checkpoint.hpp"
#include "gridrl/config.hpp"
#include "gridrl/csv_io.hpp"
#include "gridrl/dp_oracle.hpp"
#include "gridrl/env.hpp"
#include "gridrl/metrics.hpp"
#include "gridrl/policies.hpp"
#include "gridrl/ppo.hpp"
#include "gridrl/stats.hpp"
#include "gridrl/synth.hpp"

// Batch experiment driver: the train / evaluate / baseline / sweep /
// synth-data / report commands. The CLI in tools/ is a thin shim over these
// functions so tests can exercise the same code paths.

namespace gridrl {

namespace experiments_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace experiments_detail

inline bool is_rl_method(const std::string& name) {
  return name == "rl" || name == "rl-base" || name == "rl-base-plus";
}

// Rule-based method names: og, bf, or "X-Y" with X + Y = 100.
inline ConstantPolicy make_rule_policy(const std::string& name) {
  if (name == "og") return only_grid_policy();
  if (name == "bf") return battery_first_policy();
  const auto dash = name.find('-');
  if (dash != std::string::npos) {
    try {
      const double x = std::stod(name.substr(0, dash));
      const double y = std::stod(name.substr(dash + 1));
      if (std::abs(x + y - 100.0) < 1e-9) return xy_policy(x);
    } catch (const std::exception&) {
      // fall through to the error below
    }
  }
  throw ConfigError("unknown rule-based method '" + name + "' (expected og, bf, or X-Y)");
}

// Exogenous data resolved into a training bundle (training demand profiles,
// training years) and a test bundle (validation profiles, final year).
struct DatasetBundles {
  std::shared_ptr<const ExogenousBundle> train;
  std::shared_ptr<const ExogenousBundle> test;
  std::vector<std::size_t> train_profile_ids;
  std::vector<std::size_t> validation_profile_ids;
};

namespace experiments_detail {

inline ExogenousBundle select_profiles(const ExogenousBundle& bundle,
                                       const std::vector<std::size_t>& ids) {
  ExogenousBundle out = bundle;
  out.demand_profiles_w.clear();
  for (std::size_t id : ids) out.demand_profiles_w.push_back(bundle.demand_profiles_w.at(id));
  return out;
}

inline ExogenousBundle load_csv_bundle(const DataConfig& data,
                                       std::vector<std::string>& profile_files) {
  auto require = [](const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("config: data.csv.") + what + " not set");
    return path;
  };
  const Series gen = load_series(require(data.generation_path, "generation"), SeriesKind::Power);
  const Series buy = load_series(require(data.price_buy_path, "price_buy"), SeriesKind::Price);
  const Series sell = load_series(require(data.price_sell_path, "price_sell"), SeriesKind::Price);
  const Series amb = load_series(require(data.ambient_path, "ambient"), SeriesKind::Temperature);

  ExogenousBundle bundle;
  bundle.generation_w = gen.values;
  bundle.price_buy_eur_kwh = buy.values;
  bundle.price_sell_eur_kwh = sell.values;
  bundle.ambient_c = amb.values;
  bundle.start_hour_of_year = gen.start_hour_of_year;
  for (const Series* s : {&buy, &sell, &amb})
    if (s->start_epoch_s != gen.start_epoch_s)
      throw ConfigError("csv series do not share the same start timestamp");

  if (data.profiles_dir.empty()) throw ConfigError("config: data.csv.profiles_dir not set");
  for (const auto& entry : std::filesystem::directory_iterator(data.profiles_dir))
    if (entry.path().extension() == ".csv") profile_files.push_back(entry.path().string());
  std::sort(profile_files.begin(), profile_files.end());
  if (profile_files.empty())
    throw ConfigError("no profile csv files found in " + data.profiles_dir);
  for (const auto& file : profile_files) {
    const Series profile = load_series(file, SeriesKind::Power);
    if (profile.start_epoch_s != gen.start_epoch_s)
      throw ConfigError(file + ": profile start differs from the generation series");
    bundle.demand_profiles_w.push_back(profile.values);
  }
  return bundle;
}

}  // namespace experiments_detail

inline DatasetBundles build_datasets(const ExperimentConfig& cfg) {
  using namespace experiments_detail;
  ExogenousBundle full;
  ProfileSet split;
  if (cfg.data.mode == "synth") {
    full = synth_bundle(cfg.data.synth_seed, cfg.data.years, cfg.data.knobs);
    split = split_profiles(full.n_profiles(), cfg.data.n_validation, cfg.data.synth_seed);
  } else {
    std::vector<std::string> profile_files;
    full = load_csv_bundle(cfg.data, profile_files);
    if (!cfg.data.manifest_path.empty())
      split = load_split_manifest(cfg.data.manifest_path);
    else
      split = split_profiles(full.n_profiles(), cfg.data.n_validation, cfg.data.synth_seed);
  }
  if (cfg.data.price_scale != 1.0) full = scale_prices(full, cfg.data.price_scale);

  const TrainTestBundles years = train_test_split(full);
  DatasetBundles out;
  out.train_profile_ids = split.train_indices;
  out.validation_profile_ids = split.validation_indices;
  out.train = std::make_shared<ExogenousBundle>(
      select_profiles(years.train, split.train_indices));
  out.test = std::make_shared<ExogenousBundle>(
      select_profiles(years.test, split.validation_indices));
  out.train->validate();
  out.test->validate();
  return out;
}

// ---- synth-data ------------------------------------------------------------

inline void cmd_synth_data(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  using experiments_detail::open_out;
  if (cfg.data.mode != "synth")
    throw ConfigError("synth-data requires data.mode = synth");

  const ExogenousBundle bundle = synth_bundle(cfg.data.synth_seed, cfg.data.years, cfg.data.knobs);
  const ProfileSet split =
      split_profiles(bundle.n_profiles(), cfg.data.n_validation, cfg.data.synth_seed);

  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir / "profiles");

  const std::int64_t start_epoch =
      detail::days_from_civil(cfg.data.knobs.start_year, 1, 1) * 86400;
  auto dump = [&](const std::string& name, const std::vector<double>& values,
                  const std::string& unit) {
    Series s;
    s.values = values;
    s.start_epoch_s = start_epoch;
    s.unit = unit;
    save_series((dir / name).string(), s);
  };
  dump("generation.csv", bundle.generation_w, "W");
  dump("price_buy.csv", bundle.price_buy_eur_kwh, "EUR/kWh");
  dump("price_sell.csv", bundle.price_sell_eur_kwh, "EUR/kWh");
  dump("ambient.csv", bundle.ambient_c, "degC");
  for (std::size_t id = 0; id < bundle.n_profiles(); ++id) {
    char name[64];
    std::snprintf(name, sizeof(name), "profiles/profile_%03zu.csv", id);
    dump(name, bundle.demand_profiles_w[id], "W");
  }
  save_split_manifest((dir / "split_manifest.csv").string(), split);

  std::ofstream snapshot = open_out(dir / "config_snapshot.json");
  snapshot << cfg.resolved_json().dump(2) << "\n";
}

// ---- train -----------------------------------------------------------------

// The training bundle each RL variant sees: the plain learner gets the true
// series; the ablations get temperature pinned (and prices averaged).
inline std::shared_ptr<const ExogenousBundle> training_bundle_for(
    const std::string& method, const DatasetBundles& data, const EvalConfig& eval) {
  if (method == "rl") return data.train;
  if (method == "rl-base")
    return std::make_shared<ExogenousBundle>(
        rl_base_bundle(*data.train, eval.fixed_ambient_temp_c));
  if (method == "rl-base-plus")
    return std::make_shared<ExogenousBundle>(
        rl_base_plus_bundle(*data.train, eval.fixed_ambient_temp_c));
  throw ConfigError("not an RL method: " + method);
}

struct TrainOutputs {
  std::map<std::string, TrainResult> results;
  std::string checkpoint_dir;
};

inline TrainOutputs cmd_train(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  using experiments_detail::fmt;
  using experiments_detail::open_out;
  cfg.validate();

  const DatasetBundles data = build_datasets(cfg);
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);

  TrainOutputs out;
  out.checkpoint_dir = dir.string();

  for (const std::string& method : cfg.eval.methods) {
    if (!is_rl_method(method)) continue;

    LearnerConfig learner = cfg.learner;
    learner.seed = cfg.seed;
    TrainResult result =
        train(training_bundle_for(method, data, cfg.eval), cfg.battery, cfg.mdp, learner);
    result.params.config_hash = cfg.config_hash();

    for (std::size_t k = 0; k < result.updates.size(); ++k)
      if (result.updates[k].aborted)
        std::cerr << "warning: " << method << " update " << k
                  << " aborted on a non-finite loss; parameters kept from the previous update\n";

    save_checkpoint((dir / ("checkpoint_" + method + ".txt")).string(), result.params);

    std::ofstream curve = open_out(dir / ("learning_curve_" + method + ".csv"));
    curve << "episode,env,steps,return_total,return_trad_deg,mean_clip_magnitude_w\n";
    for (const auto& row : result.curve)
      curve << row.episode << ',' << row.env_id << ',' << row.steps_done << ','
            << fmt(row.return_total) << ',' << fmt(row.return_trad_deg) << ','
            << fmt(row.mean_clip_magnitude_w) << '\n';

    std::ofstream updates = open_out(dir / ("updates_" + method + ".csv"));
    updates << "update,policy_loss,value_loss,entropy,clip_fraction\n";
    for (std::size_t k = 0; k < result.updates.size(); ++k)
      updates << k << ',' << fmt(result.updates[k].policy_loss) << ','
              << fmt(result.updates[k].value_loss) << ',' << fmt(result.updates[k].entropy) << ','
              << fmt(result.updates[k].clip_fraction) << '\n';

    out.results.emplace(method, std::move(result));
  }

  std::ofstream snapshot = open_out(dir / "config_snapshot.json");
  snapshot << cfg.resolved_json().dump(2) << "\n";
  return out;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluationOutputs {
  std::vector<MethodEvaluation> methods;
  std::vector<std::size_t> validation_profile_ids;

  const MethodEvaluation& find(const std::string& name) const {
    for (const auto& m : methods)
      if (m.method == name) return m;
    throw ConfigError("method not evaluated: " + name);
  }
};

namespace experiments_detail {

inline std::string resolve_checkpoint(const std::string& checkpoint_path,
                                      const std::string& method) {
  namespace fs = std::filesystem;
  if (checkpoint_path.empty())
    throw ConfigError("method '" + method + "' needs --checkpoint (file or directory)");
  const fs::path p = checkpoint_path;
  if (fs::is_directory(p)) {
    const fs::path file = p / ("checkpoint_" + method + ".txt");
    if (!fs::exists(file))
      throw ConfigError("checkpoint for '" + method + "' not found: " + file.string());
    return file.string();
  }
  if (!fs::exists(p)) throw ConfigError("checkpoint not found: " + checkpoint_path);
  return p.string();
}

}  // namespace experiments_detail

inline EvaluationOutputs cmd_evaluate(const ExperimentConfig& cfg,
                                      const std::string& checkpoint_path) {
  namespace fs = std::filesystem;
  using experiments_detail::fmt;
  using experiments_detail::open_out;
  using experiments_detail::resolve_checkpoint;
  cfg.validate();

  const DatasetBundles data = build_datasets(cfg);
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);

  MdpConfig mdp = cfg.mdp;
  if (static_cast<std::size_t>(mdp.horizon_steps) > data.test->length())
    throw ConfigError("evaluate: horizon exceeds the test year length");

  bool baseline_listed = false;
  for (const auto& m : cfg.eval.methods) baseline_listed |= (m == cfg.eval.baseline);
  if (!baseline_listed)
    throw ConfigError("evaluate: baseline '" + cfg.eval.baseline + "' is not in methods");

  EvaluationOutputs out;
  out.validation_profile_ids = data.validation_profile_ids;

  std::vector<std::vector<double>> actions_by_method, demands_by_method;

  for (const std::string& method : cfg.eval.methods) {
    std::unique_ptr<Policy> policy;
    if (is_rl_method(method)) {
      PolicyParameters params = load_checkpoint(resolve_checkpoint(checkpoint_path, method));
      if (params.config_hash != cfg.config_hash())
        std::cerr << "warning: checkpoint for '" << method
                  << "' was trained under a different config (hash mismatch)\n";
      policy = std::make_unique<LearnedPolicy>(std::move(params));
    } else {
      policy = std::make_unique<ConstantPolicy>(make_rule_policy(method));
    }

    std::vector<Trajectory> trajectories;
    std::vector<double> actions, demands;
    for (std::size_t p = 0; p < data.test->n_profiles(); ++p) {
      Environment env(data.test, cfg.battery, mdp, 0);
      Trajectory traj = run_episode(env, *policy, p);
      for (const auto& rec : traj) {
        actions.push_back(rec.action);
        demands.push_back(rec.info.p_demand_w);
      }
      trajectories.push_back(std::move(traj));
    }
    out.methods.push_back(evaluate_trajectories(method, trajectories));
    actions_by_method.push_back(std::move(actions));
    demands_by_method.push_back(std::move(demands));
  }

  // rhat series (one row per method and step)
  {
    std::ofstream f = open_out(dir / "rhat_series.csv");
    f << "method,t,rhat,rhat_trad,rhat_deg\n";
    for (const auto& m : out.methods)
      for (std::size_t t = 0; t < m.rhat.size(); ++t)
        f << m.method << ',' << (t + 1) << ',' << fmt(m.rhat[t]) << ',' << fmt(m.rhat_trad[t])
          << ',' << fmt(m.rhat_deg[t]) << '\n';
  }

  // per-profile end-horizon returns
  {
    std::ofstream f = open_out(dir / "end_returns.csv");
    f << "method,profile,return,return_trad,return_deg\n";
    for (const auto& m : out.methods)
      for (std::size_t k = 0; k < m.end_returns.size(); ++k)
        f << m.method << ',' << out.validation_profile_ids[k] << ',' << fmt(m.end_returns[k])
          << ',' << fmt(m.end_returns_trad[k]) << ',' << fmt(m.end_returns_deg[k]) << '\n';
  }

  // gaps against the configured baseline
  {
    const MethodEvaluation& base = out.find(cfg.eval.baseline);
    std::ofstream f = open_out(dir / "gaps.csv");
    f << "method,t,gap,gap_trad,gap_deg\n";
    for (const auto& m : out.methods) {
      const auto gap = component_gap(m.rhat, base.rhat);
      const auto gap_trad = component_gap(m.rhat_trad, base.rhat_trad);
      const auto gap_deg = component_gap(m.rhat_deg, base.rhat_deg);
      for (std::size_t t = 0; t < gap.size(); ++t)
        f << m.method << ',' << (t + 1) << ',' << fmt(gap[t]) << ',' << fmt(gap_trad[t]) << ','
          << fmt(gap_deg[t]) << '\n';
    }
  }

  // boxplot five-number summaries of the end returns
  {
    std::ofstream f = open_out(dir / "boxplot.csv");
    f << "method,min,q1,median,q3,max,mean\n";
    for (const auto& m : out.methods) {
      const FiveNumberSummary s = five_number_summary(m.end_returns);
      f << m.method << ',' << fmt(s.min) << ',' << fmt(s.q1) << ',' << fmt(s.median) << ','
        << fmt(s.q3) << ',' << fmt(s.max) << ',' << fmt(mean_of(m.end_returns)) << '\n';
    }
  }

  // paired one-sided t-tests: first RL method (or first method) vs the rest
  {
    std::string reference = out.methods.front().method;
    for (const auto& m : cfg.eval.methods)
      if (is_rl_method(m)) {
        reference = m;
        break;
      }
    std::ofstream f = open_out(dir / "ttests.csv");
    f << "method_a,method_b,n,t_stat,p_one_sided,dof\n";
    if (out.validation_profile_ids.size() >= 2) {
      const MethodEvaluation& ref = out.find(reference);
      double worst_p = 0.0;
      for (const auto& m : out.methods) {
        if (m.method == reference) continue;
        const PairedTTest t = paired_t_test(ref.end_returns, m.end_returns);
        worst_p = std::max(worst_p, t.p_one_sided);
        f << reference << ',' << m.method << ',' << ref.end_returns.size() << ',' << fmt(t.t)
          << ',' << fmt(t.p_one_sided) << ',' << t.dof << '\n';
      }
      if (out.methods.size() > 1)
        f << reference << ",overall-max," << ref.end_returns.size() << ",," << fmt(worst_p)
          << ",\n";
    }
  }

  // action-vs-demand histograms, one file per method (log of counts; empty
  // cells leave the log column blank)
  for (std::size_t k = 0; k < out.methods.size(); ++k) {
    const ActionDemandHistogram h = action_demand_histogram(
        actions_by_method[k], demands_by_method[k], cfg.eval.action_bins, cfg.eval.demand_bins);
    std::ofstream f = open_out(dir / ("heatmap_" + out.methods[k].method + ".csv"));
    f << "action_lo,action_hi,demand_lo,demand_hi,count,log_count\n";
    for (std::size_t ai = 0; ai < h.action_bins; ++ai)
      for (std::size_t di = 0; di < h.demand_bins; ++di) {
        const double a_lo = static_cast<double>(ai) / static_cast<double>(h.action_bins);
        const double a_hi = static_cast<double>(ai + 1) / static_cast<double>(h.action_bins);
        const double d_span = (h.demand_hi > h.demand_lo) ? (h.demand_hi - h.demand_lo) : 1.0;
        const double d_lo = h.demand_lo + d_span * static_cast<double>(di) /
                                              static_cast<double>(h.demand_bins);
        const double d_hi = h.demand_lo + d_span * static_cast<double>(di + 1) /
                                              static_cast<double>(h.demand_bins);
        f << fmt(a_lo) << ',' << fmt(a_hi) << ',' << fmt(d_lo) << ',' << fmt(d_hi) << ','
          << h.count_at(ai, di) << ','
          << (h.empty_cell(ai, di) ? std::string() : fmt(h.log_count(ai, di))) << '\n';
      }
  }

  // clip shaping diagnostic (excluded from the reported metric)
  {
    std::ofstream f = open_out(dir / "clip_diagnostic.csv");
    f << "method,mean_clip_magnitude_w,mean_episode_clip_penalty_w\n";
    for (const auto& m : out.methods)
      f << m.method << ',' << fmt(m.mean_clip_magnitude_w) << ',' << fmt(m.sum_clip_penalty_w)
        << '\n';
  }

  // summary table
  {
    std::ofstream f = open_out(dir / "summary.csv");
    f << "method,mean_return,median_return,std_return,mean_trad,mean_deg\n";
    for (const auto& m : out.methods) {
      const FiveNumberSummary s = five_number_summary(m.end_returns);
      f << m.method << ',' << fmt(mean_of(m.end_returns)) << ',' << fmt(s.median) << ','
        << fmt(sample_std(m.end_returns)) << ',' << fmt(mean_of(m.end_returns_trad)) << ','
        << fmt(mean_of(m.end_returns_deg)) << '\n';
    }
  }

  std::ofstream snapshot = open_out(dir / "config_snapshot.json");
  snapshot << cfg.resolved_json().dump(2) << "\n";
  return out;
}

// Rule-based methods only; no checkpoint needed.
inline EvaluationOutputs cmd_baseline(ExperimentConfig cfg) {
  std::vector<std::string> rule_based;
  for (const auto& m : cfg.eval.methods)
    if (!is_rl_method(m)) rule_based.push_back(m);
  if (rule_based.empty()) throw ConfigError("baseline: no rule-based methods listed");
  cfg.eval.methods = rule_based;
  return cmd_evaluate(cfg, "");
}

// ---- sweep -----------------------------------------------------------------

struct SweepRow {
  double value = 0.0;
  std::string method;
  double rhat_end = 0.0;
};

namespace experiments_detail {

inline ExperimentConfig config_for_sweep_point(const ExperimentConfig& cfg,
                                               const std::string& axis, double value,
                                               const std::filesystem::path& point_dir) {
  ExperimentConfig point = cfg;
  point.out_dir = point_dir.string();
  if (axis == "alpha") {
    // alpha multiplies both price series, in training and testing alike
    point.data.price_scale = cfg.data.price_scale * value;
  } else if (axis == "replacement") {
    point.mdp.replacement_cost_eur = value;
  } else if (axis == "lambda") {
    point.mdp.lambda_clip = value;
  } else {
    throw ConfigError("sweep: unknown axis '" + axis + "' (alpha|replacement|lambda)");
  }
  return point;
}

}  // namespace experiments_detail

// One full train + evaluate per grid point for RL methods; rule-based
// methods are simply re-evaluated under the modified conditions. With
// `reuse_checkpoint_dir` set, training is skipped and existing checkpoints
// are loaded instead (the evaluation conditions still move with the axis).
inline std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, const std::string& axis,
                                       int jobs = 1, const std::string& reuse_checkpoint_dir = "") {
  namespace fs = std::filesystem;
  using experiments_detail::config_for_sweep_point;
  using experiments_detail::fmt;
  cfg.validate();

  const std::vector<double>* grid = nullptr;
  if (axis == "alpha") grid = &cfg.sweep.alpha;
  else if (axis == "replacement") grid = &cfg.sweep.replacement;
  else if (axis == "lambda") grid = &cfg.sweep.lambda;
  else throw ConfigError("sweep: unknown axis '" + axis + "' (alpha|replacement|lambda)");
  if (grid->empty()) throw ConfigError("sweep: empty grid for axis " + axis);

  const fs::path root = fs::path(cfg.out_dir) / ("sweep_" + axis);
  fs::create_directories(root);

  const bool has_rl = [&] {
    for (const auto& m : cfg.eval.methods)
      if (is_rl_method(m)) return true;
    return false;
  }();

  std::vector<std::vector<SweepRow>> per_point(grid->size());
  std::vector<std::exception_ptr> errors(grid->size());

  auto run_point = [&](std::size_t k) {
    try {
      const double value = (*grid)[k];
      const fs::path point_dir = root / (axis + "_" + fmt(value));
      ExperimentConfig point = config_for_sweep_point(cfg, axis, value, point_dir);

      std::string checkpoint_dir = reuse_checkpoint_dir;
      if (has_rl && checkpoint_dir.empty()) {
        cmd_train(point);
        checkpoint_dir = point.out_dir;
      }
      const EvaluationOutputs eval = cmd_evaluate(point, checkpoint_dir);
      for (const auto& m : eval.methods)
        per_point[k].push_back({value, m.method, m.rhat.back()});
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  if (jobs <= 1) {
    for (std::size_t k = 0; k < grid->size(); ++k) run_point(k);
  } else {
    std::size_t next = 0;
    while (next < grid->size()) {
      std::vector<std::thread> batch;
      for (int j = 0; j < jobs && next < grid->size(); ++j, ++next)
        batch.emplace_back(run_point, next);
      for (auto& t : batch) t.join();
    }
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::vector<SweepRow> rows;
  for (const auto& point : per_point) rows.insert(rows.end(), point.begin(), point.end());

  std::ofstream f = experiments_detail::open_out(fs::path(cfg.out_dir) / ("sweep_" + axis + ".csv"));
  f << "axis,value,method,rhat_end\n";
  for (const auto& row : rows)
    f << axis << ',' << fmt(row.value) << ',' << row.method << ',' << fmt(row.rhat_end) << '\n';
  return rows;
}

// ---- report ----------------------------------------------------------------

// Renders a summary table from an evaluation directory's end_returns.csv.
inline std::string cmd_report(const std::string& eval_dir) {
  namespace fs = std::filesystem;
  const fs::path path = fs::path(eval_dir) / "end_returns.csv";
  std::ifstream in(path);
  if (!in) throw ConfigError("report: cannot open " + path.string());

  std::string line;
  std::getline(in, line);
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> returns;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto c3 = line.find(',', c2 + 1);
    const std::string method = line.substr(0, c1);
    const double value = std::stod(line.substr(c2 + 1, c3 - c2 - 1));
    if (!returns.count(method)) order.push_back(method);
    returns[method].push_back(value);
  }
  if (order.empty()) throw ConfigError("report: no rows in " + path.string());

  char buf[256];
  std::string table;
  table += "method          mean        median      q1          q3          n\n";
  for (const auto& method : order) {
    const auto& r = returns[method];
    const FiveNumberSummary s = five_number_summary(r);
    std::snprintf(buf, sizeof(buf), "%-14s %11.4f %11.4f %11.4f %11.4f %5zu\n", method.c_str(),
                  mean_of(r), s.median, s.q1, s.q3, r.size());
    table += buf;
  }

  std::string reference;
  for (const auto& method : order)
    if (is_rl_method(method)) {
      reference = method;
      break;
    }
  if (!reference.empty() && returns[reference].size() >= 2) {
    table += "\npaired one-sided t-tests (" + reference + " > method):\n";
    for (const auto& method : order) {
      if (method == reference) continue;
      if (returns[method].size() != returns[reference].size()) continue;
      const PairedTTest t = paired_t_test(returns[reference], returns[method]);
      std::snprintf(buf, sizeof(buf), "  vs %-12s t = %8.4f  p = %.6f\n", method.c_str(), t.t,
                    t.p_one_sided);
      table += buf;
    }
  }

  std::ofstream out(fs::path(eval_dir) / "summary.txt");
  out << table;
  return table;
}

}  // namespace gridrl
