#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridrl/config.hpp"
#include "gridrl/experiments.hpp"

using namespace gridrl;
namespace fs = std::filesystem;

namespace {

// Downscaled configuration: 3-day horizon, tiny learner, 6 profiles.
ExperimentConfig small_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.out_dir = out_dir;
  cfg.data.mode = "synth";
  cfg.data.synth_seed = 11;
  cfg.data.years = 1;
  cfg.data.n_validation = 3;
  cfg.data.knobs.n_profiles = 6;
  cfg.mdp.horizon_steps = 72;
  cfg.mdp.episode_stride = 72;
  cfg.learner.n_envs = 2;
  cfg.learner.n_episodes = 4;
  cfg.learner.rollout_steps = 72;
  cfg.learner.minibatch_size = 36;
  cfg.learner.update_epochs = 2;
  cfg.eval.methods = {"og", "50-50", "bf", "rl"};
  cfg.eval.baseline = "50-50";
  return cfg;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gridrl_exp" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("config parsing: defaults, overrides, unknown keys") {
  const ExperimentConfig defaults = parse_experiment_config(nlohmann::json::object());
  CHECK(defaults.mdp.dt_hours == 1.0);
  CHECK(defaults.learner.n_envs == 4);
  CHECK(defaults.learner.n_episodes == 100);
  CHECK(defaults.eval.methods.size() == 8);
  CHECK(defaults.sweep.lambda.size() == 8);
  CHECK(defaults.mdp.replacement_cost_eur == 3000.0);

  const nlohmann::json j = {
      {"seed", 9},
      {"mdp", {{"dt_seconds", 1800}, {"lambda", 0.25}}},
      {"battery", {{"soc_min", 0.2}, {"ocv_table", {{0.0, 310.0}, {1.0, 395.0}}}}},
  };
  const ExperimentConfig cfg = parse_experiment_config(j);
  CHECK(cfg.seed == 9);
  CHECK(cfg.mdp.dt_hours == doctest::Approx(0.5));
  CHECK(cfg.mdp.lambda_clip == 0.25);
  CHECK(cfg.battery.soc_min == 0.2);
  CHECK(cfg.battery.ocv_table.size() == 2);

  CHECK_THROWS_AS(parse_experiment_config({{"learnr", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config({{"mdp", {{"gamm", 0.5}}}}), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config({{"mdp", {{"gamma", "high"}}}}), ConfigError);
}

TEST_CASE("config hash ignores out_dir but tracks semantic changes") {
  ExperimentConfig a;
  ExperimentConfig b;
  b.out_dir = "elsewhere";
  CHECK(a.config_hash() == b.config_hash());
  b.mdp.lambda_clip = 0.2;
  CHECK(a.config_hash() != b.config_hash());
}

TEST_CASE("build_datasets splits years and profiles") {
  ExperimentConfig cfg = small_config("unused");
  cfg.data.years = 2;
  const DatasetBundles data = build_datasets(cfg);
  CHECK(data.train->length() == kHoursPerYear);
  CHECK(data.test->length() == kHoursPerYear);
  CHECK(data.train->n_profiles() == 3);
  CHECK(data.test->n_profiles() == 3);
  CHECK(data.validation_profile_ids.size() == 3);

  // one year: train and test alias the same span
  cfg.data.years = 1;
  const DatasetBundles single = build_datasets(cfg);
  CHECK(single.train->length() == kHoursPerYear);
  CHECK(single.test->length() == kHoursPerYear);
}

TEST_CASE("price_scale multiplies both series in the built datasets") {
  ExperimentConfig cfg = small_config("unused");
  const DatasetBundles base = build_datasets(cfg);
  cfg.data.price_scale = 2.0;
  const DatasetBundles scaled = build_datasets(cfg);
  for (std::size_t t = 0; t < 100; ++t) {
    CHECK(scaled.test->price_buy_eur_kwh[t] ==
          doctest::Approx(2.0 * base.test->price_buy_eur_kwh[t]));
    CHECK(scaled.test->price_sell_eur_kwh[t] ==
          doctest::Approx(2.0 * base.test->price_sell_eur_kwh[t]));
  }
  CHECK(scaled.test->generation_w == base.test->generation_w);
}

TEST_CASE("method name parsing") {
  CHECK(make_rule_policy("og").action() == 0.0);
  CHECK(make_rule_policy("bf").action() == 1.0);
  CHECK(make_rule_policy("20-80").action() == doctest::Approx(0.2));
  CHECK(make_rule_policy("80-20").action() == doctest::Approx(0.8));
  CHECK_THROWS_AS(make_rule_policy("30-80"), ConfigError);
  CHECK_THROWS_AS(make_rule_policy("rl"), ConfigError);
  CHECK_THROWS_AS(make_rule_policy("mystery"), ConfigError);
  CHECK(is_rl_method("rl-base-plus"));
  CHECK(!is_rl_method("50-50"));
}

TEST_CASE("synth-data writes a loadable dataset") {
  const fs::path dir = fresh_dir("synth");
  ExperimentConfig cfg = small_config(dir.string());
  cmd_synth_data(cfg);

  CHECK(fs::exists(dir / "generation.csv"));
  CHECK(fs::exists(dir / "price_buy.csv"));
  CHECK(fs::exists(dir / "split_manifest.csv"));
  CHECK(fs::exists(dir / "profiles/profile_000.csv"));
  CHECK(fs::exists(dir / "config_snapshot.json"));

  // the exported files round-trip into the same bundle via csv mode
  ExperimentConfig csv_cfg = cfg;
  csv_cfg.data.mode = "csv";
  csv_cfg.data.generation_path = (dir / "generation.csv").string();
  csv_cfg.data.price_buy_path = (dir / "price_buy.csv").string();
  csv_cfg.data.price_sell_path = (dir / "price_sell.csv").string();
  csv_cfg.data.ambient_path = (dir / "ambient.csv").string();
  csv_cfg.data.profiles_dir = (dir / "profiles").string();
  csv_cfg.data.manifest_path = (dir / "split_manifest.csv").string();

  const DatasetBundles from_synth = build_datasets(cfg);
  const DatasetBundles from_csv = build_datasets(csv_cfg);
  CHECK(from_csv.test->generation_w == from_synth.test->generation_w);
  CHECK(from_csv.test->price_buy_eur_kwh == from_synth.test->price_buy_eur_kwh);
  CHECK(from_csv.test->demand_profiles_w == from_synth.test->demand_profiles_w);
  CHECK(from_csv.validation_profile_ids == from_synth.validation_profile_ids);
}

TEST_CASE("train writes checkpoints and curves; evaluate consumes them") {
  const fs::path dir = fresh_dir("train_eval");
  ExperimentConfig cfg = small_config((dir / "train").string());

  const TrainOutputs trained = cmd_train(cfg);
  CHECK(trained.results.count("rl") == 1);
  CHECK(fs::exists(dir / "train/checkpoint_rl.txt"));
  CHECK(fs::exists(dir / "train/learning_curve_rl.csv"));
  CHECK(fs::exists(dir / "train/config_snapshot.json"));

  cfg.out_dir = (dir / "eval").string();
  const EvaluationOutputs eval = cmd_evaluate(cfg, trained.checkpoint_dir);
  CHECK(eval.methods.size() == 4);
  CHECK(eval.validation_profile_ids.size() == 3);
  for (const auto& file :
       {"rhat_series.csv", "end_returns.csv", "gaps.csv", "boxplot.csv", "ttests.csv",
        "clip_diagnostic.csv", "summary.csv", "heatmap_rl.csv", "heatmap_og.csv"})
    CHECK(fs::exists(dir / "eval" / file));

  // metric decomposition: rhat = rhat_trad + rhat_deg at every t, exactly
  for (const auto& m : eval.methods)
    for (std::size_t t = 0; t < m.rhat.size(); ++t)
      CHECK(m.rhat[t] == m.rhat_trad[t] + m.rhat_deg[t]);

  // self-gap of the baseline is identically zero in gaps.csv
  const MethodEvaluation& base = eval.find("50-50");
  const auto self_gap = component_gap(base.rhat, base.rhat);
  for (double g : self_gap) CHECK(g == 0.0);

  // missing checkpoint -> config error
  cfg.out_dir = (dir / "eval2").string();
  CHECK_THROWS_AS(cmd_evaluate(cfg, (dir / "nowhere").string()), ConfigError);
}

TEST_CASE("train + evaluate reruns are byte-identical") {
  const fs::path dir = fresh_dir("determinism");
  ExperimentConfig cfg = small_config((dir / "a_train").string());
  cmd_train(cfg);
  cfg.out_dir = (dir / "a_eval").string();
  cmd_evaluate(cfg, (dir / "a_train").string());

  cfg.out_dir = (dir / "b_train").string();
  cmd_train(cfg);
  cfg.out_dir = (dir / "b_eval").string();
  cmd_evaluate(cfg, (dir / "b_train").string());

  CHECK(slurp(dir / "a_train/checkpoint_rl.txt") == slurp(dir / "b_train/checkpoint_rl.txt"));
  CHECK(slurp(dir / "a_train/learning_curve_rl.csv") ==
        slurp(dir / "b_train/learning_curve_rl.csv"));
  for (const auto& file : {"rhat_series.csv", "end_returns.csv", "gaps.csv", "ttests.csv"})
    CHECK(slurp(dir / "a_eval" / file) == slurp(dir / "b_eval" / file));
}

TEST_CASE("a single-method evaluation works when it is its own baseline") {
  const fs::path dir = fresh_dir("single");
  ExperimentConfig cfg = small_config(dir.string());
  cfg.eval.methods = {"og"};
  cfg.eval.baseline = "og";
  const EvaluationOutputs out = cmd_evaluate(cfg, "");
  CHECK(out.methods.size() == 1);
  CHECK(out.methods.front().method == "og");
  CHECK(fs::exists(dir / "heatmap_og.csv"));
}

TEST_CASE("the full eight-method roster trains and evaluates") {
  const fs::path dir = fresh_dir("full_roster");
  ExperimentConfig cfg = small_config((dir / "train").string());
  cfg.data.years = 3; // two training years, so the price averaging is not the identity
  cfg.mdp.horizon_steps = 48;
  cfg.mdp.episode_stride = 48;
  cfg.learner.n_episodes = 2;
  cfg.learner.rollout_steps = 48;
  cfg.learner.minibatch_size = 48;
  cfg.learner.update_epochs = 1;
  cfg.eval.methods = {"20-80", "50-50", "80-20", "og", "bf", "rl", "rl-base", "rl-base-plus"};

  const TrainOutputs trained = cmd_train(cfg);
  CHECK(trained.results.size() == 3); // rl, rl-base, rl-base-plus
  for (const char* m : {"rl", "rl-base", "rl-base-plus"})
    CHECK(fs::exists(dir / "train" / (std::string("checkpoint_") + m + ".txt")));

  // the three variants trained on genuinely different bundles
  CHECK(slurp(dir / "train/checkpoint_rl.txt") != slurp(dir / "train/checkpoint_rl-base.txt"));
  CHECK(slurp(dir / "train/checkpoint_rl-base.txt") !=
        slurp(dir / "train/checkpoint_rl-base-plus.txt"));

  cfg.out_dir = (dir / "eval").string();
  const EvaluationOutputs out = cmd_evaluate(cfg, trained.checkpoint_dir);
  CHECK(out.methods.size() == 8);
}

TEST_CASE("baseline evaluates only rule-based methods") {
  const fs::path dir = fresh_dir("baseline");
  ExperimentConfig cfg = small_config(dir.string());
  const EvaluationOutputs out = cmd_baseline(cfg);
  CHECK(out.methods.size() == 3); // og, 50-50, bf
  for (const auto& m : out.methods) CHECK(!is_rl_method(m.method));
}

TEST_CASE("baseline must be included in the method list") {
  const fs::path dir = fresh_dir("nobase");
  ExperimentConfig cfg = small_config(dir.string());
  cfg.eval.methods = {"og", "bf"};
  CHECK_THROWS_AS(cmd_evaluate(cfg, ""), ConfigError);
}

TEST_CASE("replacement sweep: rule-based trading unchanged, degradation scales") {
  const fs::path dir = fresh_dir("sweep_repl");
  ExperimentConfig cfg = small_config(dir.string());
  cfg.eval.methods = {"og", "50-50", "bf"};
  cfg.sweep.replacement = {1000.0, 3000.0};

  const std::vector<SweepRow> rows = cmd_sweep(cfg, "replacement");
  REQUIRE(rows.size() == 6);
  CHECK(fs::exists(dir / "sweep_replacement.csv"));

  // degradation is linear in R: for bf, rhat_end(R) = trad + deg_unit * R
  const EvaluationOutputs at1000 = [&] {
    ExperimentConfig c = cfg;
    c.mdp.replacement_cost_eur = 1000.0;
    c.out_dir = (dir / "check1000").string();
    return cmd_baseline(c);
  }();
  const EvaluationOutputs at3000 = [&] {
    ExperimentConfig c = cfg;
    c.mdp.replacement_cost_eur = 3000.0;
    c.out_dir = (dir / "check3000").string();
    return cmd_baseline(c);
  }();
  const MethodEvaluation& bf1 = at1000.find("bf");
  const MethodEvaluation& bf3 = at3000.find("bf");
  CHECK(bf1.rhat_trad.back() == doctest::Approx(bf3.rhat_trad.back()).epsilon(1e-12));
  CHECK(bf3.rhat_deg.back() == doctest::Approx(3.0 * bf1.rhat_deg.back()).epsilon(1e-9));
}

TEST_CASE("alpha sweep scales rule-based trading linearly") {
  const fs::path dir = fresh_dir("sweep_alpha");
  ExperimentConfig cfg = small_config(dir.string());
  cfg.eval.methods = {"og", "50-50"};
  cfg.eval.baseline = "50-50";
  cfg.sweep.alpha = {0.5, 1.0};

  cmd_sweep(cfg, "alpha");

  const EvaluationOutputs half = [&] {
    ExperimentConfig c = cfg;
    c.data.price_scale = 0.5;
    c.out_dir = (dir / "half").string();
    return cmd_baseline(c);
  }();
  const EvaluationOutputs full = [&] {
    ExperimentConfig c = cfg;
    c.out_dir = (dir / "full").string();
    return cmd_baseline(c);
  }();
  // dispatch of a constant policy is price-independent, so trading halves
  CHECK(half.find("og").rhat_trad.back() ==
        doctest::Approx(0.5 * full.find("og").rhat_trad.back()).epsilon(1e-9));
  CHECK(half.find("og").rhat_deg.back() ==
        doctest::Approx(full.find("og").rhat_deg.back()).epsilon(1e-12));
}

TEST_CASE("unknown sweep axis is a config error") {
  ExperimentConfig cfg = small_config(fresh_dir("sweep_bad").string());
  CHECK_THROWS_AS(cmd_sweep(cfg, "voltage"), ConfigError);
  cfg.sweep.lambda.clear();
  CHECK_THROWS_AS(cmd_sweep(cfg, "lambda"), ConfigError);
}

TEST_CASE("zero training episodes still writes an untrained checkpoint") {
  const fs::path dir = fresh_dir("untrained");
  ExperimentConfig cfg = small_config(dir.string());
  cfg.learner.n_episodes = 0;
  const TrainOutputs out = cmd_train(cfg);
  CHECK(fs::exists(dir / "checkpoint_rl.txt"));
  CHECK(out.results.at("rl").curve.empty());
  const PolicyParameters restored = load_checkpoint((dir / "checkpoint_rl.txt").string());
  CHECK(restored.config_hash == cfg.config_hash());
}

TEST_CASE("report renders a table from an evaluation directory") {
  const fs::path dir = fresh_dir("report");
  ExperimentConfig cfg = small_config(dir.string());
  cfg.eval.methods = {"og", "50-50", "bf"};
  cmd_baseline(cfg);
  const std::string table = cmd_report(dir.string());
  CHECK(table.find("og") != std::string::npos);
  CHECK(table.find("bf") != std::string::npos);
  CHECK(fs::exists(dir / "summary.txt"));
}

} // TEST_SUITE
