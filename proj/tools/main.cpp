// Command-line front end for the microgrid dispatch experiments: data
// synthesis, training, evaluation, and the sweep campaign. All heavy lifting
// lives in the library; this file only parses flags and maps errors to exit
// codes (0 success, 2 config/user error, 1 internal error).

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gridrl/config.hpp"
#include "gridrl/experiments.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> methods;
  long long seed = -1;
  bool has_seed = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Path to the JSON experiment config");
  cmd->add_option("--out", flags.out_dir, "Output directory (overrides config)");
  cmd->add_option("--seed", flags.seed, "Global seed (overrides config)")
      ->each([&flags](const std::string&) { flags.has_seed = true; });
  cmd->add_option("--methods", flags.methods,
                  "Method list (overrides config), e.g. --methods og bf 50-50 rl");
}

gridrl::ExperimentConfig resolve_config(const CommonFlags& flags) {
  gridrl::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = gridrl::load_experiment_config(flags.config_path);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.has_seed) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.methods.empty()) cfg.eval.methods = flags.methods;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microgrid tertiary-control simulator and learning harness"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, baseline_flags, sweep_flags, synth_flags;
  std::string checkpoint_path, sweep_axis, report_dir, reuse_dir;
  int jobs = 1;

  CLI::App* synth = app.add_subcommand("synth-data", "Generate the synthetic dataset as CSV files");
  add_common(synth, synth_flags);

  CLI::App* train = app.add_subcommand("train", "Train the RL methods and write checkpoints");
  add_common(train, train_flags);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate methods on the validation profiles");
  add_common(evaluate, eval_flags);
  evaluate->add_option("--checkpoint", checkpoint_path,
                       "Checkpoint file or directory holding checkpoint_<method>.txt");

  CLI::App* baseline = app.add_subcommand("baseline", "Evaluate the rule-based methods only");
  add_common(baseline, baseline_flags);

  CLI::App* sweep = app.add_subcommand("sweep", "Run a grid sweep (train + evaluate per point)");
  add_common(sweep, sweep_flags);
  sweep->add_option("--axis", sweep_axis, "Sweep axis: alpha | replacement | lambda")->required();
  sweep->add_option("--jobs", jobs, "Grid points to run in parallel (default 1)");
  sweep->add_option("--reuse-checkpoints", reuse_dir,
                    "Skip per-point training and load checkpoints from this directory");

  CLI::App* report = app.add_subcommand("report", "Print a summary table from an evaluation directory");
  report->add_option("dir", report_dir, "Evaluation output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      gridrl::cmd_synth_data(resolve_config(synth_flags));
    } else if (train->parsed()) {
      const auto cfg = resolve_config(train_flags);
      gridrl::cmd_train(cfg);
      std::cout << "checkpoints written to " << cfg.out_dir << "\n";
    } else if (evaluate->parsed()) {
      const auto cfg = resolve_config(eval_flags);
      gridrl::cmd_evaluate(cfg, checkpoint_path);
      std::cout << "evaluation written to " << cfg.out_dir << "\n";
    } else if (baseline->parsed()) {
      const auto cfg = resolve_config(baseline_flags);
      gridrl::cmd_baseline(cfg);
      std::cout << "evaluation written to " << cfg.out_dir << "\n";
    } else if (sweep->parsed()) {
      const auto cfg = resolve_config(sweep_flags);
      gridrl::cmd_sweep(cfg, sweep_axis, jobs, reuse_dir);
      std::cout << "sweep written to " << cfg.out_dir << "\n";
    } else if (report->parsed()) {
      std::cout << gridrl::cmd_report(report_dir);
    }
  } catch (const gridrl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
