#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gridrl/errors.hpp"
#include "gridrl/ppo.hpp"

// Versioned textual checkpoint of all policy parameters plus the observation
// normalizer and the configuration hash. Doubles are written as C hexfloats,
// so a save/load round-trip is bit-exact.

namespace gridrl {

namespace checkpoint_detail {

inline std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

inline double parse_double(const std::string& tok, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ConfigError(path + ": malformed number '" + tok + "' in checkpoint");
  return v;
}

}  // namespace checkpoint_detail

inline void save_checkpoint(const std::string& path, const PolicyParameters& params) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint: " + path);
  using checkpoint_detail::hex_double;

  out << "gridrl-checkpoint v1\n";
  out << "config_hash " << params.config_hash << "\n";
  out << "normalize_observations " << (params.normalize_observations ? 1 : 0) << "\n";
  out << "normalizer " << params.normalizer.dim() << " " << hex_double(params.normalizer.count()) << "\n";
  out << "mean";
  for (double v : params.normalizer.mean()) out << " " << hex_double(v);
  out << "\nm2";
  for (double v : params.normalizer.m2()) out << " " << hex_double(v);
  out << "\nlog_std " << hex_double(params.log_std) << "\n";

  auto dump_net = [&](const char* name, const Mlp& net) {
    out << name << " " << net.input_dim() << " " << net.hidden_dim() << " " << net.output_dim();
    net.for_each_param([&](double v) { out << " " << hex_double(v); });
    out << "\n";
  };
  dump_net("actor", params.actor);
  dump_net("critic", params.critic);
  out << "end\n";
  if (!out) throw ConfigError("write failed: " + path);
}

inline PolicyParameters load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  using checkpoint_detail::parse_double;

  auto next_line = [&](const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": truncated checkpoint (" + what + ")");
    return line;
  };

  if (next_line("magic") != "gridrl-checkpoint v1")
    throw ConfigError(path + ": not a gridrl v1 checkpoint");

  PolicyParameters params;
  {
    std::istringstream ls(next_line("config_hash"));
    std::string key;
    ls >> key >> params.config_hash;
    if (key != "config_hash" || !ls) throw ConfigError(path + ": bad config_hash line");
  }
  {
    std::istringstream ls(next_line("normalize_observations"));
    std::string key;
    int flag = 0;
    ls >> key >> flag;
    if (key != "normalize_observations" || !ls)
      throw ConfigError(path + ": bad normalize_observations line");
    params.normalize_observations = flag != 0;
  }

  std::size_t dim = 0;
  double count = 0.0;
  {
    std::istringstream ls(next_line("normalizer"));
    std::string key, count_tok;
    ls >> key >> dim >> count_tok;
    if (key != "normalizer" || !ls) throw ConfigError(path + ": bad normalizer line");
    count = parse_double(count_tok, path);
  }
  auto read_vec = [&](const char* what, std::size_t n) {
    std::istringstream ls(next_line(what));
    std::string key, tok;
    ls >> key;
    if (key != what) throw ConfigError(path + ": expected '" + what + "' line");
    std::vector<double> v;
    v.reserve(n);
    while (ls >> tok) v.push_back(parse_double(tok, path));
    if (v.size() != n)
      throw ConfigError(path + ": '" + std::string(what) + "' has " + std::to_string(v.size()) +
                        " values, expected " + std::to_string(n));
    return v;
  };
  const std::vector<double> mean = read_vec("mean", dim);
  const std::vector<double> m2 = read_vec("m2", dim);
  params.normalizer = RunningNormalizer(dim);
  params.normalizer.restore(count, mean, m2);

  {
    std::istringstream ls(next_line("log_std"));
    std::string key, tok;
    ls >> key >> tok;
    if (key != "log_std" || !ls) throw ConfigError(path + ": bad log_std line");
    params.log_std = parse_double(tok, path);
  }

  auto read_net = [&](const char* what) {
    std::istringstream ls(next_line(what));
    std::string key, tok;
    std::size_t n_in = 0, n_hidden = 0, n_out = 0;
    ls >> key >> n_in >> n_hidden >> n_out;
    if (key != what || !ls) throw ConfigError(path + ": bad '" + std::string(what) + "' line");
    Mlp net(n_in, n_hidden, n_out);
    std::vector<double> vals;
    vals.reserve(net.n_params());
    while (ls >> tok) vals.push_back(parse_double(tok, path));
    if (vals.size() != net.n_params())
      throw ConfigError(path + ": '" + std::string(what) + "' parameter count mismatch");
    std::size_t idx = 0;
    net.for_each_param([&](double& v) { v = vals[idx++]; });
    return net;
  };
  params.actor = read_net("actor");
  params.critic = read_net("critic");

  if (next_line("end") != "end") throw ConfigError(path + ": missing end marker");
  return params;
}

}  // namespace gridrl
