#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridrl/env.hpp"
#include "gridrl/mlp.hpp"
#include "gridrl/normalizer.hpp"
#include "gridrl/policies.hpp"
#include "gridrl/rng.hpp"

// Clipped-surrogate policy-gradient learner (actor-critic, Gaussian policy)
// with generalized advantage estimation. Gradients are hand-derived; the
// whole learner is deterministic given its seed.

namespace gridrl {

struct LearnerConfig {
  int n_envs = 4;
  int n_episodes = 100;        // total episodes across all environments
  int rollout_steps = 2048;    // per environment, between updates
  int minibatch_size = 256;
  int update_epochs = 10;
  double clip_ratio = 0.2;
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  bool normalize_observations = true;
  double reward_scale = 1.0;   // divides all reward components uniformly
  double log_std_init = -0.7;
  std::uint64_t seed = 0;

  void validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("learner: " + msg); };
    if (n_envs < 1) fail("n_envs must be >= 1");
    if (n_episodes < 0) fail("n_episodes must be >= 0");
    if (rollout_steps < 1) fail("rollout_steps must be >= 1");
    if (minibatch_size < 1) fail("minibatch_size must be >= 1");
    if (update_epochs < 1) fail("update_epochs must be >= 1");
    if (!(clip_ratio > 0.0 && clip_ratio < 1.0)) fail("clip_ratio must lie in (0,1)");
    if (!(learning_rate >= 0.0)) fail("learning_rate must be >= 0");
    if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0,1]");
    if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) fail("gae_lambda must lie in [0,1]");
    if (!(reward_scale > 0.0)) fail("reward_scale must be > 0");
  }
};

constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;
constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// Actor (mean head + state-independent log-std), critic, and the observation
// normalizer; everything a policy needs at inference time.
struct PolicyParameters {
  Mlp actor;
  Mlp critic;
  double log_std = -0.7;
  RunningNormalizer normalizer{kObservationDim};
  bool normalize_observations = true;
  std::uint64_t config_hash = 0;

  static PolicyParameters make(std::size_t hidden, Rng& rng, const LearnerConfig& cfg) {
    PolicyParameters p;
    p.actor = Mlp(kObservationDim, hidden, 1);
    p.critic = Mlp(kObservationDim, hidden, 1);
    p.actor.init(rng, 0.01);
    p.critic.init(rng, 1.0);
    p.log_std = std::clamp(cfg.log_std_init, kLogStdMin, kLogStdMax);
    p.normalize_observations = cfg.normalize_observations;
    return p;
  }

  std::vector<double> prepare(const Observation& obs) const {
    const auto arr = obs.as_array();
    std::vector<double> x(arr.begin(), arr.end());
    return normalize_observations ? normalizer.normalize(x) : x;
  }
};

inline double gaussian_log_prob(double raw, double mean, double log_std) {
  const double sd = std::exp(log_std);
  const double z = (raw - mean) / sd;
  return -0.5 * z * z - log_std - kHalfLog2Pi;
}

inline double gaussian_entropy(double log_std) { return log_std + 0.5 + kHalfLog2Pi; }

// Deterministic forward passes on the (normalized) observation.
inline std::pair<double, double> forward_actor(const PolicyParameters& p, const Observation& obs) {
  return {p.actor.forward(p.prepare(obs))[0], std::clamp(p.log_std, kLogStdMin, kLogStdMax)};
}

inline double forward_critic(const PolicyParameters& p, const Observation& obs) {
  return p.critic.forward(p.prepare(obs))[0];
}

struct ActionSample {
  double action = 0.0;   // clamped to [0,1]
  double raw = 0.0;      // unclamped Gaussian draw
  double log_prob = 0.0; // density of the raw draw
};

// The sample is clamped into the action box; the log-density stays that of
// the unclamped draw (the environment's clip penalty, not the density,
// handles boundary pressure).
inline ActionSample sample_action(double mean, double log_std, Rng& rng) {
  ActionSample s;
  s.raw = mean + std::exp(log_std) * rng.normal();
  s.action = std::clamp(s.raw, 0.0, 1.0);
  s.log_prob = gaussian_log_prob(s.raw, mean, log_std);
  return s;
}

// Backward GAE recursion. `values` holds v(s_t) for each stored step,
// `bootstrap_value` is v(s_T) of the state following the last step (ignored
// when that step terminated).
inline void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                        const std::vector<std::uint8_t>& dones, double bootstrap_value,
                        double gamma, double gae_lambda, std::vector<double>& advantages,
                        std::vector<double>& returns) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw std::invalid_argument("compute_gae: input lengths differ");
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double next_adv = 0.0;
  for (std::size_t idx = n; idx-- > 0;) {
    const double not_done = dones[idx] ? 0.0 : 1.0;
    const double v_next = (idx + 1 < n) ? values[idx + 1] : bootstrap_value;
    const double delta = rewards[idx] + gamma * v_next * not_done - values[idx];
    next_adv = delta + gamma * gae_lambda * not_done * next_adv;
    advantages[idx] = next_adv;
    returns[idx] = advantages[idx] + values[idx];
  }
}

struct RolloutBuffer {
  std::vector<std::vector<double>> observations; // normalized at collection
  std::vector<double> raw_actions;
  std::vector<double> log_probs;
  std::vector<double> rewards; // scaled for learning
  std::vector<double> values;
  std::vector<std::uint8_t> dones;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return rewards.size(); }
  void clear() {
    observations.clear();
    raw_actions.clear();
    log_probs.clear();
    rewards.clear();
    values.clear();
    dones.clear();
    advantages.clear();
    returns.clear();
  }
};

struct UpdateDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  bool aborted = false; // non-finite loss encountered; update stopped
};

namespace ppo_detail {

inline std::vector<double> flatten(const PolicyParameters& p) {
  std::vector<double> flat;
  flat.reserve(p.actor.n_params() + p.critic.n_params() + 1);
  p.actor.for_each_param([&](double v) { flat.push_back(v); });
  flat.push_back(p.log_std);
  p.critic.for_each_param([&](double v) { flat.push_back(v); });
  return flat;
}

inline void unflatten(const std::vector<double>& flat, PolicyParameters& p) {
  std::size_t idx = 0;
  p.actor.for_each_param([&](double& v) { v = flat[idx++]; });
  p.log_std = std::clamp(flat[idx++], kLogStdMin, kLogStdMax);
  p.critic.for_each_param([&](double& v) { v = flat[idx++]; });
}

struct MinibatchGrad {
  std::vector<double> flat;
  UpdateDiagnostics diag;
  bool finite = true;
};

// Loss and gradient of the clipped-surrogate objective over one minibatch:
//   L = -mean(min(ratio*A, clamp(ratio)*A)) + c_v*mean((v-ret)^2) - c_e*entropy
inline MinibatchGrad minibatch_gradient(const PolicyParameters& p, const RolloutBuffer& buf,
                                        const std::vector<std::size_t>& indices,
                                        const LearnerConfig& cfg) {
  MinibatchGrad out;
  Mlp grad_actor = p.actor.zeros_like();
  Mlp grad_critic = p.critic.zeros_like();
  double grad_log_std = 0.0;

  const double inv_b = 1.0 / static_cast<double>(indices.size());
  const double log_std = std::clamp(p.log_std, kLogStdMin, kLogStdMax);
  const double sd = std::exp(log_std);
  const double var = sd * sd;

  double policy_loss = 0.0, value_loss = 0.0, clip_count = 0.0;
  Mlp::Cache cache;

  for (std::size_t idx : indices) {
    const std::vector<double>& x = buf.observations[idx];
    const double adv = buf.advantages[idx];

    p.actor.forward(x, cache);
    const double mean = cache.y[0];
    const double raw = buf.raw_actions[idx];
    const double lp_new = gaussian_log_prob(raw, mean, log_std);
    const double ratio = std::exp(lp_new - buf.log_probs[idx]);
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio) * adv;
    policy_loss += -std::min(unclipped, clipped) * inv_b;
    if (std::abs(ratio - 1.0) > cfg.clip_ratio) clip_count += 1.0;

    // d(-surr)/d(log pi): active only when the unclipped branch attains the min
    const double dlp = (unclipped <= clipped) ? -unclipped * inv_b : 0.0;
    const double z = (raw - mean) / var;
    // d lp/d mean = z; d lp/d log_std = z*(raw-mean) - 1
    const std::vector<double> dy{dlp * z};
    p.actor.backward(cache, dy, grad_actor);
    grad_log_std += dlp * (z * (raw - mean) - 1.0);

    p.critic.forward(x, cache);
    const double v = cache.y[0];
    const double err = v - buf.returns[idx];
    value_loss += err * err * inv_b;
    const std::vector<double> dv{2.0 * cfg.value_coef * err * inv_b};
    p.critic.backward(cache, dv, grad_critic);
  }

  grad_log_std += -cfg.entropy_coef; // entropy bonus is linear in log_std

  out.diag.policy_loss = policy_loss;
  out.diag.value_loss = value_loss;
  out.diag.entropy = gaussian_entropy(log_std);
  out.diag.clip_fraction = clip_count * inv_b;

  const double total = policy_loss + cfg.value_coef * value_loss - cfg.entropy_coef * out.diag.entropy;
  if (!std::isfinite(total)) {
    out.finite = false;
    return out;
  }

  out.flat.reserve(p.actor.n_params() + p.critic.n_params() + 1);
  grad_actor.for_each_param([&](double v) { out.flat.push_back(v); });
  out.flat.push_back(grad_log_std);
  grad_critic.for_each_param([&](double v) { out.flat.push_back(v); });
  for (double g : out.flat)
    if (!std::isfinite(g)) {
      out.finite = false;
      return out;
    }
  return out;
}

}  // namespace ppo_detail

// One PPO update over a finished rollout buffer: advantages are normalized
// across the whole buffer, then `update_epochs` passes of shuffled
// minibatches. Returns averaged diagnostics.
inline UpdateDiagnostics ppo_update(PolicyParameters& params, Adam& optimizer,
                                    RolloutBuffer& buffer, const LearnerConfig& cfg,
                                    Rng& shuffle_rng) {
  const std::size_t n = buffer.size();
  if (n == 0) throw std::invalid_argument("ppo_update: empty buffer");

  if (n >= 2) { // a lone sample would normalize to zero and kill its gradient
    double mean = 0.0;
    for (double a : buffer.advantages) mean += a;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double a : buffer.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    for (double& a : buffer.advantages) a = (a - mean) / (sd + 1e-8);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  UpdateDiagnostics avg;
  std::size_t n_batches = 0;
  std::vector<double> flat = ppo_detail::flatten(params);

  for (int epoch = 0; epoch < cfg.update_epochs; ++epoch) {
    for (std::size_t k = n; k > 1; --k) {
      const std::size_t j = static_cast<std::size_t>(shuffle_rng.uniform_index(k));
      std::swap(order[k - 1], order[j]);
    }
    for (std::size_t begin = 0; begin < n; begin += static_cast<std::size_t>(cfg.minibatch_size)) {
      const std::size_t end = std::min(n, begin + static_cast<std::size_t>(cfg.minibatch_size));
      const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                           order.begin() + static_cast<std::ptrdiff_t>(end));
      auto g = ppo_detail::minibatch_gradient(params, buffer, batch, cfg);
      if (!g.finite) {
        avg.aborted = true;
        return avg;
      }
      optimizer.step(flat, g.flat);
      ppo_detail::unflatten(flat, params);
      flat[params.actor.n_params()] = params.log_std; // reflect the clamp

      avg.policy_loss += g.diag.policy_loss;
      avg.value_loss += g.diag.value_loss;
      avg.entropy += g.diag.entropy;
      avg.clip_fraction += g.diag.clip_fraction;
      ++n_batches;
    }
  }
  if (n_batches > 0) {
    avg.policy_loss /= static_cast<double>(n_batches);
    avg.value_loss /= static_cast<double>(n_batches);
    avg.entropy /= static_cast<double>(n_batches);
    avg.clip_fraction /= static_cast<double>(n_batches);
  }
  return avg;
}

// Policy adapter for evaluation: deterministic mean action.
class LearnedPolicy final : public Policy {
public:
  explicit LearnedPolicy(PolicyParameters params) : params_(std::move(params)) {}

  double act(const Observation& obs) const override {
    return std::clamp(forward_actor(params_, obs).first, 0.0, 1.0);
  }

  double act_stochastic(const Observation& obs, Rng& rng) const override {
    const auto [mean, log_std] = forward_actor(params_, obs);
    return sample_action(mean, log_std, rng).action;
  }

  const PolicyParameters& parameters() const { return params_; }

private:
  PolicyParameters params_;
};

struct EpisodeLogRow {
  int episode = 0; // completion order, 1-based
  int env_id = 0;
  long steps_done = 0;
  double return_total = 0.0;     // sum of r_trad + r_deg + lambda*r_clip (unscaled)
  double return_trad_deg = 0.0;  // sum of r_trad + r_deg
  double mean_clip_magnitude_w = 0.0;
};

struct TrainResult {
  PolicyParameters params;
  std::vector<EpisodeLogRow> curve;
  std::vector<UpdateDiagnostics> updates;
  double mean_clip_magnitude_w = 0.0; // over every training step
  long total_steps = 0;
};

// Algorithm: synchronous rollouts over n_envs independent environments,
// one PPO update per rollout, until n_episodes episodes have completed.
// The policy persists across episode resets.
inline TrainResult train(std::shared_ptr<const ExogenousBundle> bundle,
                         const BatteryParams& battery, const MdpConfig& mdp,
                         const LearnerConfig& cfg) {
  cfg.validate();
  mdp.validate();

  Rng root(cfg.seed);
  Rng init_rng = root.fork(1);
  Rng sample_rng = root.fork(2);
  Rng shuffle_rng = root.fork(3);

  TrainResult result;
  result.params = PolicyParameters::make(64, init_rng, cfg);

  std::vector<Environment> envs;
  envs.reserve(static_cast<std::size_t>(cfg.n_envs));
  for (int e = 0; e < cfg.n_envs; ++e)
    envs.emplace_back(bundle, battery, mdp, root.next_u64());

  const std::size_t n_envs = static_cast<std::size_t>(cfg.n_envs);
  std::vector<Observation> obs(n_envs);
  std::vector<double> ep_return(n_envs, 0.0), ep_trad_deg(n_envs, 0.0), ep_clip(n_envs, 0.0);
  std::vector<long> ep_len(n_envs, 0);
  for (std::size_t e = 0; e < n_envs; ++e) obs[e] = envs[e].reset();

  Adam optimizer(result.params.actor.n_params() + result.params.critic.n_params() + 1,
                 cfg.learning_rate);

  const long target_steps = static_cast<long>(cfg.n_episodes) * mdp.horizon_steps;
  long steps_done = 0;
  int episodes_done = 0;
  double clip_sum = 0.0;

  // per-env stream buffers, concatenated for the update
  std::vector<RolloutBuffer> streams(n_envs);
  RolloutBuffer merged;

  while (steps_done < target_steps) {
    for (auto& s : streams) s.clear();
    std::vector<double> bootstrap(n_envs, 0.0);

    for (int step_i = 0; step_i < cfg.rollout_steps && steps_done < target_steps; ++step_i) {
      for (std::size_t e = 0; e < n_envs; ++e) {
        const auto arr = obs[e].as_array();
        std::vector<double> raw_obs(arr.begin(), arr.end());
        if (cfg.normalize_observations) result.params.normalizer.update(raw_obs);
        const std::vector<double> x =
            cfg.normalize_observations ? result.params.normalizer.normalize(raw_obs) : raw_obs;

        const double mean = result.params.actor.forward(x)[0];
        const double value = result.params.critic.forward(x)[0];
        const ActionSample a = sample_action(mean, result.params.log_std, sample_rng);

        StepOutcome out = envs[e].step(a.action);

        RolloutBuffer& s = streams[e];
        s.observations.push_back(x);
        s.raw_actions.push_back(a.raw);
        s.log_probs.push_back(a.log_prob);
        s.rewards.push_back(out.reward.total / cfg.reward_scale);
        s.values.push_back(value);
        s.dones.push_back(out.done ? 1 : 0);

        ep_return[e] += out.reward.total;
        ep_trad_deg[e] += out.reward.trading_eur + out.reward.degradation_eur;
        ep_clip[e] += out.info.clip_magnitude_w;
        clip_sum += out.info.clip_magnitude_w;
        ep_len[e] += 1;
        ++steps_done;

        if (out.done) {
          ++episodes_done;
          result.curve.push_back({episodes_done, static_cast<int>(e), steps_done, ep_return[e],
                                  ep_trad_deg[e],
                                  ep_clip[e] / static_cast<double>(std::max<long>(1, ep_len[e]))});
          ep_return[e] = ep_trad_deg[e] = ep_clip[e] = 0.0;
          ep_len[e] = 0;
          obs[e] = envs[e].reset();
        } else {
          obs[e] = out.observation;
        }
      }
    }

    merged.clear();
    for (std::size_t e = 0; e < n_envs; ++e) {
      RolloutBuffer& s = streams[e];
      if (s.size() == 0) continue;
      const auto arr_next = obs[e].as_array();
      std::vector<double> x_next(arr_next.begin(), arr_next.end());
      if (cfg.normalize_observations) x_next = result.params.normalizer.normalize(x_next);
      bootstrap[e] = result.params.critic.forward(x_next)[0];
      compute_gae(s.rewards, s.values, s.dones, bootstrap[e], cfg.gamma, cfg.gae_lambda,
                  s.advantages, s.returns);
      merged.observations.insert(merged.observations.end(), s.observations.begin(), s.observations.end());
      merged.raw_actions.insert(merged.raw_actions.end(), s.raw_actions.begin(), s.raw_actions.end());
      merged.log_probs.insert(merged.log_probs.end(), s.log_probs.begin(), s.log_probs.end());
      merged.rewards.insert(merged.rewards.end(), s.rewards.begin(), s.rewards.end());
      merged.values.insert(merged.values.end(), s.values.begin(), s.values.end());
      merged.dones.insert(merged.dones.end(), s.dones.begin(), s.dones.end());
      merged.advantages.insert(merged.advantages.end(), s.advantages.begin(), s.advantages.end());
      merged.returns.insert(merged.returns.end(), s.returns.begin(), s.returns.end());
    }
    if (merged.size() == 0) break;
    result.updates.push_back(ppo_update(result.params, optimizer, merged, cfg, shuffle_rng));
  }

  result.total_steps = steps_done;
  result.mean_clip_magnitude_w = steps_done > 0 ? clip_sum / static_cast<double>(steps_done) : 0.0;
  return result;
}

}  // namespace gridrl
