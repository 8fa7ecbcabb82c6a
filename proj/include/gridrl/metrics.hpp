#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridrl/env.hpp"
#include "gridrl/stats.hpp"

// Evaluation metrics: cumulative empirical rewards averaged over validation
// profiles, per-component gaps against a baseline, distribution summaries
// and the action-vs-demand histogram. The reported metric sums only the
// trading and degradation components; the training-time clip shaping is
// tracked separately as a diagnostic.

namespace gridrl {

inline std::vector<double> trading_series(const Trajectory& traj) {
  std::vector<double> out(traj.size());
  for (std::size_t t = 0; t < traj.size(); ++t) out[t] = traj[t].reward.trading_eur;
  return out;
}

inline std::vector<double> degradation_series(const Trajectory& traj) {
  std::vector<double> out(traj.size());
  for (std::size_t t = 0; t < traj.size(); ++t) out[t] = traj[t].reward.degradation_eur;
  return out;
}

// Mean over profiles of the running sum of one per-step component.
inline std::vector<double> cumulative_series(const std::vector<std::vector<double>>& per_profile) {
  if (per_profile.empty()) throw std::invalid_argument("cumulative_series: no profiles");
  const std::size_t horizon = per_profile.front().size();
  for (const auto& p : per_profile)
    if (p.size() != horizon) throw std::invalid_argument("cumulative_series: horizon mismatch");
  std::vector<double> out(horizon, 0.0);
  for (const auto& p : per_profile) {
    double running = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      running += p[t];
      out[t] += running;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(per_profile.size());
  for (double& v : out) v *= inv_n;
  return out;
}

// Average over profiles of the cumulative trading+degradation reward after
// t steps (1-based).
inline double cumulative_reward(const std::vector<Trajectory>& trajectories, std::size_t t) {
  if (trajectories.empty()) throw std::invalid_argument("cumulative_reward: no trajectories");
  double sum = 0.0;
  for (const auto& traj : trajectories) {
    if (t > traj.size()) throw std::invalid_argument("cumulative_reward: t beyond horizon");
    for (std::size_t h = 0; h < t; ++h)
      sum += traj[h].reward.trading_eur + traj[h].reward.degradation_eur;
  }
  return sum / static_cast<double>(trajectories.size());
}

// Everything the reports need about one method's evaluation run.
struct MethodEvaluation {
  std::string method;
  std::vector<double> rhat_trad;  // cumulative, averaged over profiles
  std::vector<double> rhat_deg;
  std::vector<double> rhat;       // rhat_trad + rhat_deg, elementwise by construction
  std::vector<double> end_returns;        // per profile, trading+degradation
  std::vector<double> end_returns_trad;   // per profile
  std::vector<double> end_returns_deg;    // per profile
  double mean_clip_magnitude_w = 0.0;     // diagnostic, not part of the metric
  double sum_clip_penalty_w = 0.0;        // mean over profiles of summed r_clip
};

inline MethodEvaluation evaluate_trajectories(const std::string& method,
                                              const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) throw std::invalid_argument("evaluate_trajectories: no trajectories");
  MethodEvaluation ev;
  ev.method = method;

  std::vector<std::vector<double>> trad, deg;
  trad.reserve(trajectories.size());
  deg.reserve(trajectories.size());
  long n_steps = 0;
  for (const auto& traj : trajectories) {
    trad.push_back(trading_series(traj));
    deg.push_back(degradation_series(traj));
    double sum_t = 0.0, sum_d = 0.0;
    for (const auto& rec : traj) {
      sum_t += rec.reward.trading_eur;
      sum_d += rec.reward.degradation_eur;
      ev.mean_clip_magnitude_w += rec.info.clip_magnitude_w;
      ev.sum_clip_penalty_w += rec.reward.clip_penalty_w;
      ++n_steps;
    }
    ev.end_returns_trad.push_back(sum_t);
    ev.end_returns_deg.push_back(sum_d);
    ev.end_returns.push_back(sum_t + sum_d);
  }
  ev.rhat_trad = cumulative_series(trad);
  ev.rhat_deg = cumulative_series(deg);
  ev.rhat.resize(ev.rhat_trad.size());
  for (std::size_t t = 0; t < ev.rhat.size(); ++t) ev.rhat[t] = ev.rhat_trad[t] + ev.rhat_deg[t];
  if (n_steps > 0) ev.mean_clip_magnitude_w /= static_cast<double>(n_steps);
  ev.sum_clip_penalty_w /= static_cast<double>(trajectories.size());
  return ev;
}

// Elementwise gap of cumulative component series: method minus baseline.
inline std::vector<double> component_gap(const std::vector<double>& method_series,
                                         const std::vector<double>& baseline_series) {
  if (method_series.size() != baseline_series.size())
    throw std::invalid_argument("component_gap: horizon mismatch");
  std::vector<double> out(method_series.size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = method_series[t] - baseline_series[t];
  return out;
}

// 2-D histogram of (action, demand). Cells hold raw counts; the log view is
// taken at output time so empty cells stay distinguishable.
struct ActionDemandHistogram {
  std::size_t action_bins = 0;
  std::size_t demand_bins = 0;
  double demand_lo = 0.0, demand_hi = 0.0;
  std::vector<long> counts; // row-major [action][demand]

  long count_at(std::size_t ai, std::size_t di) const { return counts[ai * demand_bins + di]; }
  bool empty_cell(std::size_t ai, std::size_t di) const { return count_at(ai, di) == 0; }
  double log_count(std::size_t ai, std::size_t di) const {
    return std::log(static_cast<double>(count_at(ai, di)));
  }
};

inline ActionDemandHistogram action_demand_histogram(const std::vector<double>& actions,
                                                     const std::vector<double>& demands_w,
                                                     std::size_t action_bins = 21,
                                                     std::size_t demand_bins = 20) {
  if (action_bins < 1 || demand_bins < 1)
    throw std::invalid_argument("action_demand_histogram: need at least one bin per axis");
  if (actions.size() != demands_w.size())
    throw std::invalid_argument("action_demand_histogram: length mismatch");

  ActionDemandHistogram h;
  h.action_bins = action_bins;
  h.demand_bins = demand_bins;
  h.counts.assign(action_bins * demand_bins, 0);
  if (actions.empty()) return h;

  h.demand_lo = *std::min_element(demands_w.begin(), demands_w.end());
  h.demand_hi = *std::max_element(demands_w.begin(), demands_w.end());
  const double demand_span = h.demand_hi > h.demand_lo ? h.demand_hi - h.demand_lo : 1.0;

  for (std::size_t k = 0; k < actions.size(); ++k) {
    const double a = std::clamp(actions[k], 0.0, 1.0);
    std::size_t ai = static_cast<std::size_t>(a * static_cast<double>(action_bins));
    if (ai >= action_bins) ai = action_bins - 1;
    const double dn = (demands_w[k] - h.demand_lo) / demand_span;
    std::size_t di = static_cast<std::size_t>(dn * static_cast<double>(demand_bins));
    if (di >= demand_bins) di = demand_bins - 1;
    ++h.counts[ai * demand_bins + di];
  }
  return h;
}

}  // namespace gridrl
