#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gridsched/learner/rollout.hpp"

namespace gridsched {

struct GaeResult {
  std::vector<double> advantages;  // raw, unstandardized
  std::vector<double> returns;     // A_t + V(s_t)
};

// Backward GAE recursion over a full buffer. `done` cuts the bootstrap, so
// episodes packed back to back stay independent.
inline GaeResult compute_gae(const RolloutBuffer& buffer, double gamma, double lambda) {
  const std::size_t n = buffer.transitions.size();
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double next_adv = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const Transition& tr = buffer.transitions[i];
    const double not_done = tr.done ? 0.0 : 1.0;
    const double next_value =
        (i + 1 < n) ? buffer.transitions[i + 1].value : buffer.bootstrap_value;
    const double delta = tr.reward + gamma * next_value * not_done - tr.value;
    next_adv = delta + gamma * lambda * not_done * next_adv;
    out.advantages[i] = next_adv;
    out.returns[i] = next_adv + tr.value;
  }
  return out;
}

// Mean 0 / std 1, with the std guarded from below. Used for the loss only.
inline std::vector<double> standardize_advantages(const std::vector<double>& adv) {
  std::vector<double> out(adv.size());
  if (adv.empty()) return out;
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= static_cast<double>(adv.size());
  const double sd = std::max(std::sqrt(var), 1e-8);
  for (std::size_t i = 0; i < adv.size(); ++i) out[i] = (adv[i] - mean) / sd;
  return out;
}

// The value-prediction-error statistic handed to schedulers.
inline double mean_abs(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += std::abs(x);
  return s / static_cast<double>(xs.size());
}

}  // namespace gridsched
