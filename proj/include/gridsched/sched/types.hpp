#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "gridsched/common/rng.hpp"

namespace gridsched {

// One scheduler round = one rollout + one update on the selected task.
struct Outcome {
  int task = 0;                // index into the scheduled task set
  double episode_reward = 0.0; // mean reward of episodes in the rollout
  bool solved = false;         // any episode in the rollout succeeded
  double value_error = 0.0;    // mean |raw GAE| over the rollout
  int round = 0;
};

struct SampleDistribution {
  std::vector<double> p;  // indexed like the scheduled task set

  double sum() const {
    double s = 0.0;
    for (double x : p) s += x;
    return s;
  }
};

inline void check_distribution(const SampleDistribution& d) {
  if (d.p.empty()) throw std::invalid_argument("empty distribution");
  for (double x : d.p) {
    if (!(x >= 0.0)) throw std::invalid_argument("negative probability");
  }
  if (std::abs(d.sum() - 1.0) > 1e-9) throw std::invalid_argument("distribution does not sum to 1");
}

inline SampleDistribution normalized(std::vector<double> weights) {
  double s = 0.0;
  for (double w : weights) s += w;
  for (double& w : weights) w /= s;
  return SampleDistribution{std::move(weights)};
}

inline SampleDistribution random_distribution(int task_count) {
  if (task_count < 1) throw std::invalid_argument("task_count must be >= 1");
  return SampleDistribution{std::vector<double>(
      static_cast<std::size_t>(task_count), 1.0 / static_cast<double>(task_count))};
}

// Inverse-CDF draw over tasks in fixed registry order.
inline int select_task(const SampleDistribution& dist, Rng& rng) {
  check_distribution(dist);
  return static_cast<int>(rng.sample_index(dist.p));
}

enum class Method { Leitner, Supermemo, Plr, Random };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::Leitner: return "leitner";
    case Method::Supermemo: return "supermemo";
    case Method::Plr: return "plr";
    case Method::Random: return "random";
  }
  throw std::invalid_argument("bad method");
}

inline Method method_from_name(std::string_view name) {
  for (Method m : {Method::Leitner, Method::Supermemo, Method::Plr, Method::Random}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method: " + std::string(name));
}

}  // namespace gridsched
