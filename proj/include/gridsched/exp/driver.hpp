#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridsched/learner/evaluate.hpp"
#include "gridsched/learner/gae.hpp"
#include "gridsched/learner/ppo.hpp"
#include "gridsched/learner/rollout.hpp"

namespace gridsched {

// Owns one learner's full training state for an experiment run. All
// randomness flows from named streams derived from the master seed, so a run
// is a pure function of (config, seed); evaluation streams are keyed per
// (task, eval index) and never touch the training streams.
class PpoDriver {
 public:
  PpoDriver(const TrainConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        seed_(seed),
        env_rng_(derive_seed(seed, "train_env", 0)),
        act_rng_(derive_seed(seed, "train_act", 0)),
        upd_rng_(derive_seed(seed, "train_upd", 0)) {
    Rng init_rng(derive_seed(seed, "init", 0));
    params_ = init_params(init_rng);
  }

  // One rollout + one PPO update on `task`; also refreshes the value-error
  // statistic (mean |raw GAE|) the schedulers consume.
  RolloutStats train_one_rollout(TaskId task) {
    RolloutResult r = collect_rollout(params_, task, cfg_.rollout_length, env_rng_, act_rng_);
    steps_ += r.stats.steps;
    const GaeResult g = compute_gae(r.buffer, cfg_.gamma, cfg_.gae_lambda);
    last_value_error_ = mean_abs(g.advantages);
    ppo_update(params_, adam_, r.buffer, g.advantages, g.returns, cfg_, upd_rng_);
    return std::move(r.stats);
  }

  // Trains on `task` in whole rollouts until the global step counter reaches
  // `target_step`; returns the (possibly overshot) counter.
  long long train_until(TaskId task, long long target_step) {
    while (steps_ < target_step) train_one_rollout(task);
    return steps_;
  }

  std::vector<EvalSnapshot> evaluate(const std::vector<TaskId>& tasks, long long step,
                                     int n_episodes) {
    std::vector<EvalSnapshot> out;
    out.reserve(tasks.size());
    for (TaskId t : tasks) {
      Rng ev(derive_seed(seed_, "eval_" + std::string(task_name(t)), eval_index_));
      out.push_back(evaluate_policy(params_, t, n_episodes, ev, step, cfg_.stochastic_eval));
    }
    ++eval_index_;
    return out;
  }

  long long steps() const { return steps_; }
  double last_value_error() const { return last_value_error_; }
  const MlpParams& params() const { return params_; }

 private:
  TrainConfig cfg_;
  std::uint64_t seed_;
  MlpParams params_;
  AdamState adam_;
  Rng env_rng_;
  Rng act_rng_;
  Rng upd_rng_;
  long long steps_ = 0;
  double last_value_error_ = 0.0;
  std::uint64_t eval_index_ = 0;
};

}  // namespace gridsched
