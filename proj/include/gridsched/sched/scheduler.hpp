#pragma once

#include "gridsched/sched/leitner.hpp"
#include "gridsched/sched/plr.hpp"
#include "gridsched/sched/sm2.hpp"
#include "gridsched/sched/types.hpp"

namespace gridsched {

// Uniform front door for the four strategies: feed outcomes in, get a
// sampling distribution out. Only the active method's state is consulted.
class Scheduler {
 public:
  explicit Scheduler(Method method, int task_count, PlrConfig plr_cfg = {})
      : method_(method),
        task_count_(task_count),
        leitner_(task_count),
        sm2_(task_count),
        plr_(task_count, plr_cfg) {}

  void report(const Outcome& outcome) {
    switch (method_) {
      case Method::Leitner:
        leitner_update(leitner_, outcome);
        break;
      case Method::Supermemo:
        sm2_update(sm2_, outcome, outcome.round);
        break;
      case Method::Plr:
        plr_update(plr_, outcome);
        break;
      case Method::Random:
        break;
    }
  }

  SampleDistribution distribution(int current_round) const {
    switch (method_) {
      case Method::Leitner:
        return leitner_distribution(leitner_);
      case Method::Supermemo:
        return sm2_distribution(sm2_, current_round);
      case Method::Plr:
        return plr_distribution(plr_, current_round);
      case Method::Random:
        return random_distribution(task_count_);
    }
    throw std::logic_error("bad scheduler method");
  }

  Method method() const { return method_; }
  int task_count() const { return task_count_; }
  const LeitnerState& leitner() const { return leitner_; }
  const Sm2State& sm2() const { return sm2_; }
  const PlrState& plr() const { return plr_; }

 private:
  Method method_;
  int task_count_;
  LeitnerState leitner_;
  Sm2State sm2_;
  PlrState plr_;
};

}  // namespace gridsched
