#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "gridsched/exp/curriculum.hpp"

namespace gridsched {

// Linear-interpolation quantile on a copy of xs (same convention as the
// common statistics packages' default).
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile of empty set");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= xs.size()) return xs.back();
  const double frac = h - static_cast<double>(lo);
  return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

inline double median(const std::vector<double>& xs) { return quantile(xs, 0.5); }
inline double iqr(const std::vector<double>& xs) {
  return quantile(xs, 0.75) - quantile(xs, 0.25);
}

struct MethodStats {
  Method method = Method::Random;
  int n_runs = 0;
  double median_max = 0.0;
  double iqr_max = 0.0;
  double median_final = 0.0;
  double iqr_final = 0.0;
};

struct NormalizeReport {
  std::vector<MethodStats> methods;  // in first-appearance order
};

// Per-task reference normalization across a pool of runs: ref(t) is the best
// mean reward any pooled run ever achieved on task t; a run's score at an
// eval point is the mean over tasks of mean_reward / ref. Fills each run's
// normalized_max / normalized_final and aggregates median + IQR per method.
// With all_methods=false, every method is normalized only against its own runs.
inline NormalizeReport normalize_results(std::vector<CurriculumResult>& runs,
                                         bool all_methods = true) {
  if (runs.empty()) throw std::invalid_argument("normalize_results: no runs");
  const CurriculumResult& first = runs.front();
  for (const CurriculumResult& r : runs) {
    if (r.tasks != first.tasks || r.eval_every_rounds != first.eval_every_rounds ||
        r.evals.size() != first.evals.size()) {
      throw std::invalid_argument("normalize_results: incompatible eval cadences");
    }
  }
  const std::size_t n_tasks = first.tasks.size();

  auto reference = [&](const std::vector<const CurriculumResult*>& pool) {
    std::vector<double> ref(n_tasks, 0.0);
    for (const CurriculumResult* r : pool) {
      for (const EvalMatrixRow& row : r->evals) {
        for (std::size_t t = 0; t < n_tasks; ++t) {
          ref[t] = std::max(ref[t], row.cells[t].mean_reward);
        }
      }
    }
    for (double& x : ref) x = std::max(x, 1e-8);
    return ref;
  };

  auto apply = [&](CurriculumResult& r, const std::vector<double>& ref) {
    r.normalized_max = 0.0;
    r.normalized_final = 0.0;
    for (std::size_t e = 0; e < r.evals.size(); ++e) {
      double score = 0.0;
      for (std::size_t t = 0; t < n_tasks; ++t) {
        score += r.evals[e].cells[t].mean_reward / ref[t];
      }
      score /= static_cast<double>(n_tasks);
      r.normalized_max = std::max(r.normalized_max, score);
      if (e + 1 == r.evals.size()) r.normalized_final = score;
    }
  };

  if (all_methods) {
    std::vector<const CurriculumResult*> pool;
    for (const CurriculumResult& r : runs) pool.push_back(&r);
    const std::vector<double> ref = reference(pool);
    for (CurriculumResult& r : runs) apply(r, ref);
  } else {
    for (Method m : {Method::Leitner, Method::Supermemo, Method::Plr, Method::Random}) {
      std::vector<const CurriculumResult*> pool;
      for (const CurriculumResult& r : runs) {
        if (r.method == m) pool.push_back(&r);
      }
      if (pool.empty()) continue;
      const std::vector<double> ref = reference(pool);
      for (CurriculumResult& r : runs) {
        if (r.method == m) apply(r, ref);
      }
    }
  }

  NormalizeReport report;
  for (const CurriculumResult& r : runs) {
    MethodStats* slot = nullptr;
    for (MethodStats& s : report.methods) {
      if (s.method == r.method) slot = &s;
    }
    if (!slot) {
      report.methods.push_back(MethodStats{r.method});
      slot = &report.methods.back();
    }
    ++slot->n_runs;
  }
  for (MethodStats& s : report.methods) {
    std::vector<double> maxes, finals;
    for (const CurriculumResult& r : runs) {
      if (r.method == s.method) {
        maxes.push_back(r.normalized_max);
        finals.push_back(r.normalized_final);
      }
    }
    s.median_max = median(maxes);
    s.iqr_max = iqr(maxes);
    s.median_final = median(finals);
    s.iqr_final = iqr(finals);
  }
  return report;
}

}  // namespace gridsched
