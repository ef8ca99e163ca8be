#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "gridsched/gridworld/types.hpp"

namespace gridsched {

enum class PhaseKind { Learning, Forgetting };

inline std::string_view phase_kind_name(PhaseKind k) {
  return k == PhaseKind::Learning ? "learning" : "forgetting";
}

struct PhaseRecord {
  PhaseKind kind = PhaseKind::Learning;
  TaskId trained_task = TaskId::Empty;
  TaskId monitored_task = TaskId::Empty;
  long long start_step = 0;
  long long end_step = 0;

  long long duration() const { return end_step - start_step; }
};

// Two-threshold hysteresis segmentation of a solve-rate trace. Starts in
// LEARNING at step 0; a sample >= u closes the learning phase and opens a
// forgetting phase, a sample <= l does the reverse. The unterminated final
// phase is discarded, as are zero-length phases (threshold already crossed at
// the phase's opening sample).
inline std::vector<PhaseRecord> detect_phases(
    const std::vector<std::pair<long long, double>>& trace, double u, double l) {
  std::vector<PhaseRecord> out;
  PhaseKind state = PhaseKind::Learning;
  long long phase_start = 0;
  for (const auto& [step, rate] : trace) {
    const bool crossed =
        state == PhaseKind::Learning ? rate >= u : rate <= l;
    if (!crossed) continue;
    if (step > phase_start) {
      out.push_back({state, TaskId::Empty, TaskId::Empty, phase_start, step});
    }
    state = state == PhaseKind::Learning ? PhaseKind::Forgetting : PhaseKind::Learning;
    phase_start = step;
  }
  return out;
}

// Spearman rank correlation of xs against their index order. Ties get average
// ranks; a constant series has zero rank variance and is defined as rho = 0.
inline double spearman_vs_index(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double mr = 0.0;
  for (double r : rank) mr += r;
  mr /= static_cast<double>(n);
  const double mi = (static_cast<double>(n) - 1.0) / 2.0;  // mean of 0..n-1
  double num = 0.0, varr = 0.0, vari = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dr = rank[i] - mr;
    const double di = static_cast<double>(i) - mi;
    num += dr * di;
    varr += dr * dr;
    vari += di * di;
  }
  if (varr == 0.0 || vari == 0.0) return 0.0;
  return num / std::sqrt(varr * vari);
}

// Least-squares slope of xs against index 0..n-1.
inline double slope_vs_index(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double mi = (static_cast<double>(n) - 1.0) / 2.0;
  double mx = 0.0;
  for (double x : xs) mx += x;
  mx /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double di = static_cast<double>(i) - mi;
    num += di * (xs[i] - mx);
    den += di * di;
  }
  return num / den;
}

enum class ForgettingLabel { Decreasing, Periodic, Inconclusive };

inline std::string_view forgetting_label_name(ForgettingLabel l) {
  switch (l) {
    case ForgettingLabel::Decreasing: return "decreasing";
    case ForgettingLabel::Periodic: return "periodic";
    case ForgettingLabel::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct ForgettingClass {
  ForgettingLabel label = ForgettingLabel::Inconclusive;
  double spearman_rho = 0.0;
  double slope = 0.0;
  int n_cycles = 0;
};

struct ClassifyConfig {
  double rho_decreasing = 0.6;  // minimum rank correlation for "decreasing forgetting"
  double rho_periodic = 0.3;    // |rho| below this means no trend: periodic
  int min_cycles = 3;
};

// Labels a run from its forgetting-phase durations in cycle order. Durations
// growing with cycle index mean the task is forgotten ever more slowly --
// the "decreasing forgetting" regime; no trend at all reads as periodic.
inline ForgettingClass classify_forgetting(const std::vector<double>& durations,
                                           const ClassifyConfig& cfg = {}) {
  ForgettingClass out;
  out.n_cycles = static_cast<int>(durations.size());
  if (out.n_cycles < cfg.min_cycles) return out;
  out.spearman_rho = spearman_vs_index(durations);
  out.slope = slope_vs_index(durations);
  if (out.spearman_rho >= cfg.rho_decreasing && out.slope > 0.0) {
    out.label = ForgettingLabel::Decreasing;
  } else if (std::abs(out.spearman_rho) < cfg.rho_periodic) {
    out.label = ForgettingLabel::Periodic;
  }
  return out;
}

}  // namespace gridsched
