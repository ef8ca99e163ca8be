#pragma once

#include <atomic>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <thread>

#include "gridsched/cli/config.hpp"
#include "gridsched/cli/format.hpp"
#include "gridsched/cli/svg.hpp"
#include "gridsched/exp/crosstrain.hpp"
#include "gridsched/exp/normalize.hpp"

namespace gridsched {

namespace fs = std::filesystem;

// Write-then-rename so readers never observe a half-written file.
inline void write_text_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunUnitStatus {
  std::string run_id;
  int seed = 0;
  bool ok = false;
  std::string error;
};

// Run fn(0..n-1) on up to `jobs` threads. Units must be independent; results
// land in pre-sized slots so output order never depends on scheduling.
template <class Fn>
void for_each_unit(std::size_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

namespace detail {

struct CsvWriter {
  std::string buf;
  void row(std::initializer_list<std::string> fields) {
    bool first = true;
    for (const std::string& f : fields) {
      if (!first) buf += ',';
      buf += f;
      first = false;
    }
    buf += '\n';
  }
};

inline std::string fmt(double v) { return format_float(v); }
inline std::string fmt(long long v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }

inline void append_trace_rows(CsvWriter& w, const std::string& run_id, int seed,
                              const std::vector<TraceRow>& trace) {
  for (const TraceRow& r : trace) {
    w.row({run_id, fmt(seed), fmt(r.step), std::string(task_name(r.trained)),
           std::string(task_name(r.eval_task)), fmt(r.solve_rate), fmt(r.mean_reward)});
  }
}

inline void append_phase_rows(CsvWriter& w, const std::string& run_id, int seed,
                              const std::vector<PhaseRecord>& phases) {
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const PhaseRecord& p = phases[i];
    w.row({run_id, fmt(seed), fmt(static_cast<int>(i)), std::string(phase_kind_name(p.kind)),
           std::string(task_name(p.trained_task)), std::string(task_name(p.monitored_task)),
           fmt(p.start_step), fmt(p.end_step)});
  }
}

inline nlohmann::json classification_json(const ForgettingClass& c) {
  return {{"label", std::string(forgetting_label_name(c.label))},
          {"spearman_rho", c.spearman_rho},
          {"slope", c.slope},
          {"n_cycles", c.n_cycles}};
}

inline SvgSeries trace_series(const std::vector<TraceRow>& trace, TaskId task) {
  SvgSeries s;
  s.label = std::string(task_name(task));
  for (const TraceRow& r : trace) {
    if (r.eval_task == task) s.points.emplace_back(static_cast<double>(r.step), r.solve_rate);
  }
  return s;
}

}  // namespace detail

struct RunOutputs {
  std::map<std::string, std::string> files;  // relative path -> content
  nlohmann::json summary;
  std::vector<RunUnitStatus> statuses;
};

// ---- forgetting ----------------------------------------------------------

inline RunOutputs run_forgetting_units(const RunConfig& cfg) {
  const std::size_t n = cfg.seeds.size();
  std::vector<AlternationResult> results(n);
  std::vector<RunUnitStatus> statuses(n);
  for_each_unit(n, cfg.jobs, [&](std::size_t i) {
    const int seed = cfg.seeds[i];
    statuses[i].seed = seed;
    statuses[i].run_id = "forgetting-s" + std::to_string(seed);
    try {
      results[i] = run_forgetting_alternation(cfg.alternation, cfg.train,
                                              static_cast<std::uint64_t>(seed));
      statuses[i].ok = true;
    } catch (const std::exception& e) {
      statuses[i].error = e.what();
    }
  });

  RunOutputs out;
  detail::CsvWriter trace, phases;
  trace.row({"run_id", "seed", "step", "trained_task", "eval_task", "solve_rate", "mean_reward"});
  phases.row({"run_id", "seed", "phase_idx", "kind", "trained_task", "monitored_task",
              "start_step", "end_step"});
  nlohmann::json runs = nlohmann::json::array();
  std::map<std::string, int> tally = {{"decreasing", 0}, {"periodic", 0}, {"inconclusive", 0}};
  for (std::size_t i = 0; i < n; ++i) {
    if (!statuses[i].ok) continue;
    const AlternationResult& r = results[i];
    detail::append_trace_rows(trace, statuses[i].run_id, cfg.seeds[i], r.trace);
    detail::append_phase_rows(phases, statuses[i].run_id, cfg.seeds[i], r.phases);
    tally[std::string(forgetting_label_name(r.classification.label))] += 1;
    runs.push_back({{"run_id", statuses[i].run_id},
                    {"seed", cfg.seeds[i]},
                    {"switches", r.switches},
                    {"warning_no_switch", r.warning_no_switch},
                    {"phases", r.phases.size()},
                    {"forgetting_durations", forgetting_durations(r.phases)},
                    {"total_steps", r.trace.empty() ? 0LL : r.trace.back().step},
                    {"classification", detail::classification_json(r.classification)}});
    if (cfg.emit_svg) {
      const std::vector<SvgSeries> series = {
          detail::trace_series(r.trace, cfg.alternation.task_a),
          detail::trace_series(r.trace, cfg.alternation.task_b)};
      out.files["figures/" + statuses[i].run_id + ".svg"] =
          emit_svg(series, statuses[i].run_id + " solve rates");
    }
  }
  out.files["eval_trace.csv"] = std::move(trace.buf);
  out.files["phases.csv"] = std::move(phases.buf);
  out.summary = {{"experiment", "forgetting"}, {"runs", runs}, {"tally", tally}};
  out.statuses = std::move(statuses);
  return out;
}

// ---- crosstrain ----------------------------------------------------------

inline RunOutputs run_crosstrain_units(const RunConfig& cfg) {
  struct Unit {
    CrosstrainSpec spec;
    int seed = 0;
  };
  std::vector<Unit> units;
  for (const CrosstrainSpec& spec : cfg.pairs) {
    for (int seed : cfg.seeds) units.push_back({spec, seed});
  }
  const std::size_t n = units.size();
  std::vector<CrosstrainResult> results(n);
  std::vector<RunUnitStatus> statuses(n);
  for_each_unit(n, cfg.jobs, [&](std::size_t i) {
    const Unit& u = units[i];
    statuses[i].seed = u.seed;
    statuses[i].run_id = "crosstrain-" + std::string(task_name(u.spec.trained)) + "-s" +
                         std::to_string(u.seed);
    try {
      results[i] = run_crosstrain(u.spec.trained, u.spec.buddy, u.spec.partner, cfg.alternation,
                                  cfg.train, static_cast<std::uint64_t>(u.seed));
      statuses[i].ok = true;
    } catch (const std::exception& e) {
      statuses[i].error = e.what();
    }
  });

  RunOutputs out;
  detail::CsvWriter trace, phases;
  trace.row({"run_id", "seed", "step", "trained_task", "eval_task", "solve_rate", "mean_reward"});
  phases.row({"run_id", "seed", "phase_idx", "kind", "trained_task", "monitored_task",
              "start_step", "end_step"});
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (!statuses[i].ok) continue;
    const CrosstrainResult& r = results[i];
    detail::append_trace_rows(trace, statuses[i].run_id, units[i].seed, r.alternation.trace);
    detail::append_phase_rows(phases, statuses[i].run_id, units[i].seed, r.alternation.phases);
    const std::optional<double> auc = partner_auc(r);
    nlohmann::json entry = {{"run_id", statuses[i].run_id},
                            {"seed", units[i].seed},
                            {"trained", std::string(task_name(r.trained))},
                            {"buddy", std::string(task_name(r.buddy))},
                            {"partner", std::string(task_name(r.partner))},
                            {"switches", r.alternation.switches},
                            {"phases", r.alternation.phases.size()}};
    entry["partner_auc"] = auc ? nlohmann::json(*auc) : nlohmann::json(nullptr);
    runs.push_back(entry);
    if (cfg.emit_svg) {
      const std::vector<SvgSeries> series = {
          detail::trace_series(r.alternation.trace, r.trained),
          detail::trace_series(r.alternation.trace, r.buddy),
          detail::trace_series(r.alternation.trace, r.partner)};
      out.files["figures/" + statuses[i].run_id + ".svg"] =
          emit_svg(series, statuses[i].run_id + " solve rates");
    }
  }

  // Pair up mirrored legs (trained=x, partner=y) with (trained=y, partner=x)
  // and report the per-seed transfer asymmetry for each such pair.
  nlohmann::json asymmetries = nlohmann::json::array();
  std::set<std::pair<int, int>> done;
  for (std::size_t a = 0; a < cfg.pairs.size(); ++a) {
    for (std::size_t b = 0; b < cfg.pairs.size(); ++b) {
      if (a == b) continue;
      const CrosstrainSpec& px = cfg.pairs[a];
      const CrosstrainSpec& py = cfg.pairs[b];
      if (px.trained != py.partner || px.partner != py.trained || px.buddy != py.buddy) continue;
      const auto key = std::minmax(static_cast<int>(a), static_cast<int>(b));
      if (!done.insert(key).second) continue;
      nlohmann::json per_seed = nlohmann::json::array();
      double sum = 0.0;
      int count = 0;
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
        const std::size_t ix = a * cfg.seeds.size() + s;
        const std::size_t iy = b * cfg.seeds.size() + s;
        if (!statuses[ix].ok || !statuses[iy].ok) {
          per_seed.push_back(nullptr);
          continue;
        }
        const std::optional<double> asym = transfer_asymmetry(results[ix], results[iy]);
        if (asym) {
          per_seed.push_back(*asym);
          sum += *asym;
          ++count;
        } else {
          per_seed.push_back(nullptr);
        }
      }
      nlohmann::json entry = {{"task_x", std::string(task_name(px.trained))},
                              {"task_y", std::string(task_name(px.partner))},
                              {"per_seed", per_seed},
                              {"n", count}};
      entry["mean"] = count > 0 ? nlohmann::json(sum / count) : nlohmann::json(nullptr);
      asymmetries.push_back(entry);
    }
  }

  out.files["eval_trace.csv"] = std::move(trace.buf);
  out.files["phases.csv"] = std::move(phases.buf);
  out.summary = {{"experiment", "crosstrain"}, {"runs", runs}, {"asymmetries", asymmetries}};
  out.statuses = std::move(statuses);
  return out;
}

// ---- curriculum ----------------------------------------------------------

inline RunOutputs run_curriculum_units(const RunConfig& cfg) {
  struct Unit {
    Method method = Method::Random;
    int seed = 0;
  };
  std::vector<Unit> units;
  for (Method m : cfg.methods) {
    for (int seed : cfg.seeds) units.push_back({m, seed});
  }
  const std::size_t n = units.size();
  std::vector<CurriculumResult> results(n);
  std::vector<RunUnitStatus> statuses(n);
  for_each_unit(n, cfg.jobs, [&](std::size_t i) {
    const Unit& u = units[i];
    statuses[i].seed = u.seed;
    statuses[i].run_id =
        "curriculum-" + std::string(method_name(u.method)) + "-s" + std::to_string(u.seed);
    try {
      results[i] = run_curriculum(u.method, cfg.train, cfg.schedule,
                                  static_cast<std::uint64_t>(u.seed));
      statuses[i].ok = true;
    } catch (const std::exception& e) {
      statuses[i].error = e.what();
    }
  });

  std::vector<CurriculumResult> completed;
  std::vector<std::size_t> completed_index;
  for (std::size_t i = 0; i < n; ++i) {
    if (statuses[i].ok) {
      completed.push_back(std::move(results[i]));
      completed_index.push_back(i);
    }
  }
  NormalizeReport report;
  if (!completed.empty()) report = normalize_results(completed);

  RunOutputs out;
  detail::CsvWriter trace, selections;
  trace.row({"run_id", "seed", "step", "trained_task", "eval_task", "solve_rate", "mean_reward"});
  selections.row({"run_id", "seed", "round", "method", "selected_task", "episode_reward",
                  "solved", "value_error", "probability_of_selected"});
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t c = 0; c < completed.size(); ++c) {
    const CurriculumResult& r = completed[c];
    const RunUnitStatus& st = statuses[completed_index[c]];
    const std::string method = std::string(method_name(r.method));
    for (const SelectionRow& s : r.selections) {
      selections.row({st.run_id, detail::fmt(st.seed), detail::fmt(s.round), method,
                      std::string(task_name(s.task)), detail::fmt(s.episode_reward),
                      s.solved ? "1" : "0", detail::fmt(s.value_error),
                      detail::fmt(s.probability)});
    }
    std::vector<long long> counts(r.tasks.size(), 0);
    for (const SelectionRow& s : r.selections) counts[s.task_index] += 1;
    for (const EvalMatrixRow& em : r.evals) {
      // the task trained when this evaluation ran = last selection before it
      const TaskId trained = r.selections[em.round - 1].task;
      for (std::size_t k = 0; k < r.tasks.size(); ++k) {
        trace.row({st.run_id, detail::fmt(st.seed), detail::fmt(em.step),
                   std::string(task_name(trained)), std::string(task_name(r.tasks[k])),
                   detail::fmt(em.cells[k].solve_rate), detail::fmt(em.cells[k].mean_reward)});
      }
    }
    double final_solve = 0.0, final_reward = 0.0;
    if (!r.evals.empty()) {
      for (const EvalCell& cell : r.evals.back().cells) {
        final_solve += cell.solve_rate;
        final_reward += cell.mean_reward;
      }
      final_solve /= static_cast<double>(r.tasks.size());
      final_reward /= static_cast<double>(r.tasks.size());
    }
    runs.push_back({{"run_id", st.run_id},
                    {"seed", st.seed},
                    {"method", method},
                    {"normalized_max", r.normalized_max},
                    {"normalized_final", r.normalized_final},
                    {"final_mean_solve", final_solve},
                    {"final_mean_reward", final_reward},
                    {"selection_counts", counts}});
    if (cfg.emit_svg) {
      SvgSeries solve, reward;
      solve.label = "mean solve rate";
      reward.label = "mean reward";
      for (const EvalMatrixRow& em : r.evals) {
        double s = 0.0, w = 0.0;
        for (const EvalCell& cell : em.cells) {
          s += cell.solve_rate;
          w += cell.mean_reward;
        }
        const double x = static_cast<double>(em.step);
        solve.points.emplace_back(x, s / static_cast<double>(r.tasks.size()));
        reward.points.emplace_back(x, w / static_cast<double>(r.tasks.size()));
      }
      out.files["figures/" + st.run_id + ".svg"] =
          emit_svg({solve, reward}, st.run_id + " aggregate performance");
    }
  }
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodStats& m : report.methods) {
    methods.push_back({{"method", std::string(method_name(m.method))},
                       {"n_runs", m.n_runs},
                       {"median_max", m.median_max},
                       {"iqr_max", m.iqr_max},
                       {"median_final", m.median_final},
                       {"iqr_final", m.iqr_final}});
  }

  out.files["eval_trace.csv"] = std::move(trace.buf);
  out.files["selections.csv"] = std::move(selections.buf);
  out.summary = {{"experiment", "curriculum"}, {"runs", runs}, {"methods", methods}};
  out.statuses = std::move(statuses);
  return out;
}

// ---- entry point ---------------------------------------------------------

inline int cmd_run(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);

  RunOutputs out;
  switch (cfg.experiment) {
    case ExperimentKind::Forgetting: out = run_forgetting_units(cfg); break;
    case ExperimentKind::Crosstrain: out = run_crosstrain_units(cfg); break;
    case ExperimentKind::Curriculum: out = run_curriculum_units(cfg); break;
  }

  const nlohmann::json config_json = effective_config_json(cfg);
  out.files["config.json"] = config_json.dump(2) + "\n";
  out.files["summary.json"] = out.summary.dump(2) + "\n";

  bool all_ok = true;
  nlohmann::json run_statuses = nlohmann::json::array();
  for (const RunUnitStatus& st : out.statuses) {
    nlohmann::json entry = {{"run_id", st.run_id},
                            {"seed", st.seed},
                            {"status", st.ok ? "completed" : "failed"}};
    if (!st.ok) {
      entry["error"] = st.error;
      all_ok = false;
    }
    run_statuses.push_back(entry);
  }

  std::vector<std::string> file_list;
  for (const auto& [rel, _] : out.files) file_list.push_back(rel);
  file_list.push_back("manifest.json");
  std::sort(file_list.begin(), file_list.end());

  // Hash the canonical (sorted-key) dump of the effective config so the
  // manifest pins exactly what was run.
  nlohmann::json manifest = {{"tool", "gridsched"},
                             {"experiment", std::string(experiment_name(cfg.experiment))},
                             {"config_hash", hash_hex(fnv1a(config_json.dump()))},
                             {"created_utc", utc_timestamp()},
                             {"runs", run_statuses},
                             {"files", file_list}};

  for (const auto& [rel, content] : out.files) {
    const fs::path path = out_dir / rel;
    fs::create_directories(path.parent_path());
    write_text_atomic(path, content);
  }
  write_text_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return all_ok ? 0 : 1;
}

}  // namespace gridsched
