#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gridsched/cli/run.hpp"

namespace gridsched {

struct ReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CadenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(path.string() + ": " + e.what());
  }
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw ReportError("missing CSV column '" + name + "'");
  }
};

// Fields never contain commas or quotes, so a plain split suffices.
inline Csv read_csv(const fs::path& path) {
  Csv csv;
  std::istringstream in(read_text(path));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      fields.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (first) {
      csv.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != csv.header.size()) {
        throw ReportError(path.string() + ": ragged CSV row");
      }
      csv.rows.push_back(std::move(fields));
    }
  }
  return csv;
}

}  // namespace detail

struct LoadedDir {
  fs::path dir;
  std::string experiment;
  nlohmann::json config;
  nlohmann::json summary;
};

inline LoadedDir load_result_dir(const fs::path& dir) {
  LoadedDir d;
  d.dir = dir;
  const nlohmann::json manifest = detail::read_json(dir / "manifest.json");
  if (!manifest.contains("experiment")) {
    throw ReportError(dir.string() + ": manifest has no experiment field");
  }
  d.experiment = manifest.at("experiment").get<std::string>();
  d.config = detail::read_json(dir / "config.json");
  d.summary = detail::read_json(dir / "summary.json");
  return d;
}

// Rebuild per-run curriculum eval matrices from eval_trace.csv so pooled
// normalization can be recomputed across directories.
inline std::vector<CurriculumResult> load_curriculum_runs(const LoadedDir& d) {
  std::vector<TaskId> tasks;
  for (const auto& name : d.config.at("curriculum").at("tasks")) {
    tasks.push_back(task_from_name(name.get<std::string>()));
  }
  const int eval_every = d.config.at("curriculum").at("eval_every_rounds").get<int>();
  const int total_rounds = d.config.at("curriculum").at("total_rounds").get<int>();

  std::map<std::string, std::pair<Method, std::uint64_t>> meta;  // run_id -> (method, seed)
  for (const auto& run : d.summary.at("runs")) {
    meta[run.at("run_id").get<std::string>()] = {
        method_from_name(run.at("method").get<std::string>()),
        static_cast<std::uint64_t>(run.at("seed").get<int>())};
  }

  const detail::Csv csv = detail::read_csv(d.dir / "eval_trace.csv");
  const int c_run = csv.col("run_id");
  const int c_step = csv.col("step");
  const int c_eval = csv.col("eval_task");
  const int c_solve = csv.col("solve_rate");
  const int c_reward = csv.col("mean_reward");

  std::map<std::size_t, int> task_index;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    task_index[static_cast<std::size_t>(tasks[t])] = static_cast<int>(t);
  }

  // Rows arrive grouped by run and eval step in write order; rebuild in
  // first-appearance order so output stays deterministic.
  std::vector<CurriculumResult> runs;
  std::map<std::string, std::size_t> run_slot;
  for (const auto& row : csv.rows) {
    const std::string& run_id = row[static_cast<std::size_t>(c_run)];
    auto it = run_slot.find(run_id);
    if (it == run_slot.end()) {
      const auto m = meta.find(run_id);
      if (m == meta.end()) throw ReportError(d.dir.string() + ": run " + run_id +
                                             " missing from summary.json");
      CurriculumResult r;
      r.method = m->second.first;
      r.seed = m->second.second;
      r.tasks = tasks;
      r.total_rounds = total_rounds;
      r.eval_every_rounds = eval_every;
      it = run_slot.emplace(run_id, runs.size()).first;
      runs.push_back(std::move(r));
    }
    CurriculumResult& r = runs[it->second];
    const long long step = std::stoll(row[static_cast<std::size_t>(c_step)]);
    if (r.evals.empty() || r.evals.back().step != step) {
      EvalMatrixRow em;
      em.step = step;
      em.round = static_cast<int>(r.evals.size() + 1) * eval_every;
      em.cells.assign(tasks.size(), EvalCell{});
      r.evals.push_back(std::move(em));
    }
    const TaskId t = task_from_name(row[static_cast<std::size_t>(c_eval)]);
    const auto ti = task_index.find(static_cast<std::size_t>(t));
    if (ti == task_index.end()) throw CadenceError(d.dir.string() + ": eval task " +
                                                   std::string(task_name(t)) +
                                                   " not in the configured task set");
    EvalCell& cell = r.evals[r.evals.size() - 1].cells[static_cast<std::size_t>(ti->second)];
    cell.solve_rate = std::stod(row[static_cast<std::size_t>(c_solve)]);
    cell.mean_reward = std::stod(row[static_cast<std::size_t>(c_reward)]);
  }
  return runs;
}

struct TaskMethodStats {
  TaskId task = TaskId::Empty;
  Method method = Method::Random;
  int n_runs = 0;
  double median_final_reward = 0.0;
  double iqr_final_reward = 0.0;
  double median_final_solve = 0.0;
};

struct ReportData {
  std::vector<CurriculumResult> curriculum_runs;
  NormalizeReport method_table;
  std::vector<TaskMethodStats> task_table;
  std::map<std::string, int> forgetting_tally;
  nlohmann::json crosstrain_asymmetries = nlohmann::json::array();
};

inline std::string tally_string(const std::map<std::string, int>& tally) {
  auto cnt = [&](const char* k) {
    const auto it = tally.find(k);
    return it == tally.end() ? 0 : it->second;
  };
  return "decreasing," + std::to_string(cnt("decreasing")) + " periodic," +
         std::to_string(cnt("periodic")) + " inconclusive," + std::to_string(cnt("inconclusive"));
}

inline ReportData build_report(const std::vector<LoadedDir>& dirs) {
  ReportData data;

  for (const LoadedDir& d : dirs) {
    if (d.experiment == "curriculum") {
      std::vector<CurriculumResult> runs = load_curriculum_runs(d);
      for (CurriculumResult& r : runs) data.curriculum_runs.push_back(std::move(r));
    } else if (d.experiment == "forgetting") {
      for (const auto& run : d.summary.at("runs")) {
        const std::string label =
            run.at("classification").at("label").get<std::string>();
        data.forgetting_tally[label] += 1;
      }
    }
  }

  if (!data.curriculum_runs.empty()) {
    try {
      data.method_table = normalize_results(data.curriculum_runs);
    } catch (const std::invalid_argument& e) {
      throw CadenceError(e.what());
    }
    // Final-eval-point per-task spread, split by method.
    const std::vector<TaskId>& tasks = data.curriculum_runs.front().tasks;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      for (const MethodStats& ms : data.method_table.methods) {
        std::vector<double> rewards, solves;
        for (const CurriculumResult& r : data.curriculum_runs) {
          if (r.method != ms.method || r.evals.empty()) continue;
          rewards.push_back(r.evals.back().cells[t].mean_reward);
          solves.push_back(r.evals.back().cells[t].solve_rate);
        }
        if (rewards.empty()) continue;
        TaskMethodStats row;
        row.task = tasks[t];
        row.method = ms.method;
        row.n_runs = static_cast<int>(rewards.size());
        row.median_final_reward = median(rewards);
        row.iqr_final_reward = iqr(rewards);
        row.median_final_solve = median(solves);
        data.task_table.push_back(row);
      }
    }
  }

  // Pool cross-training legs by (trained, partner, buddy, seed) across all
  // directories, then pair mirrored legs to recompute asymmetries.
  struct Leg {
    std::string trained, partner, buddy;
    int seed = 0;
    std::optional<double> auc;
  };
  std::vector<Leg> legs;
  for (const LoadedDir& d : dirs) {
    if (d.experiment != "crosstrain") continue;
    for (const auto& run : d.summary.at("runs")) {
      Leg leg;
      leg.trained = run.at("trained").get<std::string>();
      leg.partner = run.at("partner").get<std::string>();
      leg.buddy = run.at("buddy").get<std::string>();
      leg.seed = run.at("seed").get<int>();
      if (!run.at("partner_auc").is_null()) leg.auc = run.at("partner_auc").get<double>();
      legs.push_back(std::move(leg));
    }
  }
  std::set<std::string> reported;
  for (const Leg& x : legs) {
    const std::string key = x.trained < x.partner ? x.trained + "|" + x.partner + "|" + x.buddy
                                                  : x.partner + "|" + x.trained + "|" + x.buddy;
    if (!reported.insert(key).second) continue;
    bool has_mirror = false;
    for (const Leg& l : legs) {
      if (l.trained == x.partner && l.partner == x.trained && l.buddy == x.buddy) {
        has_mirror = true;
      }
    }
    if (!has_mirror) continue;
    nlohmann::json per_seed = nlohmann::json::array();
    double sum = 0.0;
    int count = 0;
    std::set<int> seeds;
    for (const Leg& l : legs) seeds.insert(l.seed);
    for (int seed : seeds) {
      std::optional<double> forward, backward;
      for (const Leg& l : legs) {
        if (l.seed != seed || l.buddy != x.buddy) continue;
        if (l.trained == x.trained && l.partner == x.partner) forward = l.auc;
        if (l.trained == x.partner && l.partner == x.trained) backward = l.auc;
      }
      if (forward && backward) {
        const double asym = *forward - *backward;
        per_seed.push_back(asym);
        sum += asym;
        ++count;
      } else {
        per_seed.push_back(nullptr);
      }
    }
    nlohmann::json entry = {{"task_x", x.trained},
                            {"task_y", x.partner},
                            {"per_seed", per_seed},
                            {"n", count}};
    entry["mean"] = count > 0 ? nlohmann::json(sum / count) : nlohmann::json(nullptr);
    data.crosstrain_asymmetries.push_back(entry);
  }

  return data;
}

inline std::string render_report_csv(const ReportData& data) {
  detail::CsvWriter w;
  bool need_gap = false;
  if (!data.method_table.methods.empty()) {
    w.row({"method", "n_runs", "median_max", "iqr_max", "median_final", "iqr_final"});
    for (const MethodStats& m : data.method_table.methods) {
      w.row({std::string(method_name(m.method)), detail::fmt(m.n_runs),
             detail::fmt(m.median_max), detail::fmt(m.iqr_max), detail::fmt(m.median_final),
             detail::fmt(m.iqr_final)});
    }
    need_gap = true;
  }
  if (!data.task_table.empty()) {
    if (need_gap) w.buf += '\n';
    w.row({"task", "method", "n_runs", "median_final_reward", "iqr_final_reward",
           "median_final_solve"});
    for (const TaskMethodStats& t : data.task_table) {
      w.row({std::string(task_name(t.task)), std::string(method_name(t.method)),
             detail::fmt(t.n_runs), detail::fmt(t.median_final_reward),
             detail::fmt(t.iqr_final_reward), detail::fmt(t.median_final_solve)});
    }
    need_gap = true;
  }
  if (!data.forgetting_tally.empty()) {
    if (need_gap) w.buf += '\n';
    w.row({"label", "count"});
    for (const char* label : {"decreasing", "periodic", "inconclusive"}) {
      const auto it = data.forgetting_tally.find(label);
      w.row({label, detail::fmt(it == data.forgetting_tally.end() ? 0 : it->second)});
    }
    need_gap = true;
  }
  if (!data.crosstrain_asymmetries.empty()) {
    if (need_gap) w.buf += '\n';
    w.row({"task_x", "task_y", "n", "mean_asymmetry"});
    for (const auto& a : data.crosstrain_asymmetries) {
      w.row({a.at("task_x").get<std::string>(), a.at("task_y").get<std::string>(),
             detail::fmt(a.at("n").get<int>()),
             a.at("mean").is_null() ? "nan" : detail::fmt(a.at("mean").get<double>())});
    }
  }
  return w.buf;
}

inline std::string render_report_md(const ReportData& data) {
  std::string md = "# Experiment report\n";
  if (!data.method_table.methods.empty()) {
    md += "\n## Curriculum methods (normalized score across " +
          std::to_string(data.curriculum_runs.size()) + " runs)\n\n";
    md += "| method | runs | median max | IQR max | median final | IQR final |\n";
    md += "| --- | ---: | ---: | ---: | ---: | ---: |\n";
    for (const MethodStats& m : data.method_table.methods) {
      md += "| " + std::string(method_name(m.method)) + " | " + std::to_string(m.n_runs) +
            " | " + format_float(m.median_max) + " | " + format_float(m.iqr_max) + " | " +
            format_float(m.median_final) + " | " + format_float(m.iqr_final) + " |\n";
    }
  }
  if (!data.task_table.empty()) {
    md += "\n## Per-task final performance (median over runs)\n\n";
    md += "| task | method | median reward | IQR reward | median solve |\n";
    md += "| --- | --- | ---: | ---: | ---: |\n";
    for (const TaskMethodStats& t : data.task_table) {
      md += "| " + std::string(task_name(t.task)) + " | " + std::string(method_name(t.method)) +
            " | " + format_float(t.median_final_reward) + " | " +
            format_float(t.iqr_final_reward) + " | " + format_float(t.median_final_solve) +
            " |\n";
    }
  }
  if (!data.forgetting_tally.empty()) {
    md += "\n## Forgetting-curve classes\n\n";
    md += tally_string(data.forgetting_tally) + "\n";
  }
  if (!data.crosstrain_asymmetries.empty()) {
    md += "\n## Cross-training transfer asymmetry\n\n";
    md += "| trained x | partner y | seeds | mean A(y|x) - A(x|y) |\n";
    md += "| --- | --- | ---: | ---: |\n";
    for (const auto& a : data.crosstrain_asymmetries) {
      md += "| " + a.at("task_x").get<std::string>() + " | " + a.at("task_y").get<std::string>() +
            " | " + std::to_string(a.at("n").get<int>()) + " | " +
            (a.at("mean").is_null() ? std::string("undefined")
                                    : format_float(a.at("mean").get<double>())) +
            " |\n";
    }
  }
  return md;
}

inline int cmd_report(const std::vector<fs::path>& dirs, const fs::path& out_dir) {
  std::vector<LoadedDir> loaded;
  for (const fs::path& dir : dirs) loaded.push_back(load_result_dir(dir));
  const ReportData data = build_report(loaded);
  fs::create_directories(out_dir);
  write_text_atomic(out_dir / "report.csv", render_report_csv(data));
  write_text_atomic(out_dir / "report.md", render_report_md(data));
  return 0;
}

}  // namespace gridsched
