#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridsched/exp/alternation.hpp"
#include "gridsched/exp/curriculum.hpp"

namespace gridsched {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Forgetting, Curriculum, Crosstrain };

inline std::string_view experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Forgetting: return "forgetting";
    case ExperimentKind::Curriculum: return "curriculum";
    case ExperimentKind::Crosstrain: return "crosstrain";
  }
  return "";
}

inline ExperimentKind experiment_from_name(std::string_view name) {
  for (ExperimentKind k :
       {ExperimentKind::Forgetting, ExperimentKind::Curriculum, ExperimentKind::Crosstrain}) {
    if (experiment_name(k) == name) return k;
  }
  throw ConfigError("unknown experiment: " + std::string(name) +
                    " (expected forgetting, curriculum or crosstrain)");
}

struct CrosstrainSpec {
  TaskId trained = TaskId::Unlock;
  TaskId buddy = TaskId::Empty;
  TaskId partner = TaskId::DoorKey;
};

struct RunConfig {
  ExperimentKind experiment = ExperimentKind::Forgetting;
  std::vector<int> seeds = {0};
  std::string output_dir;  // fallback when the command line gives no --out
  bool emit_svg = false;
  int jobs = 1;
  TrainConfig train;
  AlternationConfig alternation;
  std::vector<CrosstrainSpec> pairs;  // crosstrain legs
  std::vector<Method> methods = {Method::Leitner, Method::Supermemo, Method::Plr, Method::Random};
  ScheduleConfig schedule;
};

namespace detail {

template <class T>
T get_field(const nlohmann::json& j, const std::string& path, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config field '" + path + key + "': " + e.what());
  }
}

inline TaskId get_task(const nlohmann::json& j, const std::string& path, const char* key,
                       TaskId fallback) {
  if (!j.contains(key)) return fallback;
  const std::string name = get_field<std::string>(j, path, key, "");
  try {
    return task_from_name(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config field '" + path + key + "': " + e.what());
  }
}

inline int parse_seed_token(const std::string& tok, const std::string& spec) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad --seeds value: " + spec);
  }
}

}  // namespace detail

// "0..9" (inclusive range), "0,3,7" (list) or "5" (single seed).
inline std::vector<int> parse_seed_spec(const std::string& spec) {
  std::vector<int> seeds;
  const std::size_t dots = spec.find("..");
  if (dots != std::string::npos) {
    const int lo = detail::parse_seed_token(spec.substr(0, dots), spec);
    const int hi = detail::parse_seed_token(spec.substr(dots + 2), spec);
    if (lo > hi) throw ConfigError("--seeds range is empty: " + spec);
    for (int s = lo; s <= hi; ++s) seeds.push_back(s);
  } else {
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      const std::size_t comma = spec.find(',', pos);
      const std::string tok =
          spec.substr(pos, comma == std::string::npos ? comma : comma - pos);
      if (tok.empty()) throw ConfigError("bad --seeds value: " + spec);
      seeds.push_back(detail::parse_seed_token(tok, spec));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  for (int s : seeds) {
    if (s < 0) throw ConfigError("--seeds must be nonnegative: " + spec);
  }
  if (std::set<int>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("--seeds must be distinct: " + spec);
  }
  return seeds;
}

// Parses and validates a run configuration. Unknown keys are rejected so a
// typo cannot silently fall back to a default.
inline RunConfig parse_run_config(const nlohmann::json& j, ExperimentKind experiment) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  static const std::set<std::string> known = {"experiment", "seeds",       "output_dir",
                                              "emit_svg",   "jobs",        "train",
                                              "alternation", "pairs",      "methods",
                                              "curriculum"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
  }

  RunConfig cfg;
  cfg.experiment = experiment;
  if (j.contains("experiment")) {
    const ExperimentKind declared =
        experiment_from_name(detail::get_field<std::string>(j, "", "experiment", ""));
    if (declared != experiment) {
      throw ConfigError("config field 'experiment' says '" +
                        std::string(experiment_name(declared)) +
                        "' but the command asked for '" +
                        std::string(experiment_name(experiment)) + "'");
    }
  }

  cfg.seeds = detail::get_field<std::vector<int>>(j, "", "seeds", {0});
  if (cfg.seeds.empty()) throw ConfigError("config field 'seeds' must be nonempty");
  if (std::set<int>(cfg.seeds.begin(), cfg.seeds.end()).size() != cfg.seeds.size()) {
    throw ConfigError("config field 'seeds' must be distinct");
  }
  for (int s : cfg.seeds) {
    if (s < 0) throw ConfigError("config field 'seeds' must be nonnegative");
  }
  cfg.output_dir = detail::get_field<std::string>(j, "", "output_dir", "");
  cfg.emit_svg = detail::get_field<bool>(j, "", "emit_svg", false);
  cfg.jobs = detail::get_field<int>(j, "", "jobs", 1);
  if (cfg.jobs < 1) throw ConfigError("config field 'jobs' must be >= 1");

  if (j.contains("train")) {
    const nlohmann::json& t = j.at("train");
    TrainConfig& tc = cfg.train;
    tc.gamma = detail::get_field<double>(t, "train.", "gamma", tc.gamma);
    tc.gae_lambda = detail::get_field<double>(t, "train.", "gae_lambda", tc.gae_lambda);
    tc.clip = detail::get_field<double>(t, "train.", "clip", tc.clip);
    tc.learning_rate = detail::get_field<double>(t, "train.", "learning_rate", tc.learning_rate);
    tc.epochs = detail::get_field<int>(t, "train.", "epochs", tc.epochs);
    tc.minibatch = detail::get_field<int>(t, "train.", "minibatch", tc.minibatch);
    tc.value_coeff = detail::get_field<double>(t, "train.", "value_coeff", tc.value_coeff);
    tc.entropy_coeff = detail::get_field<double>(t, "train.", "entropy_coeff", tc.entropy_coeff);
    tc.grad_clip_norm = detail::get_field<double>(t, "train.", "grad_clip_norm", tc.grad_clip_norm);
    tc.rollout_length = detail::get_field<int>(t, "train.", "rollout_length", tc.rollout_length);
    tc.stochastic_eval =
        detail::get_field<bool>(t, "train.", "stochastic_eval", tc.stochastic_eval);
    if (tc.gamma < 0.0 || tc.gamma > 1.0) throw ConfigError("train.gamma outside [0, 1]");
    if (tc.gae_lambda < 0.0 || tc.gae_lambda > 1.0) {
      throw ConfigError("train.gae_lambda outside [0, 1]");
    }
    if (tc.clip <= 0.0) throw ConfigError("train.clip must be positive");
    if (tc.learning_rate <= 0.0) throw ConfigError("train.learning_rate must be positive");
    if (tc.epochs < 1 || tc.minibatch < 1 || tc.rollout_length < 1) {
      throw ConfigError("train epochs/minibatch/rollout_length must be positive");
    }
  }

  if (j.contains("alternation")) {
    const nlohmann::json& a = j.at("alternation");
    AlternationConfig& ac = cfg.alternation;
    ac.task_a = detail::get_task(a, "alternation.", "task_a", ac.task_a);
    ac.task_b = detail::get_task(a, "alternation.", "task_b", ac.task_b);
    ac.upper = detail::get_field<double>(a, "alternation.", "upper", ac.upper);
    ac.lower = detail::get_field<double>(a, "alternation.", "lower", ac.lower);
    ac.eval_every = detail::get_field<long long>(a, "alternation.", "eval_every", ac.eval_every);
    ac.eval_episodes =
        detail::get_field<int>(a, "alternation.", "eval_episodes", ac.eval_episodes);
    ac.max_total_steps =
        detail::get_field<long long>(a, "alternation.", "max_total_steps", ac.max_total_steps);
  }
  {
    const AlternationConfig& ac = cfg.alternation;
    if (!(0.0 <= ac.lower && ac.lower < ac.upper)) {
      throw ConfigError("alternation thresholds need 0 <= lower < upper");
    }
    if (ac.upper > 1.0 && ac.upper != 1.1) {
      // 1.1 is the documented "unreachable" sentinel used in tests
      throw ConfigError("alternation.upper outside (lower, 1] (or sentinel 1.1)");
    }
    if (ac.eval_every < 1) throw ConfigError("alternation.eval_every must be >= 1");
    if (ac.eval_episodes < 1) throw ConfigError("alternation.eval_episodes must be >= 1");
    if (ac.max_total_steps < 1) throw ConfigError("alternation.max_total_steps must be >= 1");
    if (experiment == ExperimentKind::Forgetting && ac.task_a == ac.task_b) {
      throw ConfigError("alternation tasks must be distinct");
    }
  }

  if (experiment == ExperimentKind::Crosstrain) {
    if (!j.contains("pairs") || !j.at("pairs").is_array() || j.at("pairs").empty()) {
      throw ConfigError("crosstrain needs a nonempty 'pairs' array");
    }
    for (std::size_t i = 0; i < j.at("pairs").size(); ++i) {
      const nlohmann::json& p = j.at("pairs").at(i);
      const std::string path = "pairs[" + std::to_string(i) + "].";
      CrosstrainSpec spec;
      spec.trained = detail::get_task(p, path, "trained", spec.trained);
      spec.buddy = detail::get_task(p, path, "buddy", spec.buddy);
      spec.partner = detail::get_task(p, path, "partner", spec.partner);
      if (spec.trained == spec.buddy) {
        throw ConfigError(path + "trained and buddy must be distinct");
      }
      cfg.pairs.push_back(spec);
    }
  }

  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : detail::get_field<std::vector<std::string>>(j, "", "methods", {})) {
      try {
        cfg.methods.push_back(method_from_name(m));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config field 'methods': ") + e.what());
      }
    }
    if (cfg.methods.empty()) throw ConfigError("config field 'methods' must be nonempty");
  }

  if (j.contains("curriculum")) {
    const nlohmann::json& c = j.at("curriculum");
    ScheduleConfig& sc = cfg.schedule;
    sc.total_rounds = detail::get_field<int>(c, "curriculum.", "total_rounds", sc.total_rounds);
    sc.eval_every_rounds =
        detail::get_field<int>(c, "curriculum.", "eval_every_rounds", sc.eval_every_rounds);
    sc.eval_episodes =
        detail::get_field<int>(c, "curriculum.", "eval_episodes", sc.eval_episodes);
    sc.plr.beta = detail::get_field<double>(c, "curriculum.", "plr_beta", sc.plr.beta);
    sc.plr.rho = detail::get_field<double>(c, "curriculum.", "plr_rho", sc.plr.rho);
    if (c.contains("tasks")) {
      sc.tasks.clear();
      for (const auto& name : detail::get_field<std::vector<std::string>>(c, "curriculum.",
                                                                          "tasks", {})) {
        try {
          sc.tasks.push_back(task_from_name(name));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("config field 'curriculum.tasks': ") + e.what());
        }
      }
    }
    if (sc.total_rounds < 1) throw ConfigError("curriculum.total_rounds must be >= 1");
    if (sc.eval_every_rounds < 1 || sc.eval_every_rounds > sc.total_rounds) {
      throw ConfigError("curriculum.eval_every_rounds must be in [1, total_rounds]");
    }
    if (sc.eval_episodes < 1) throw ConfigError("curriculum.eval_episodes must be >= 1");
    if (sc.tasks.empty()) throw ConfigError("curriculum.tasks must be nonempty");
    if (sc.plr.beta <= 0.0) throw ConfigError("curriculum.plr_beta must be positive");
    if (sc.plr.rho < 0.0 || sc.plr.rho > 1.0) {
      throw ConfigError("curriculum.plr_rho outside [0, 1]");
    }
  }

  return cfg;
}

// The fully resolved configuration, defaults included: written to the output
// directory and hashed into the manifest. Key order is canonical (sorted).
// Execution details that cannot change the results (jobs, emit_svg) are
// deliberately left out so equivalent runs hash identically.
inline nlohmann::json effective_config_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["experiment"] = std::string(experiment_name(cfg.experiment));
  j["seeds"] = cfg.seeds;
  const TrainConfig& tc = cfg.train;
  j["train"] = {{"gamma", tc.gamma},
                {"gae_lambda", tc.gae_lambda},
                {"clip", tc.clip},
                {"learning_rate", tc.learning_rate},
                {"epochs", tc.epochs},
                {"minibatch", tc.minibatch},
                {"value_coeff", tc.value_coeff},
                {"entropy_coeff", tc.entropy_coeff},
                {"grad_clip_norm", tc.grad_clip_norm},
                {"rollout_length", tc.rollout_length},
                {"stochastic_eval", tc.stochastic_eval}};
  const AlternationConfig& ac = cfg.alternation;
  j["alternation"] = {{"task_a", std::string(task_name(ac.task_a))},
                      {"task_b", std::string(task_name(ac.task_b))},
                      {"upper", ac.upper},
                      {"lower", ac.lower},
                      {"eval_every", ac.eval_every},
                      {"eval_episodes", ac.eval_episodes},
                      {"max_total_steps", ac.max_total_steps}};
  if (cfg.experiment == ExperimentKind::Crosstrain) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const CrosstrainSpec& p : cfg.pairs) {
      pairs.push_back({{"trained", std::string(task_name(p.trained))},
                       {"buddy", std::string(task_name(p.buddy))},
                       {"partner", std::string(task_name(p.partner))}});
    }
    j["pairs"] = pairs;
  }
  if (cfg.experiment == ExperimentKind::Curriculum) {
    nlohmann::json methods = nlohmann::json::array();
    for (Method m : cfg.methods) methods.push_back(std::string(method_name(m)));
    j["methods"] = methods;
    nlohmann::json tasks = nlohmann::json::array();
    for (TaskId t : cfg.schedule.tasks) tasks.push_back(std::string(task_name(t)));
    j["curriculum"] = {{"total_rounds", cfg.schedule.total_rounds},
                       {"eval_every_rounds", cfg.schedule.eval_every_rounds},
                       {"eval_episodes", cfg.schedule.eval_episodes},
                       {"plr_beta", cfg.schedule.plr.beta},
                       {"plr_rho", cfg.schedule.plr.rho},
                       {"tasks", tasks}};
  }
  return j;
}

}  // namespace gridsched
