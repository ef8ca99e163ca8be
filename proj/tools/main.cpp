#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridsched/cli/report.hpp"
#include "gridsched/cli/run.hpp"


int main(int argc, char** argv) {
  CLI::App app{"gridworld curriculum and forgetting experiments"};
  app.require_subcommand(1);

  // run
  std::string experiment_arg, config_path, run_out_dir, seed_spec;
  bool svg_flag = false;
  int jobs_flag = 0;
  CLI::App* run = app.add_subcommand("run", "execute an experiment over one or more seeds");
  run->add_option("experiment", experiment_arg, "forgetting, curriculum or crosstrain")
      ->required();
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--out", run_out_dir, "output directory (falls back to the config's output_dir)");
  run->add_option("--seeds", seed_spec, "seed list or range, e.g. 0..9 or 0,3,7");
  run->add_flag("--svg", svg_flag, "also emit SVG figures");
  run->add_option("--jobs", jobs_flag, "run seeds on this many threads");

  // report
  std::vector<std::string> report_dirs;
  std::string report_out_dir;
  CLI::App* report = app.add_subcommand("report", "aggregate finished result directories");
  report->add_option("dirs", report_dirs, "result directories produced by run")->required();
  report->add_option("--out", report_out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      gridsched::RunConfig cfg;
      try {
        const gridsched::ExperimentKind kind =
            gridsched::experiment_from_name(experiment_arg);
        std::ifstream in(config_path);
        if (!in) throw gridsched::ConfigError("cannot open config file: " + config_path);
        nlohmann::json j;
        try {
          in >> j;
        } catch (const nlohmann::json::exception& e) {
          throw gridsched::ConfigError(config_path + ": " + e.what());
        }
        cfg = gridsched::parse_run_config(j, kind);
        if (!seed_spec.empty()) cfg.seeds = gridsched::parse_seed_spec(seed_spec);
        if (svg_flag) cfg.emit_svg = true;
        if (jobs_flag > 0) cfg.jobs = jobs_flag;
        if (run_out_dir.empty()) run_out_dir = cfg.output_dir;
        if (run_out_dir.empty()) {
          throw gridsched::ConfigError(
              "no output directory: pass --out or set output_dir in the config");
        }
      } catch (const gridsched::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
      }
      return gridsched::cmd_run(cfg, run_out_dir);
    }
    if (report->parsed()) {
      std::vector<gridsched::fs::path> dirs(report_dirs.begin(), report_dirs.end());
      try {
        return gridsched::cmd_report(dirs, report_out_dir);
      } catch (const gridsched::CadenceError& e) {
        std::fprintf(stderr, "incompatible result directories: %s\n", e.what());
        return 3;
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
