#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gridsched/cli/report.hpp"
#include "gridsched/cli/run.hpp"

using namespace gridsched;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gridsched_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A config small enough that a full run finishes in well under a second.
nlohmann::json tiny_forgetting_config() {
  return nlohmann::json{
      {"experiment", "forgetting"},
      {"seeds", {0, 1}},
      {"alternation",
       {{"task_a", "SimpleCrossing"},
        {"task_b", "Empty"},
        {"eval_every", 512},
        {"eval_episodes", 2},
        {"max_total_steps", 1536}}}};
}

nlohmann::json tiny_curriculum_config() {
  return nlohmann::json{{"experiment", "curriculum"},
                        {"seeds", {0}},
                        {"methods", {"leitner", "random"}},
                        {"curriculum",
                         {{"total_rounds", 4},
                          {"eval_every_rounds", 2},
                          {"eval_episodes", 2},
                          {"tasks", {"Empty", "FourRooms"}}}}};
}

}  // namespace

TEST_CASE("number formatting is compact, locale-free and 9 significant digits") {
  CHECK(format_float(0.0) == "0");
  CHECK(format_float(1.0) == "1");
  CHECK(format_float(-1.0) == "-1");
  CHECK(format_float(0.5) == "0.5");
  CHECK(format_float(2.0 / 3.0) == "0.666666667");
  CHECK(format_float(1.0 / 3.0) == "0.333333333");
  CHECK(format_float(123456789.0) == "123456789");
  CHECK(format_float(0.000125) == "0.000125");
  CHECK(format_float(1e20) == "1e+20");
  // round-trip at the printed precision
  for (double v : {0.432567625, 3.14159265, -0.000123456789, 98765.4321}) {
    CHECK(std::stod(format_float(v)) == Catch::Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("FNV-1a matches the published test vectors") {
  // reference values for the 64-bit offset-basis/prime variant
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  CHECK(hash_hex(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(hash_hex(0x1ULL) == "0000000000000001");
}

TEST_CASE("seed spec grammar") {
  CHECK(parse_seed_spec("5") == std::vector<int>{5});
  CHECK(parse_seed_spec("0..3") == std::vector<int>{0, 1, 2, 3});
  CHECK(parse_seed_spec("7..7") == std::vector<int>{7});
  CHECK(parse_seed_spec("0,3,7") == std::vector<int>{0, 3, 7});
  CHECK_THROWS_AS(parse_seed_spec("3..1"), ConfigError);
  CHECK_THROWS_AS(parse_seed_spec("x"), ConfigError);
  CHECK_THROWS_AS(parse_seed_spec("1,,2"), ConfigError);
  CHECK_THROWS_AS(parse_seed_spec("1,1"), ConfigError);
  CHECK_THROWS_AS(parse_seed_spec("-2..1"), ConfigError);
  CHECK_THROWS_AS(parse_seed_spec(""), ConfigError);
}

TEST_CASE("config parsing: defaults, diagnostics and validation") {
  SECTION("empty object yields defaults") {
    const RunConfig cfg = parse_run_config(nlohmann::json::object(),
                                           ExperimentKind::Forgetting);
    CHECK(cfg.seeds == std::vector<int>{0});
    CHECK(cfg.train.gamma == 0.99);
    CHECK(cfg.train.rollout_length == 256);
    CHECK(cfg.alternation.task_a == TaskId::SimpleCrossing);
    CHECK(cfg.alternation.upper == 0.8);
    CHECK(cfg.schedule.tasks.size() == 15);
    CHECK(cfg.methods.size() == 4);
  }
  SECTION("unknown top-level key is rejected") {
    CHECK_THROWS_AS(parse_run_config({{"sseds", {1}}}, ExperimentKind::Forgetting),
                    ConfigError);
  }
  SECTION("type errors name the offending field") {
    try {
      parse_run_config({{"train", {{"gamma", "fast"}}}}, ExperimentKind::Forgetting);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("train.gamma") != std::string::npos);
    }
  }
  SECTION("experiment mismatch between CLI and config") {
    CHECK_THROWS_AS(parse_run_config({{"experiment", "curriculum"}},
                                     ExperimentKind::Forgetting),
                    ConfigError);
  }
  SECTION("threshold and seed validation") {
    CHECK_THROWS_AS(parse_run_config({{"seeds", {1, 1}}}, ExperimentKind::Forgetting),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config({{"seeds", nlohmann::json::array()}},
                                     ExperimentKind::Forgetting),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_run_config({{"alternation", {{"upper", 0.1}, {"lower", 0.8}}}},
                         ExperimentKind::Forgetting),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config({{"alternation", {{"task_b", "SimpleCrossing"}}}},
                         ExperimentKind::Forgetting),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config({{"alternation", {{"task_a", "NoSuchTask"}}}},
                         ExperimentKind::Forgetting),
        ConfigError);
  }
  SECTION("curriculum bounds") {
    CHECK_THROWS_AS(
        parse_run_config(
            {{"curriculum", {{"total_rounds", 10}, {"eval_every_rounds", 20}}}},
            ExperimentKind::Curriculum),
        ConfigError);
    CHECK_THROWS_AS(
        parse_run_config({{"methods", {"leitner", "sm9"}}}, ExperimentKind::Curriculum),
        ConfigError);
  }
  SECTION("output_dir is accepted and surfaced") {
    const RunConfig cfg = parse_run_config({{"output_dir", "results/forget"}},
                                           ExperimentKind::Forgetting);
    CHECK(cfg.output_dir == "results/forget");
    // execution details stay out of the effective config
    CHECK_FALSE(effective_config_json(cfg).contains("output_dir"));
  }
  SECTION("crosstrain needs pairs") {
    CHECK_THROWS_AS(parse_run_config(nlohmann::json::object(), ExperimentKind::Crosstrain),
                    ConfigError);
    const RunConfig cfg = parse_run_config(
        {{"pairs",
          {{{"trained", "Unlock"}, {"buddy", "Empty"}, {"partner", "DoorKey"}}}}},
        ExperimentKind::Crosstrain);
    REQUIRE(cfg.pairs.size() == 1);
    CHECK(cfg.pairs[0].trained == TaskId::Unlock);
    CHECK(cfg.pairs[0].partner == TaskId::DoorKey);
  }
}

TEST_CASE("effective config hash ignores key order and execution details") {
  nlohmann::json a = tiny_forgetting_config();
  // same content, different key insertion order
  nlohmann::json b;
  b["alternation"] = a["alternation"];
  b["seeds"] = a["seeds"];
  b["experiment"] = a["experiment"];
  nlohmann::json c = a;
  c["jobs"] = 4;
  c["emit_svg"] = true;

  const auto hash_of = [](const nlohmann::json& j) {
    const RunConfig cfg = parse_run_config(j, ExperimentKind::Forgetting);
    return hash_hex(fnv1a(effective_config_json(cfg).dump()));
  };
  CHECK(hash_of(a) == hash_of(b));
  CHECK(hash_of(a) == hash_of(c));
  // but the science parameters do feed the hash
  nlohmann::json d = a;
  d["alternation"]["upper"] = 0.7;
  CHECK(hash_of(a) != hash_of(d));
}

TEST_CASE("svg rendering") {
  SECTION("single point becomes a marker, not a polyline") {
    SvgSeries s;
    s.label = "one";
    s.points = {{100.0, 0.5}};
    const std::string svg = emit_svg({s}, "t");
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") != std::string::npos);
  }
  SECTION("one polyline per series plus legend entries") {
    SvgSeries a, b;
    a.label = "alpha";
    b.label = "beta";
    for (int i = 0; i < 50; ++i) {
      a.points.emplace_back(i, 0.3);
      b.points.emplace_back(i, 0.6);
    }
    const std::string svg = emit_svg({a, b}, "two series");
    std::size_t polylines = 0;
    for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
         pos = svg.find("<polyline", pos + 1)) {
      ++polylines;
    }
    CHECK(polylines == 2);
    CHECK(svg.find("alpha") != std::string::npos);
    CHECK(svg.find("beta") != std::string::npos);
    CHECK(svg.find("two series") != std::string::npos);
  }
  SECTION("dense series are decimated and stay small") {
    SvgSeries s;
    s.label = "dense";
    for (int i = 0; i < 10000; ++i) {
      s.points.emplace_back(static_cast<double>(i), (i % 100) / 100.0);
    }
    const std::string svg = emit_svg({s}, "dense");
    // count vertices in the polyline points attribute
    const std::size_t start = svg.find("points=\"");
    REQUIRE(start != std::string::npos);
    const std::size_t end = svg.find('"', start + 8);
    std::size_t vertices = 1;
    for (std::size_t i = start; i < end; ++i) {
      if (svg[i] == ' ') ++vertices;
    }
    CHECK(vertices <= kSvgMaxVertices + 1);
    CHECK(svg.size() < (1u << 20));
    // the final sample survives decimation
    CHECK(svg.find("9999") != std::string::npos);
  }
  SECTION("y values are clipped into the unit band") {
    SvgSeries s;
    s.label = "wild";
    s.points = {{0.0, -0.5}, {1.0, 1.5}, {2.0, 0.5}};
    const std::string svg = emit_svg({s}, "clip");
    CHECK(svg.find("nan") == std::string::npos);
  }
}

TEST_CASE("atomic text writes leave no temp files") {
  const fs::path dir = fresh_dir("atomic");
  write_text_atomic(dir / "x.txt", "hello\n");
  CHECK(slurp(dir / "x.txt") == "hello\n");
  int entries = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++entries;
    CHECK(e.path().extension() != ".tmp");
  }
  CHECK(entries == 1);
}

TEST_CASE("forgetting run directory: schema, determinism, manifest") {
  const RunConfig cfg = parse_run_config(tiny_forgetting_config(),
                                         ExperimentKind::Forgetting);
  const fs::path dir_a = fresh_dir("forget_a");
  const fs::path dir_b = fresh_dir("forget_b");
  REQUIRE(cmd_run(cfg, dir_a) == 0);
  RunConfig cfg_par = cfg;
  cfg_par.jobs = 2;
  REQUIRE(cmd_run(cfg_par, dir_b) == 0);

  SECTION("expected files exist and match the manifest inventory") {
    const nlohmann::json manifest = nlohmann::json::parse(slurp(dir_a / "manifest.json"));
    for (const auto& f : manifest.at("files")) {
      CHECK(fs::exists(dir_a / f.get<std::string>()));
    }
    CHECK(manifest.at("experiment") == "forgetting");
    CHECK(manifest.at("config_hash").get<std::string>().size() == 16);
    // timestamps live only in the manifest
    CHECK(slurp(dir_a / "summary.json").find("created_utc") == std::string::npos);
    CHECK(slurp(dir_a / "config.json").find("created_utc") == std::string::npos);
    const std::string hash_again =
        hash_hex(fnv1a(nlohmann::json::parse(slurp(dir_a / "config.json")).dump()));
    CHECK(manifest.at("config_hash") == hash_again);
    for (const auto& r : manifest.at("runs")) CHECK(r.at("status") == "completed");
  }
  SECTION("parallel execution is byte-identical to sequential") {
    for (const char* f : {"config.json", "eval_trace.csv", "phases.csv", "summary.json"}) {
      CHECK(slurp(dir_a / f) == slurp(dir_b / f));
    }
  }
  SECTION("trace CSV columns and run ids") {
    std::istringstream in(slurp(dir_a / "eval_trace.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "run_id,seed,step,trained_task,eval_task,solve_rate,mean_reward");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
      CHECK(line.rfind("forgetting-s", 0) == 0);
      ++rows;
    }
    // 2 seeds x 3 eval points x 2 eval tasks
    CHECK(rows == 12);
    std::istringstream pin(slurp(dir_a / "phases.csv"));
    std::getline(pin, header);
    CHECK(header ==
          "run_id,seed,phase_idx,kind,trained_task,monitored_task,start_step,end_step");
  }
}

TEST_CASE("curriculum run + report aggregation round-trips exactly") {
  const RunConfig cfg = parse_run_config(tiny_curriculum_config(),
                                         ExperimentKind::Curriculum);
  const fs::path dir = fresh_dir("curr");
  REQUIRE(cmd_run(cfg, dir) == 0);

  SECTION("selections CSV matches a direct rerun of the harness") {
    CurriculumResult leitner = run_curriculum(Method::Leitner, cfg.train, cfg.schedule, 0);
    std::istringstream in(slurp(dir / "selections.csv"));
    std::string line;
    std::getline(in, line);  // header
    for (const SelectionRow& s : leitner.selections) {
      REQUIRE(std::getline(in, line));
      const std::string expected =
          "curriculum-leitner-s0,0," + std::to_string(s.round) + ",leitner," +
          std::string(task_name(s.task)) + "," + format_float(s.episode_reward) + "," +
          (s.solved ? "1" : "0") + "," + format_float(s.value_error) + "," +
          format_float(s.probability);
      CHECK(line == expected);
    }
  }

  SECTION("report recomputes the summary's normalized stats from the CSVs") {
    const fs::path rep = fresh_dir("currrep");
    REQUIRE(cmd_report({dir}, rep) == 0);
    const std::string csv = slurp(rep / "report.csv");
    CHECK(csv.rfind("method,n_runs,median_max,iqr_max,median_final,iqr_final", 0) == 0);

    // recompute through the library path and compare the printed digits
    const LoadedDir loaded = load_result_dir(dir);
    std::vector<CurriculumResult> runs = load_curriculum_runs(loaded);
    REQUIRE(runs.size() == 2);
    const NormalizeReport norm = normalize_results(runs);
    const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    for (const MethodStats& m : norm.methods) {
      bool found = false;
      for (const auto& jm : summary.at("methods")) {
        if (jm.at("method") == std::string(method_name(m.method))) {
          CHECK(jm.at("median_final").get<double>() ==
                Catch::Approx(m.median_final).margin(1e-12));
          CHECK(jm.at("median_max").get<double>() ==
                Catch::Approx(m.median_max).margin(1e-12));
          found = true;
        }
      }
      CHECK(found);
      const std::string row = std::string(method_name(m.method)) + "," +
                              std::to_string(m.n_runs) + "," + format_float(m.median_max) +
                              "," + format_float(m.iqr_max) + "," +
                              format_float(m.median_final) + "," + format_float(m.iqr_final);
      CHECK(csv.find(row) != std::string::npos);
    }
    CHECK(fs::exists(rep / "report.md"));
  }

  SECTION("incompatible cadence across directories is rejected") {
    nlohmann::json other = tiny_curriculum_config();
    other["curriculum"]["eval_every_rounds"] = 4;
    other["curriculum"]["total_rounds"] = 8;
    const RunConfig cfg2 = parse_run_config(other, ExperimentKind::Curriculum);
    const fs::path dir2 = fresh_dir("curr2");
    REQUIRE(cmd_run(cfg2, dir2) == 0);
    const std::vector<LoadedDir> loaded = {load_result_dir(dir), load_result_dir(dir2)};
    CHECK_THROWS_AS(build_report(loaded), CadenceError);
  }
}

TEST_CASE("crosstrain run emits mirrored-pair asymmetry slots") {
  nlohmann::json j = {
      {"experiment", "crosstrain"},
      {"seeds", {0}},
      {"alternation",
       {{"eval_every", 512}, {"eval_episodes", 2}, {"max_total_steps", 1024}}},
      {"pairs",
       {{{"trained", "Unlock"}, {"buddy", "Empty"}, {"partner", "DoorKey"}},
        {{"trained", "DoorKey"}, {"buddy", "Empty"}, {"partner", "Unlock"}}}}};
  const RunConfig cfg = parse_run_config(j, ExperimentKind::Crosstrain);
  const fs::path dir = fresh_dir("cross");
  REQUIRE(cmd_run(cfg, dir) == 0);
  const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  REQUIRE(summary.at("runs").size() == 2);
  REQUIRE(summary.at("asymmetries").size() == 1);
  const auto& asym = summary.at("asymmetries").at(0);
  CHECK(asym.at("task_x") == "Unlock");
  CHECK(asym.at("task_y") == "DoorKey");
  REQUIRE(asym.at("per_seed").size() == 1);

  // the report pools the same legs back out of the summary
  const fs::path rep = fresh_dir("crossrep");
  REQUIRE(cmd_report({dir}, rep) == 0);
  const std::string csv = slurp(rep / "report.csv");
  CHECK(csv.find("task_x,task_y,n,mean_asymmetry") != std::string::npos);
  CHECK(csv.find("Unlock,DoorKey") != std::string::npos);
}

TEST_CASE("report on forgetting directories tallies classifications") {
  const RunConfig cfg = parse_run_config(tiny_forgetting_config(),
                                         ExperimentKind::Forgetting);
  const fs::path dir = fresh_dir("forget_tally");
  REQUIRE(cmd_run(cfg, dir) == 0);
  const fs::path rep = fresh_dir("forget_rep");
  REQUIRE(cmd_report({dir}, rep) == 0);
  const std::string md = slurp(rep / "report.md");
  // tiny runs never switch, so everything lands in "inconclusive"
  CHECK(md.find("decreasing,0 periodic,0 inconclusive,2") != std::string::npos);
  const std::string csv = slurp(rep / "report.csv");
  CHECK(csv.find("label,count") != std::string::npos);
  CHECK(csv.find("inconclusive,2") != std::string::npos);
}
