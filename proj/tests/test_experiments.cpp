#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "json.hpp"

#include "doctest.h"
#include "epictl/experiments.hpp"

using namespace epictl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("epictl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), dir).string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

ExperimentConfig small_config() {
  return parse_config(nlohmann::json::parse(R"({
    "graph": {"type": "er", "n": 40, "avg_degree": 6},
    "model": {"kind": "sigmoid", "s_I": 13, "a_I": 3, "s_H": 2, "a_H": 0.5, "delta": 1},
    "strategies": ["glrie", "lrie", "lrsr", "mcm", "rand"],
    "sim": {"t_max": 4, "budget": 4, "rho": 30},
    "runs": 6,
    "seed": 42,
    "grid_points": 21
  })"));
}

}  // namespace

TEST_CASE("config: defaults, round trip and rejection") {
  ExperimentConfig d = parse_config(nlohmann::json::object());
  CHECK(d.runs == 100);
  CHECK(d.sim.t_max == 20.0);
  CHECK(d.sim.initial.fraction == 0.2);
  CHECK(d.model.sigmoid.delta == 1.0);

  ExperimentConfig c = small_config();
  ExperimentConfig again = parse_config(c.to_json());
  CHECK(again.to_json() == c.to_json());

  auto bad = [](const char* text) { return parse_config(nlohmann::json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"graph": {"type": "lattice"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"strategies": ["glrie", "best"]})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"strategies": []})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"runs": 0})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"sim": {"t_max": -1}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"model": {"s_I": -2}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"sweep": {"s_I": [], "a_I": [1]}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"graph": {"type": "edge_list", "path": "/nonexistent/edges.txt"}})"), ConfigError);
  CHECK_THROWS_AS(bad(R"({"runs": "many"})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("parallel_for covers every job once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t j) { hits[j]++; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(50, 3,
                               [](std::size_t j) {
                                 if (j == 17) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("scenario: strategies share graphs and initial infections") {
  ExperimentConfig cfg = small_config();
  fs::path dir = scratch("fair");
  ScenarioResult r = run_scenario(cfg, dir.string());
  REQUIRE(r.batches.size() == 5);
  for (std::size_t run = 0; run < cfg.runs; ++run) {
    Trajectory first = read_trajectory_file((dir / ("glrie_" + std::to_string(run) + ".log")).string());
    for (const char* s : {"lrie", "lrsr", "mcm", "rand"}) {
      Trajectory t = read_trajectory_file((dir / (std::string(s) + "_" + std::to_string(run) + ".log")).string());
      CHECK(t.initial_infected == first.initial_infected);
      CHECK(auc(t) == r.batch(parse_strategy(s)).runs[run].metrics.auc);
    }
  }
  GraphSource src(cfg.graph, cfg.seed);
  CHECK_FALSE(src.fixed());
  CHECK(*src.graph_for(run_seed(cfg.seed, 0)) == *src.graph_for(run_seed(cfg.seed, 0)));
  fs::remove_all(dir);
}

TEST_CASE("scenario: degenerate rand with one run") {
  ExperimentConfig cfg = small_config();
  cfg.strategies = {StrategyKind::rand};
  cfg.runs = 1;
  cfg.write_trajectories = true;
  fs::path dir = scratch("degenerate");
  cfg.output_dir = dir.string();
  ScenarioResult r = run_scenario_to_disk(cfg);
  CHECK(r.batches.size() == 1);
  CHECK(r.batches[0].run_count() == 1);
  CHECK(r.batches[0].auc.ci95 == 0.0);
  std::size_t logs = 0;
  for (const auto& e : fs::directory_iterator(dir / "trajectories")) logs += e.path().extension() == ".log";
  CHECK(logs == 1);
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "runs_rand.csv"));
  CHECK(fs::exists(dir / "curve_rand.csv"));
  std::ifstream mf(dir / "manifest.json");
  nlohmann::json manifest = nlohmann::json::parse(mf);
  CHECK(manifest["config"]["sim"]["t_max"] == 4.0);
  CHECK(manifest["run_seeds"].size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("scenario output is byte-identical across worker counts") {
  ExperimentConfig cfg = small_config();
  fs::path a = scratch("det_a"), b = scratch("det_b");
  cfg.workers = 1;
  write_scenario(cfg, run_scenario(cfg), a.string());
  cfg.workers = 4;
  write_scenario(cfg, run_scenario(cfg), b.string());
  CHECK(read_dir(a) == read_dir(b));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("heatmap: 1x1 glrie against itself") {
  ExperimentConfig cfg = small_config();
  cfg.sweep = SweepSpec{{13.0}, {3.0}, StrategyKind::glrie};
  HeatmapResult h = run_heatmap(cfg, StrategyKind::glrie);
  REQUIRE(h.cells.size() == 1);
  CHECK(h.cell(0, 0).ratio == 1.0);
  CHECK(h.cell(0, 0).auc_glrie == h.cell(0, 0).auc_competitor);
}

TEST_CASE("heatmap: layout and determinism across workers") {
  ExperimentConfig cfg = small_config();
  cfg.runs = 3;
  cfg.sweep = SweepSpec{{1.0, 13.0}, {0.01, 1.0, 5.0}, StrategyKind::lrie};
  HeatmapResult one = run_heatmap(cfg, StrategyKind::lrie);
  REQUIRE(one.cells.size() == 6);
  CHECK(one.cell(2, 1).s_inf == 13.0);
  CHECK(one.cell(2, 1).a_inf == 5.0);
  cfg.workers = 3;
  HeatmapResult three = run_heatmap(cfg, StrategyKind::lrie);
  fs::path a = scratch("heat_a"), b = scratch("heat_b");
  cfg.workers = 1;
  write_heatmap(cfg, one, a.string());
  write_heatmap(cfg, three, b.string());
  auto fa = read_dir(a);
  CHECK(fa == read_dir(b));
  std::istringstream csv(fa.at("heatmap_lrie.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("s_I,a_I,", 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}
