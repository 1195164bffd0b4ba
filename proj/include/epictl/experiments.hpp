#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "epictl/config.hpp"
#include "epictl/metrics.hpp"

namespace epictl {

/// Environment seed of run `index`: drives the run's graph, initial
/// infection and CTMC draws, and is shared by every strategy and grid cell.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t index);

/// Runs f(job) for job in [0, jobs) on `workers` threads. Results must be
/// keyed by job index; the first exception is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t jobs, std::size_t workers, F&& f) {
  workers = std::max<std::size_t>(1, std::min(workers, jobs));
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs; ++j) f(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t j = next++; j < jobs && !failed; j = next++) {
        try {
          f(j);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Hands out the graph of each run: a fresh draw per run for random
/// generators, or one shared instance (edge lists, resample_per_run=false).
class GraphSource {
 public:
  GraphSource(const GraphSpec& spec, std::uint64_t master_seed);

  bool fixed() const { return fixed_ != nullptr; }
  std::shared_ptr<const Graph> graph_for(std::uint64_t env_seed) const;

 private:
  GraphSpec spec_;
  std::shared_ptr<const Graph> fixed_;
};

struct ScenarioResult {
  std::vector<StrategyKind> strategies;
  std::vector<BatchSummary> batches;  // parallel to strategies
  std::size_t node_count = 0;

  const BatchSummary& batch(StrategyKind kind) const;
};

/// M seeded runs for every configured strategy. Writes nothing.
/// When `trajectory_dir` is non-empty each run's event log is written there
/// as <strategy>_<run>.log.
ScenarioResult run_scenario(const ExperimentConfig& cfg, const std::string& trajectory_dir = {});

/// Writes summary.csv, curve_<s>.csv, runs_<s>.csv and manifest.json into `dir`.
void write_scenario(const ExperimentConfig& cfg, const ScenarioResult& result, const std::string& dir);

/// run_scenario + write_scenario into cfg.output_dir (trajectories under
/// trajectories/ when cfg.write_trajectories).
ScenarioResult run_scenario_to_disk(const ExperimentConfig& cfg);

struct HeatmapCell {
  double s_inf = 0.0;
  double a_inf = 0.0;
  double ratio = 1.0;              // mean AUC(glrie) / mean AUC(competitor)
  double fis_glrie = 0.0;          // mean final infected fraction under glrie
  double fis_competitor = 0.0;
  double auc_glrie = 0.0;
  double auc_competitor = 0.0;
  double extinct_glrie = 0.0;      // fraction of runs extinguished by t_max
  double extinct_competitor = 0.0;
};

struct HeatmapResult {
  StrategyKind competitor = StrategyKind::lrie;
  std::vector<double> s_inf;   // x axis
  std::vector<double> a_inf;   // y axis
  std::vector<HeatmapCell> cells;  // row-major: a_inf outer, s_inf inner

  const HeatmapCell& cell(std::size_t a_index, std::size_t s_index) const {
    return cells[a_index * s_inf.size() + s_index];
  }
};

/// glrie against `competitor` over the (s_I, a_I) grid of cfg.sweep, with
/// (s_H, a_H, delta) taken from cfg.model. Writes nothing.
HeatmapResult run_heatmap(const ExperimentConfig& cfg, StrategyKind competitor);

/// heatmap_<competitor>.csv and manifest.json into `dir`.
void write_heatmap(const ExperimentConfig& cfg, const HeatmapResult& result, const std::string& dir);

}  // namespace epictl
