#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "epictl/dynamics.hpp"
#include "epictl/graph.hpp"
#include "epictl/simulator.hpp"
#include "epictl/strategies.hpp"

namespace epictl {

enum class GraphType { er, pa, sw, edge_list };

struct GraphSpec {
  GraphType type = GraphType::er;
  std::size_t n = 100;
  double avg_degree = 8.0;               // er
  std::size_t m = 4;                     // pa
  PaSeedGraph pa_seed = PaSeedGraph::star;
  std::size_t k = 8;                     // sw
  double p_rewire = 0.1;                 // sw
  std::string path;                      // edge_list
  EdgeDirection direction = EdgeDirection::symmetrize;
  /// Random generators draw a fresh graph per run index from the run's graph
  /// stream; when false one graph (stream index 0) is shared by all runs.
  bool resample_per_run = true;

  Graph build(std::uint64_t seed) const;
};

struct ModelSpec {
  ModelKind kind = ModelKind::sigmoid;
  SigmoidParams sigmoid;
  LinearSisParams linear;

  RateModel build() const;
};

struct SweepSpec {
  std::vector<double> s_inf;
  std::vector<double> a_inf;
  StrategyKind competitor = StrategyKind::lrie;
};

/// Everything one experiment needs. Fields that fill gaps in the published
/// setup (delta, t_max, initial fraction, runs) have explicit defaults and
/// are echoed into every manifest.
inline SimConfig batch_sim_defaults() {
  SimConfig s;
  s.method = SimMethod::next_reaction;
  return s;
}

struct ExperimentConfig {
  GraphSpec graph;
  ModelSpec model;
  std::vector<StrategyKind> strategies{StrategyKind::glrie};
  // sim.seed is ignored; runs derive their own. Batches default to the
  // next-reaction engine so strategies sharing a run seed stay coupled.
  SimConfig sim = batch_sim_defaults();
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::size_t grid_points = 101;
  std::optional<SweepSpec> sweep;
  std::string output_dir = "out";
  bool write_trajectories = false;
  std::size_t workers = 1;

  /// Throws ConfigError when an invariant fails (empty grid, unknown
  /// strategy, missing file, out-of-range value).
  void validate() const;
  /// Everything that determines the results; output_dir and workers are left
  /// out so manifests match across destinations and pool sizes.
  nlohmann::json to_json() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

}  // namespace epictl
