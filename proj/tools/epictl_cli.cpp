// epictl: command-line front end for graph generation, controlled epidemic
// runs, parameter sweeps and trajectory replay.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "epictl/config.hpp"
#include "epictl/experiments.hpp"
#include "epictl/metrics.hpp"
#include "epictl/trajectory.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string strategy;
};

epictl::ExperimentConfig load(const CommonFlags& flags) {
  epictl::ExperimentConfig cfg = epictl::load_config(flags.config);
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  if (flags.workers > 0) cfg.workers = flags.workers;
  if (flags.seed_set) cfg.seed = flags.seed;
  return cfg;
}

int generate_graph(const CommonFlags& flags) {
  epictl::ExperimentConfig cfg = load(flags);
  epictl::GraphSource source(cfg.graph, cfg.seed);
  auto g = source.graph_for(epictl::run_seed(cfg.seed, 0));
  if (flags.out.empty()) {
    epictl::write_edge_list(std::cout, *g);
  } else {
    std::ofstream out(flags.out);
    if (!out) throw std::runtime_error("cannot write '" + flags.out + "'");
    epictl::write_edge_list(out, *g);
  }
  std::cerr << "graph: " << g->node_count() << " nodes, " << g->edge_count() << " edges\n";
  return 0;
}

int run_command(const CommonFlags& flags, bool trajectories) {
  epictl::ExperimentConfig cfg = load(flags);
  if (!flags.strategy.empty()) cfg.strategies = {epictl::parse_strategy(flags.strategy)};
  if (trajectories) cfg.write_trajectories = true;
  if (cfg.graph.type == epictl::GraphType::edge_list) {
    std::cerr << "note: real-network runs are slow at full size\n";
  }
  auto result = epictl::run_scenario_to_disk(cfg);
  for (std::size_t s = 0; s < result.strategies.size(); ++s) {
    const auto& b = result.batches[s];
    std::cout << epictl::strategy_name(result.strategies[s]) << ": mean AUC " << b.auc.mean << " +/- " << b.auc.ci95
              << ", mean FIS " << b.fis.mean << ", extinct " << (b.run_count() - b.censored) << "/"
              << b.run_count() << '\n';
  }
  std::cout << "wrote " << cfg.output_dir << '\n';
  return 0;
}

int sweep_command(const CommonFlags& flags) {
  epictl::ExperimentConfig cfg = load(flags);
  if (!cfg.sweep) throw epictl::ConfigError("config has no 'sweep' section");
  const auto competitor = flags.strategy.empty() ? cfg.sweep->competitor : epictl::parse_strategy(flags.strategy);
  auto result = epictl::run_heatmap(cfg, competitor);
  epictl::write_heatmap(cfg, result, cfg.output_dir);
  std::cout << "wrote " << cfg.output_dir << "/heatmap_" << epictl::strategy_name(competitor) << ".csv ("
            << result.cells.size() << " cells)\n";
  return 0;
}

int replay_command(const std::string& path, std::size_t grid_points) {
  const epictl::Trajectory traj = epictl::read_trajectory_file(path);
  const epictl::RunMetrics m = epictl::run_metrics(traj);
  std::cout << "nodes," << traj.node_count << '\n'
            << "events," << traj.events.size() << '\n'
            << "horizon," << epictl::format_number(traj.horizon) << '\n'
            << "auc," << epictl::format_number(m.auc) << '\n'
            << "fis," << m.fis << '\n'
            << "eet," << (m.eet ? epictl::format_number(*m.eet) : "") << '\n'
            << "censored," << (m.censored() ? 1 : 0) << '\n';
  if (grid_points >= 2) {
    const auto grid = epictl::time_grid(traj.horizon, grid_points);
    const auto curve = epictl::infected_at(traj, grid);
    std::cout << "time,infected\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
      std::cout << epictl::format_number(grid[k]) << ',' << curve[k] << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epictl - controlled two-state epidemics on networks"};
  app.require_subcommand(1);

  auto add_common = [](CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out, "output directory (file for generate-graph)");
    cmd->add_option("--workers", flags.workers, "worker threads");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&flags](std::uint64_t s) { flags.seed = s, flags.seed_set = true; }, "master seed");
  };

  CommonFlags gen_flags, run_flags, sweep_flags;
  auto* gen = app.add_subcommand("generate-graph", "write the configured graph as a canonical edge list");
  add_common(gen, gen_flags);

  auto* run = app.add_subcommand("run", "run one scenario for every configured strategy");
  add_common(run, run_flags);
  run->add_option("--strategy", run_flags.strategy, "run only this strategy (glrie|lrie|lrsr|mcm|rand)");
  bool trajectories = false;
  run->add_flag("--trajectories", trajectories, "write one event log per run");

  auto* sweep = app.add_subcommand("sweep", "AUC-ratio heatmap of glrie against a competitor");
  add_common(sweep, sweep_flags);
  sweep->add_option("--strategy", sweep_flags.strategy, "competitor (defaults to sweep.competitor)");

  std::string replay_path;
  std::size_t grid_points = 0;
  auto* replay = app.add_subcommand("replay", "metrics of a stored trajectory");
  replay->add_option("trajectory", replay_path, "event log")->required()->check(CLI::ExistingFile);
  replay->add_option("--grid", grid_points, "also print N_I on this many grid points");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return generate_graph(gen_flags);
    if (*run) return run_command(run_flags, trajectories);
    if (*sweep) return sweep_command(sweep_flags);
    if (*replay) return replay_command(replay_path, grid_points);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
