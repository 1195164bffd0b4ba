#include "epictl/experiments.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "epictl/simulator.hpp"

namespace epictl {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, 0, index);
}

GraphSource::GraphSource(const GraphSpec& spec, std::uint64_t master_seed) : spec_(spec) {
  if (spec.type == GraphType::edge_list || !spec.resample_per_run) {
    fixed_ = std::make_shared<const Graph>(spec.build(derive_seed(master_seed, Stream::graph)));
  }
}

std::shared_ptr<const Graph> GraphSource::graph_for(std::uint64_t env_seed) const {
  if (fixed_) return fixed_;
  return std::make_shared<const Graph>(spec_.build(derive_seed(env_seed, Stream::graph)));
}

namespace {

// Fixed graphs get their static rankings computed once, before workers start.
struct PreparedSource {
  GraphSource source;
  std::vector<std::pair<StrategyKind, StrategyContext>> fixed_contexts;

  StrategyContext context(StrategyKind kind, const Graph& g) const {
    if (source.fixed()) {
      for (const auto& [k, ctx] : fixed_contexts)
        if (k == kind) return ctx;
    }
    return StrategyContext::prepare(kind, g);
  }
};

PreparedSource prepare_source(const ExperimentConfig& cfg, const std::vector<StrategyKind>& kinds) {
  PreparedSource p{GraphSource(cfg.graph, cfg.seed), {}};
  if (p.source.fixed()) {
    auto g = p.source.graph_for(0);
    for (auto k : kinds) p.fixed_contexts.emplace_back(k, StrategyContext::prepare(k, *g));
  }
  return p;
}

std::string model_params(const RateModel& model) { return model.describe(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

json manifest_base(const ExperimentConfig& cfg, const char* kind) {
  json seeds = json::array();
  for (std::size_t r = 0; r < cfg.runs; ++r) seeds.push_back(run_seed(cfg.seed, r));
  return {{"tool", "epictl"},
          {"version", EPICTL_VERSION},
          {"experiment", kind},
          {"config", cfg.to_json()},
          {"seed_derivation", "run r: derive_seed(seed, 0, r); streams graph=1 initial=2 dynamics=3 strategy=4"},
          {"run_seeds", seeds},
          {"notes",
           {{"lrsr", "static first-order eigen-drop ranking (u_i^2), approximation of the rho-aware variant"},
            {"mcm", "fiedler-seriation+adjacent-swap heuristic, not an exact minimal-maxcut arrangement"},
            {"defaults", "delta, t_max, initial_fraction and runs are explicit config values"}}}};
}

}  // namespace

const BatchSummary& ScenarioResult::batch(StrategyKind kind) const {
  for (std::size_t s = 0; s < strategies.size(); ++s)
    if (strategies[s] == kind) return batches[s];
  throw std::out_of_range("strategy not part of this scenario");
}

ScenarioResult run_scenario(const ExperimentConfig& cfg, const std::string& trajectory_dir) {
  cfg.validate();
  const RateModel model = cfg.model.build();
  const PreparedSource source = prepare_source(cfg, cfg.strategies);
  const std::size_t strategies = cfg.strategies.size();
  const std::size_t runs = cfg.runs;
  const auto grid = time_grid(cfg.sim.t_max, cfg.grid_points);
  if (!trajectory_dir.empty()) fs::create_directories(trajectory_dir);

  std::vector<RunRecord> records(strategies * runs);
  std::vector<std::size_t> sizes(runs, 0);
  parallel_for(strategies * runs, cfg.workers, [&](std::size_t job) {
    const std::size_t s = job / runs, r = job % runs;
    const StrategyKind kind = cfg.strategies[s];
    const std::uint64_t env = run_seed(cfg.seed, r);
    auto g = source.source.graph_for(env);
    SimConfig sim = cfg.sim;
    sim.seed = env;
    Trajectory traj = run(*g, model, kind, sim, source.context(kind, *g));
    records[job] = make_record(traj, grid, env);
    if (s == 0) sizes[r] = g->node_count();
    if (!trajectory_dir.empty()) {
      std::ofstream out(fs::path(trajectory_dir) / fmt::format("{}_{}.log", strategy_name(kind), r));
      write_trajectory(out, traj);
    }
  });

  ScenarioResult result;
  result.strategies = cfg.strategies;
  result.node_count = sizes.front();
  for (std::size_t r = 1; r < runs; ++r)
    if (sizes[r] != result.node_count) throw std::logic_error("runs disagree on graph size");
  for (std::size_t s = 0; s < strategies; ++s) {
    std::vector<RunRecord> batch(std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(s * runs)),
                                 std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>((s + 1) * runs)));
    result.batches.push_back(summarize(std::move(batch), grid, result.node_count, cfg.sim.t_max));
  }
  return result;
}

void write_scenario(const ExperimentConfig& cfg, const ScenarioResult& result, const std::string& dir) {
  fs::create_directories(dir);
  const std::string params = model_params(cfg.model.build());
  std::ostringstream summary;
  summary << "strategy,runs,nodes,auc_mean,auc_std,auc_ci95,fis_mean,fis_std,eet_mean,censored\n";
  for (std::size_t s = 0; s < result.strategies.size(); ++s) {
    const auto name = std::string(strategy_name(result.strategies[s]));
    const BatchSummary& b = result.batches[s];
    summary << name << ',' << b.run_count() << ',' << b.node_count << ',' << format_number(b.auc.mean) << ','
            << format_number(b.auc.std) << ',' << format_number(b.auc.ci95) << ',' << format_number(b.fis.mean)
            << ',' << format_number(b.fis.std) << ',' << (b.mean_eet ? format_number(*b.mean_eet) : "") << ','
            << b.censored << '\n';
    std::ostringstream runs, curve;
    write_runs_csv(runs, b, name, params);
    write_curve_csv(curve, b);
    write_text(fs::path(dir) / ("runs_" + name + ".csv"), runs.str());
    write_text(fs::path(dir) / ("curve_" + name + ".csv"), curve.str());
  }
  write_text(fs::path(dir) / "summary.csv", summary.str());
  write_text(fs::path(dir) / "manifest.json", manifest_base(cfg, "scenario").dump(2) + "\n");
}

ScenarioResult run_scenario_to_disk(const ExperimentConfig& cfg) {
  const std::string traj_dir =
      cfg.write_trajectories ? (fs::path(cfg.output_dir) / "trajectories").string() : std::string();
  ScenarioResult result = run_scenario(cfg, traj_dir);
  write_scenario(cfg, result, cfg.output_dir);
  return result;
}

HeatmapResult run_heatmap(const ExperimentConfig& cfg, StrategyKind competitor) {
  cfg.validate();
  if (!cfg.sweep) throw ConfigError("heatmap needs a 'sweep' section");
  if (cfg.model.kind != ModelKind::sigmoid) throw ConfigError("heatmap sweeps sigmoid parameters");
  const SweepSpec& sweep = *cfg.sweep;
  const std::vector<StrategyKind> pair{StrategyKind::glrie, competitor};
  const PreparedSource source = prepare_source(cfg, pair);
  const std::size_t cols = sweep.s_inf.size(), rows = sweep.a_inf.size();
  const std::size_t cells = cols * rows, runs = cfg.runs;

  struct Outcome {
    RunMetrics metrics[2];
    std::size_t nodes = 0;
  };
  std::vector<Outcome> outcomes(cells * runs);
  parallel_for(cells * runs, cfg.workers, [&](std::size_t job) {
    const std::size_t cell = job / runs, r = job % runs;
    SigmoidParams p = cfg.model.sigmoid;
    p.s_inf = sweep.s_inf[cell % cols];
    p.a_inf = sweep.a_inf[cell / cols];
    const RateModel model = RateModel::sigmoid(p);
    const std::uint64_t env = run_seed(cfg.seed, r);
    auto g = source.source.graph_for(env);
    SimConfig sim = cfg.sim;
    sim.seed = env;
    Outcome& out = outcomes[job];
    out.nodes = g->node_count();
    for (std::size_t s = 0; s < 2; ++s) {
      out.metrics[s] = run_metrics(run(*g, model, pair[s], sim, source.context(pair[s], *g)));
    }
  });

  HeatmapResult result;
  result.competitor = competitor;
  result.s_inf = sweep.s_inf;
  result.a_inf = sweep.a_inf;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    HeatmapCell c;
    c.s_inf = sweep.s_inf[cell % cols];
    c.a_inf = sweep.a_inf[cell / cols];
    double auc[2] = {0, 0}, fis[2] = {0, 0}, extinct[2] = {0, 0};
    for (std::size_t r = 0; r < runs; ++r) {
      const Outcome& o = outcomes[cell * runs + r];
      for (std::size_t s = 0; s < 2; ++s) {
        auc[s] += o.metrics[s].auc;
        fis[s] += static_cast<double>(o.metrics[s].fis) / static_cast<double>(o.nodes);
        extinct[s] += o.metrics[s].censored() ? 0.0 : 1.0;
      }
    }
    const auto m = static_cast<double>(runs);
    c.auc_glrie = auc[0] / m;
    c.auc_competitor = auc[1] / m;
    c.ratio = auc_ratio(c.auc_glrie, c.auc_competitor);
    c.fis_glrie = fis[0] / m;
    c.fis_competitor = fis[1] / m;
    c.extinct_glrie = extinct[0] / m;
    c.extinct_competitor = extinct[1] / m;
    result.cells.push_back(c);
  }
  return result;
}

void write_heatmap(const ExperimentConfig& cfg, const HeatmapResult& result, const std::string& dir) {
  fs::create_directories(dir);
  std::ostringstream csv;
  csv << "s_I,a_I,s_H,a_H,ratio,fis,auc_glrie,auc_competitor,fis_competitor,extinct_glrie,extinct_competitor\n";
  for (const auto& c : result.cells) {
    csv << format_number(c.s_inf) << ',' << format_number(c.a_inf) << ',' << format_number(cfg.model.sigmoid.s_rec)
        << ',' << format_number(cfg.model.sigmoid.a_rec) << ',' << format_number(c.ratio) << ','
        << format_number(c.fis_glrie) << ',' << format_number(c.auc_glrie) << ',' << format_number(c.auc_competitor)
        << ',' << format_number(c.fis_competitor) << ',' << format_number(c.extinct_glrie) << ','
        << format_number(c.extinct_competitor) << '\n';
  }
  const std::string name = std::string(strategy_name(result.competitor));
  write_text(fs::path(dir) / ("heatmap_" + name + ".csv"), csv.str());
  json manifest = manifest_base(cfg, "heatmap");
  manifest["competitor"] = name;
  write_text(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace epictl
