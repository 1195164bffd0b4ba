#include "epictl/config.hpp"

#include <filesystem>
#include <fstream>

namespace epictl {

using nlohmann::json;

Graph GraphSpec::build(std::uint64_t seed) const {
  switch (type) {
    case GraphType::er: return generate_er(n, avg_degree, seed);
    case GraphType::pa: return generate_pa(n, m, seed, pa_seed);
    case GraphType::sw: return generate_sw(n, k, p_rewire, seed);
    case GraphType::edge_list: return load_edge_list_file(path, direction);
  }
  throw ConfigError("unknown graph type");
}

RateModel ModelSpec::build() const {
  switch (kind) {
    case ModelKind::linear_sis: return RateModel::linear_sis(linear);
    case ModelKind::sigmoid: return RateModel::sigmoid(sigmoid);
    case ModelKind::custom: break;
  }
  throw ConfigError("custom rate models cannot be built from a config file");
}

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

StrategyKind strategy_from(const std::string& name) {
  try {
    return parse_strategy(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

GraphSpec parse_graph(const json& j) {
  reject_unknown(j, {"type", "n", "avg_degree", "m", "seed_graph", "k", "p_rewire", "path", "direction",
                     "resample_per_run"},
                 "graph");
  GraphSpec g;
  std::string type = "er";
  read(j, "type", type);
  if (type == "er") g.type = GraphType::er;
  else if (type == "pa") g.type = GraphType::pa;
  else if (type == "sw") g.type = GraphType::sw;
  else if (type == "edge_list") g.type = GraphType::edge_list;
  else throw ConfigError("unknown graph type '" + type + "'");
  read(j, "n", g.n);
  read(j, "avg_degree", g.avg_degree);
  read(j, "m", g.m);
  read(j, "k", g.k);
  read(j, "p_rewire", g.p_rewire);
  read(j, "path", g.path);
  read(j, "resample_per_run", g.resample_per_run);
  std::string seed_graph = "star";
  read(j, "seed_graph", seed_graph);
  if (seed_graph == "star") g.pa_seed = PaSeedGraph::star;
  else if (seed_graph == "complete") g.pa_seed = PaSeedGraph::complete;
  else throw ConfigError("unknown PA seed graph '" + seed_graph + "'");
  std::string direction = "symmetrize";
  read(j, "direction", direction);
  if (direction == "symmetrize") g.direction = EdgeDirection::symmetrize;
  else if (direction == "mutual_only") g.direction = EdgeDirection::mutual_only;
  else throw ConfigError("unknown edge direction '" + direction + "'");
  return g;
}

ModelSpec parse_model(const json& j) {
  reject_unknown(j, {"kind", "s_I", "a_I", "s_H", "a_H", "delta", "beta"}, "model");
  ModelSpec m;
  std::string kind = "sigmoid";
  read(j, "kind", kind);
  if (kind == "sigmoid") m.kind = ModelKind::sigmoid;
  else if (kind == "linear_sis") m.kind = ModelKind::linear_sis;
  else throw ConfigError("unknown model kind '" + kind + "'");
  read(j, "s_I", m.sigmoid.s_inf);
  read(j, "a_I", m.sigmoid.a_inf);
  read(j, "s_H", m.sigmoid.s_rec);
  read(j, "a_H", m.sigmoid.a_rec);
  read(j, "delta", m.sigmoid.delta);
  read(j, "beta", m.linear.beta);
  read(j, "delta", m.linear.delta);
  return m;
}

SimConfig parse_sim(const json& j) {
  reject_unknown(j, {"t_max", "budget", "rho", "initial_fraction", "initial_nodes", "reallocation",
                     "reallocation_interval", "debug_checks", "method"},
                 "sim");
  SimConfig s = batch_sim_defaults();
  read(j, "t_max", s.t_max);
  read(j, "budget", s.budget);
  read(j, "rho", s.rho);
  read(j, "initial_fraction", s.initial.fraction);
  read(j, "initial_nodes", s.initial.nodes);
  read(j, "debug_checks", s.debug_checks);
  std::string policy = "every_event";
  read(j, "reallocation", policy);
  if (policy == "every_event") s.reallocation = ReallocationPolicy::every_event;
  else if (policy == "fixed_interval") s.reallocation = ReallocationPolicy::fixed_interval;
  else throw ConfigError("unknown reallocation policy '" + policy + "'");
  read(j, "reallocation_interval", s.reallocation_interval);
  std::string method = "next_reaction";
  read(j, "method", method);
  if (method == "direct") s.method = SimMethod::direct;
  else if (method == "next_reaction") s.method = SimMethod::next_reaction;
  else throw ConfigError("unknown simulation method '" + method + "'");
  return s;
}

const char* graph_type_name(GraphType t) {
  switch (t) {
    case GraphType::er: return "er";
    case GraphType::pa: return "pa";
    case GraphType::sw: return "sw";
    case GraphType::edge_list: return "edge_list";
  }
  return "?";
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"graph", "model", "strategies", "sim", "runs", "seed", "grid_points", "sweep", "output_dir",
                     "write_trajectories", "workers"},
                 "config");
  ExperimentConfig c;
  if (auto it = j.find("graph"); it != j.end()) c.graph = parse_graph(*it);
  if (auto it = j.find("model"); it != j.end()) c.model = parse_model(*it);
  if (auto it = j.find("sim"); it != j.end()) c.sim = parse_sim(*it);
  if (auto it = j.find("strategies"); it != j.end()) {
    std::vector<std::string> names;
    read(j, "strategies", names);
    c.strategies.clear();
    for (const auto& n : names) c.strategies.push_back(strategy_from(n));
  }
  read(j, "runs", c.runs);
  read(j, "seed", c.seed);
  read(j, "grid_points", c.grid_points);
  read(j, "output_dir", c.output_dir);
  read(j, "write_trajectories", c.write_trajectories);
  read(j, "workers", c.workers);
  if (auto it = j.find("sweep"); it != j.end()) {
    reject_unknown(*it, {"s_I", "a_I", "competitor"}, "sweep");
    SweepSpec s;
    read(*it, "s_I", s.s_inf);
    read(*it, "a_I", s.a_inf);
    std::string competitor = "lrie";
    read(*it, "competitor", competitor);
    s.competitor = strategy_from(competitor);
    c.sweep = s;
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

void ExperimentConfig::validate() const {
  if (strategies.empty()) throw ConfigError("strategy list is empty");
  if (runs == 0) throw ConfigError("runs must be >= 1");
  if (grid_points < 2) throw ConfigError("grid_points must be >= 2");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  if (graph.type == GraphType::edge_list && !std::filesystem::exists(graph.path)) {
    throw ConfigError("edge list '" + graph.path + "' does not exist");
  }
  if (graph.type != GraphType::edge_list && graph.n < 2) throw ConfigError("graph needs n >= 2");
  if (sweep && (sweep->s_inf.empty() || sweep->a_inf.empty())) throw ConfigError("sweep grid is empty");
  try {
    sim.validate();
    model.build();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json ExperimentConfig::to_json() const {
  json g = {{"type", graph_type_name(graph.type)}, {"resample_per_run", graph.resample_per_run}};
  switch (graph.type) {
    case GraphType::er: g["n"] = graph.n; g["avg_degree"] = graph.avg_degree; break;
    case GraphType::pa:
      g["n"] = graph.n;
      g["m"] = graph.m;
      g["seed_graph"] = graph.pa_seed == PaSeedGraph::star ? "star" : "complete";
      break;
    case GraphType::sw: g["n"] = graph.n; g["k"] = graph.k; g["p_rewire"] = graph.p_rewire; break;
    case GraphType::edge_list:
      g["path"] = graph.path;
      g["direction"] = graph.direction == EdgeDirection::symmetrize ? "symmetrize" : "mutual_only";
      break;
  }
  json m;
  if (model.kind == ModelKind::linear_sis) {
    m = {{"kind", "linear_sis"}, {"beta", model.linear.beta}, {"delta", model.linear.delta}};
  } else {
    m = {{"kind", "sigmoid"}, {"s_I", model.sigmoid.s_inf}, {"a_I", model.sigmoid.a_inf},
         {"s_H", model.sigmoid.s_rec}, {"a_H", model.sigmoid.a_rec}, {"delta", model.sigmoid.delta}};
  }
  json s = {{"t_max", sim.t_max},
            {"budget", sim.budget},
            {"rho", sim.rho},
            {"reallocation", sim.reallocation == ReallocationPolicy::every_event ? "every_event" : "fixed_interval"},
            {"reallocation_interval", sim.reallocation_interval},
            {"debug_checks", sim.debug_checks},
            {"method", sim.method == SimMethod::direct ? "direct" : "next_reaction"}};
  if (sim.initial.nodes.empty()) s["initial_fraction"] = sim.initial.fraction;
  else s["initial_nodes"] = sim.initial.nodes;
  json names = json::array();
  for (auto k : strategies) names.push_back(std::string(strategy_name(k)));
  json out = {{"graph", g},          {"model", m},         {"strategies", names},
              {"sim", s},            {"runs", runs},       {"seed", seed},
              {"grid_points", grid_points},
              {"write_trajectories", write_trajectories}};
  if (sweep) {
    out["sweep"] = {{"s_I", sweep->s_inf}, {"a_I", sweep->a_inf},
                    {"competitor", std::string(strategy_name(sweep->competitor))}};
  }
  return out;
}

}  // namespace epictl
