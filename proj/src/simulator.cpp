#include "epictl/simulator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace epictl {

void SimConfig::validate() const {
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
  if (budget < 0) throw std::invalid_argument("budget must be >= 0");
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be >= 0");
  if (initial.nodes.empty() && !(initial.fraction > 0.0 && initial.fraction <= 1.0)) {
    throw std::invalid_argument("initial infection fraction must lie in (0, 1]");
  }
  if (reallocation == ReallocationPolicy::fixed_interval && !(reallocation_interval > 0.0)) {
    throw std::invalid_argument("reallocation interval must be > 0");
  }
}

std::vector<NodeId> draw_initial_infected(const Graph& g, const SimConfig& cfg) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> chosen;
  if (!cfg.initial.nodes.empty()) {
    chosen = cfg.initial.nodes;
    for (NodeId i : chosen)
      if (i >= n) throw std::invalid_argument("initial node out of range");
  } else {
    auto k = static_cast<std::size_t>(std::llround(cfg.initial.fraction * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n);
    Rng rng(derive_seed(cfg.seed, Stream::initial_infection));
    std::vector<NodeId> pool(n);
    for (NodeId i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t a = 0; a < k; ++a) std::swap(pool[a], pool[a + rng.index(n - a)]);
    chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  return chosen;
}

Engine::Engine(const Graph& g, const RateTable& table, double rho, NetworkState initial)
    : graph_(&g), table_(&table), rho_(rho), state_(std::move(initial)), treated_(g.node_count(), 0) {
  if (table.max_degree() < g.max_degree()) throw std::invalid_argument("rate table smaller than max degree");
  while (leaves_ < g.node_count()) leaves_ *= 2;
  tree_.assign(2 * leaves_, 0.0);
  for (NodeId i = 0; i < g.node_count(); ++i) tree_[leaves_ + i] = compute_rate(i);
  for (std::size_t k = leaves_ - 1; k >= 1; --k) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
}

double Engine::compute_rate(NodeId i) const {
  const int n = state_.infected_neighbors(i);
  const int d = graph_->degree(i);
  if (!state_.infected(i)) return table_->infection(n, d);
  return table_->recovery(n, d) + (treated_[i] ? rho_ : 0.0);
}

void Engine::refresh(NodeId i) {
  std::size_t k = leaves_ + i;
  tree_[k] = compute_rate(i);
  // Parents are recomputed, not adjusted by deltas, so no rounding drift.
  for (k /= 2; k >= 1; k /= 2) tree_[k] = tree_[2 * k] + tree_[2 * k + 1];
}

void Engine::set_treatment(std::span<const NodeId> targets) {
  for (NodeId i : targets) {
    if (!state_.infected(i)) throw AllocationError("resource allocated to healthy node " + std::to_string(i));
  }
  for (NodeId i : treated_list_) treated_[i] = 0;
  for (NodeId i : targets) treated_[i] = 1;
  for (NodeId i : treated_list_)
    if (!treated_[i]) refresh(i);
  for (NodeId i : targets) refresh(i);
  treated_list_.assign(targets.begin(), targets.end());
}

std::optional<double> Engine::sample_waiting_time(Rng& rng) const {
  const double total = total_rate();
  if (!(total > 0.0)) return std::nullopt;
  return rng.exponential(total);
}

NodeId Engine::sample_node(Rng& rng) const {
  for (;;) {
    double u = rng.uniform() * tree_[1];
    std::size_t k = 1;
    while (k < leaves_) {
      const double left = tree_[2 * k];
      if (u < left) {
        k = 2 * k;
      } else {
        u -= left;
        k = 2 * k + 1;
      }
    }
    // Rounding can land on a zero-rate leaf at a boundary; redraw.
    if (tree_[k] > 0.0) return static_cast<NodeId>(k - leaves_);
  }
}

void Engine::flip(NodeId i) {
  state_.flip(*graph_, i);
  if (!state_.infected(i) && treated_[i]) {
    treated_[i] = 0;
    std::erase(treated_list_, i);
  }
  refresh(i);
  for (NodeId j : graph_->neighbors(i)) refresh(j);
}

StepOutcome Engine::step(Rng& rng) {
  StepOutcome out;
  auto dt = sample_waiting_time(rng);
  if (!dt) {
    out.absorbed = true;
    return out;
  }
  out.waiting_time = *dt;
  out.node = sample_node(rng);
  flip(out.node);
  time_ += *dt;
  return out;
}

bool Engine::coherent() const {
  if (!state_.coherent(*graph_)) return false;
  for (NodeId i = 0; i < graph_->node_count(); ++i) {
    if (treated_[i] && !state_.infected(i)) return false;
    if (tree_[leaves_ + i] != compute_rate(i)) return false;
  }
  for (std::size_t k = leaves_ - 1; k >= 1; --k) {
    if (tree_[k] != tree_[2 * k] + tree_[2 * k + 1]) return false;
  }
  return true;
}

NextReactionEngine::NextReactionEngine(const Graph& g, const RateTable& table, double rho, NetworkState initial,
                                       std::uint64_t key)
    : graph_(&g),
      table_(&table),
      rho_(rho),
      key_(key),
      state_(std::move(initial)),
      treated_(g.node_count(), 0),
      nodes_(g.node_count()),
      heap_(g.node_count()),
      where_(g.node_count()) {
  if (table.max_degree() < g.max_degree()) throw std::invalid_argument("rate table smaller than max degree");
  for (NodeId i = 0; i < g.node_count(); ++i) {
    draw_next(i, 0);
    draw_next(i, 1);
    Node& nd = nodes_[i];
    nd.rate = compute_rate(i);
    const Channel& ch = nd.channel[state_.infected(i) ? 1 : 0];
    nd.fire_at = nd.rate > 0.0 ? (ch.next - ch.internal) / nd.rate : INFINITY;
    heap_[i] = i;
    where_[i] = i;
  }
  for (std::size_t k = heap_.size() / 2; k-- > 0;) sift_down(k);
}

double NextReactionEngine::compute_rate(NodeId i) const {
  const int n = state_.infected_neighbors(i);
  const int d = graph_->degree(i);
  if (!state_.infected(i)) return table_->infection(n, d);
  return table_->recovery(n, d) + (treated_[i] ? rho_ : 0.0);
}

void NextReactionEngine::draw_next(NodeId i, int c) {
  Channel& ch = nodes_[i].channel[c];
  ch.next += counter_exponential(key_, 2 * std::uint64_t{i} + static_cast<std::uint64_t>(c), ch.count++);
}

void NextReactionEngine::update(NodeId i) {
  // Bring the active channel's internal clock to now at the old rate.
  Node& nd = nodes_[i];
  Channel& ch = nd.channel[state_.infected(i) ? 1 : 0];
  ch.internal += nd.rate * (time_ - nd.since);
  nd.since = time_;
}

void NextReactionEngine::place(NodeId i) {
  Node& nd = nodes_[i];
  nd.rate = compute_rate(i);
  const Channel& ch = nd.channel[state_.infected(i) ? 1 : 0];
  nd.fire_at = nd.rate > 0.0 ? time_ + std::max(ch.next - ch.internal, 0.0) / nd.rate : INFINITY;
  sift_up(where_[i]);
  sift_down(where_[i]);
}

void NextReactionEngine::sift_up(std::size_t k) {
  auto before = [&](NodeId a, NodeId b) {
    return nodes_[a].fire_at < nodes_[b].fire_at || (nodes_[a].fire_at == nodes_[b].fire_at && a < b);
  };
  while (k > 0) {
    const std::size_t parent = (k - 1) / 2;
    if (!before(heap_[k], heap_[parent])) break;
    std::swap(heap_[k], heap_[parent]);
    where_[heap_[k]] = k;
    where_[heap_[parent]] = parent;
    k = parent;
  }
}

void NextReactionEngine::sift_down(std::size_t k) {
  auto before = [&](NodeId a, NodeId b) {
    return nodes_[a].fire_at < nodes_[b].fire_at || (nodes_[a].fire_at == nodes_[b].fire_at && a < b);
  };
  for (;;) {
    std::size_t best = k;
    for (std::size_t c = 2 * k + 1; c <= 2 * k + 2 && c < heap_.size(); ++c)
      if (before(heap_[c], heap_[best])) best = c;
    if (best == k) break;
    std::swap(heap_[k], heap_[best]);
    where_[heap_[k]] = k;
    where_[heap_[best]] = best;
    k = best;
  }
}

void NextReactionEngine::set_treatment(std::span<const NodeId> targets) {
  for (NodeId i : targets) {
    if (!state_.infected(i)) throw AllocationError("resource allocated to healthy node " + std::to_string(i));
  }
  for (NodeId i : treated_list_) update(i);
  for (NodeId i : targets) update(i);
  for (NodeId i : treated_list_) treated_[i] = 0;
  for (NodeId i : targets) treated_[i] = 1;
  for (NodeId i : treated_list_)
    if (!treated_[i]) place(i);
  for (NodeId i : targets) place(i);
  treated_list_.assign(targets.begin(), targets.end());
}

NodeId NextReactionEngine::fire() {
  const NodeId i = heap_.front();
  Node& nd = nodes_[i];
  time_ = nd.fire_at;
  for (NodeId j : graph_->neighbors(i)) update(j);
  Channel& ch = nd.channel[state_.infected(i) ? 1 : 0];
  ch.internal = ch.next;
  draw_next(i, state_.infected(i) ? 1 : 0);
  nd.since = time_;
  state_.flip(*graph_, i);
  if (!state_.infected(i) && treated_[i]) {
    treated_[i] = 0;
    std::erase(treated_list_, i);
  }
  place(i);
  for (NodeId j : graph_->neighbors(i)) place(j);
  return i;
}

bool NextReactionEngine::coherent() const {
  if (!state_.coherent(*graph_)) return false;
  for (NodeId i = 0; i < graph_->node_count(); ++i) {
    if (treated_[i] && !state_.infected(i)) return false;
    if (nodes_[i].rate != compute_rate(i)) return false;
    if (heap_[where_[i]] != i) return false;
  }
  for (std::size_t k = 1; k < heap_.size(); ++k) {
    if (nodes_[heap_[k]].fire_at < nodes_[heap_[(k - 1) / 2]].fire_at) return false;
  }
  return true;
}

namespace {

void check_allocation(const NetworkState& x, std::span<const NodeId> targets, int budget, bool exact_count) {
  if (targets.size() > static_cast<std::size_t>(std::max(budget, 0))) {
    throw std::logic_error("allocation exceeds budget");
  }
  if (exact_count && targets.size() != std::min<std::size_t>(static_cast<std::size_t>(budget), x.infected_count())) {
    throw std::logic_error("allocation size differs from min(b, N_I)");
  }
  for (NodeId i : targets)
    if (!x.infected(i)) throw std::logic_error("allocation targets a healthy node");
}

}  // namespace

namespace {

// Uniform face over the two engines for the run loop: peek() gives the time
// of the next event, commit() performs it, skip_to() moves the clock to a
// reallocation instant without an event.
struct DirectStepper {
  Engine engine;
  Rng rng;
  double peek() {
    auto dt = engine.sample_waiting_time(rng);
    return dt ? engine.time() + *dt : INFINITY;
  }
  NodeId commit(double t) {
    const NodeId i = engine.sample_node(rng);
    engine.flip(i);
    engine.advance_to(t);
    return i;
  }
  // Memoryless: the pending draw is discarded.
  void skip_to(double t) { engine.advance_to(t); }
};

struct NextReactionStepper {
  NextReactionEngine engine;
  double peek() { return engine.next_time(); }
  NodeId commit(double) { return engine.fire(); }
  void skip_to(double t) { engine.advance_to(t); }
};

template <class Stepper>
void simulate(Stepper& stepper, Allocator& allocator, const SimConfig& cfg, Trajectory& traj) {
  auto& engine = stepper.engine;
  std::vector<NodeId> targets;
  const bool every_event = cfg.reallocation == ReallocationPolicy::every_event;
  auto reallocate = [&] {
    allocator.allocate(engine.state(), cfg.budget, targets);
    if (cfg.debug_checks) check_allocation(engine.state(), targets, cfg.budget, true);
    engine.set_treatment(targets);
  };
  reallocate();

  double next_realloc = every_event ? INFINITY : cfg.reallocation_interval;
  std::size_t event_count = 0;
  traj.final_time = cfg.t_max;
  for (;;) {
    if (engine.state().infected_count() == 0) {
      traj.final_time = engine.time();
      break;
    }
    const double t_next = stepper.peek();
    if (next_realloc <= cfg.t_max && t_next > next_realloc) {
      stepper.skip_to(next_realloc);
      next_realloc += cfg.reallocation_interval;
      reallocate();
      continue;
    }
    if (t_next > cfg.t_max) break;
    const NodeId i = stepper.commit(t_next);
    traj.events.push_back({t_next, i, static_cast<std::uint8_t>(engine.state().infected(i))});
    ++event_count;
    if (every_event) reallocate();
    if (cfg.debug_checks) {
      const auto mask = engine.treatment();
      if (std::count(mask.begin(), mask.end(), std::uint8_t{1}) > cfg.budget) {
        throw std::logic_error("treatment exceeds budget");
      }
      if (event_count % 1000 == 0 && !engine.coherent()) throw std::logic_error("engine caches out of sync");
    }
  }
}

}  // namespace

Trajectory run(const Graph& g, const RateModel& model, StrategyKind strategy, const SimConfig& cfg,
               StrategyContext context) {
  cfg.validate();
  Allocator allocator(strategy, g, model, std::move(context), derive_seed(cfg.seed, Stream::strategy));
  const std::uint64_t dynamics_seed = derive_seed(cfg.seed, Stream::dynamics);
  const bool direct = cfg.method == SimMethod::direct;

  Trajectory traj;
  traj.node_count = g.node_count();
  traj.initial_infected = draw_initial_infected(g, cfg);
  traj.horizon = cfg.t_max;
  traj.metadata = {
      {"seed", fmt::format("{}", cfg.seed)},
      {"strategy", std::string(strategy_name(strategy))},
      {"model", model.describe()},
      {"budget", fmt::format("{}", cfg.budget)},
      {"rho", fmt::format("{}", cfg.rho)},
      {"t_max", fmt::format("{}", cfg.t_max)},
      {"reallocation", cfg.reallocation == ReallocationPolicy::every_event
                           ? std::string("every_event")
                           : fmt::format("interval:{}", cfg.reallocation_interval)},
      {"method", direct ? "direct" : "next_reaction"},
  };

  NetworkState start(g, traj.initial_infected);
  if (direct) {
    DirectStepper stepper{Engine(g, allocator.table(), cfg.rho, std::move(start)), Rng(dynamics_seed)};
    simulate(stepper, allocator, cfg, traj);
  } else {
    NextReactionStepper stepper{
        NextReactionEngine(g, allocator.table(), cfg.rho, std::move(start), dynamics_seed)};
    simulate(stepper, allocator, cfg, traj);
  }
  return traj;
}

double expected_infected_derivative(const Graph& g, const NetworkState& x, const RateModel& model,
                                    std::span<const std::uint8_t> resources, double rho) {
  double recovery = 0.0, treatment = 0.0, infection = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const int n = x.infected_neighbors(i);
    const int d = g.degree(i);
    if (x.infected(i)) {
      recovery += model.recovery(n, d);
      if (!resources.empty() && resources[i]) treatment += 1.0;
    } else {
      if (!resources.empty() && resources[i]) throw AllocationError("resource allocated to healthy node");
      infection += model.infection(n, d);
    }
  }
  return -recovery - rho * treatment + infection;
}

MonteCarloEstimate estimate_infected_derivative(const Graph& g, const NetworkState& x, const RateModel& model,
                                                std::span<const NodeId> treated, double rho, double h,
                                                std::size_t runs, std::uint64_t seed) {
  if (!(h > 0.0) || runs < 2) throw std::invalid_argument("need h > 0 and at least two runs");
  const RateTable table(model, g.max_degree());
  Engine start(g, table, rho, x);
  start.set_treatment(treated);
  const auto n0 = static_cast<long long>(x.infected_count());
  Rng rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    auto first = start.sample_waiting_time(rng);
    if (!first || *first > h) continue;  // no event before h: change is 0
    Engine engine = start;
    engine.flip(engine.sample_node(rng));
    double t = *first;
    for (;;) {
      auto dt = engine.sample_waiting_time(rng);
      if (!dt || t + *dt > h) break;
      t += *dt;
      engine.flip(engine.sample_node(rng));
    }
    const auto change = static_cast<double>(static_cast<long long>(engine.state().infected_count()) - n0);
    sum += change;
    sum_sq += change * change;
  }
  const auto m = static_cast<double>(runs);
  const double mean = sum / m;
  const double var = (sum_sq - m * mean * mean) / (m - 1.0);
  return {mean / h, std::sqrt(std::max(var, 0.0) / m) / h, runs};
}

}  // namespace epictl
