#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "epictl/dynamics.hpp"
#include "epictl/graph.hpp"
#include "epictl/rng.hpp"
#include "epictl/state.hpp"
#include "epictl/strategies.hpp"
#include "epictl/trajectory.hpp"

namespace epictl {

/// Initial infected set: explicit nodes when non-empty, otherwise
/// max(1, round(fraction * N)) nodes drawn uniformly without replacement.
struct InitialInfection {
  double fraction = 0.2;
  std::vector<NodeId> nodes;
};

enum class ReallocationPolicy {
  every_event,     // recompute after every state change
  fixed_interval,  // recompute at multiples of reallocation_interval
};

/// Both are exact samplers of the same CTMC. next_reaction drives every
/// (node, transition) channel by its own counter-based exponential sequence,
/// so runs of different strategies on one seed stay coupled far longer.
enum class SimMethod {
  direct,
  next_reaction,
};

struct SimConfig {
  double t_max = 20.0;
  int budget = 10;
  double rho = 0.0;
  InitialInfection initial;
  std::uint64_t seed = 0;  // environment seed of this run
  ReallocationPolicy reallocation = ReallocationPolicy::every_event;
  double reallocation_interval = 1.0;
  SimMethod method = SimMethod::direct;
  /// Check cache coherence every 1000th event and the allocation
  /// invariants after every reallocation; throws std::logic_error.
  bool debug_checks = false;

  /// Throws std::invalid_argument on an out-of-range field.
  void validate() const;
};

/// Draws the initial infected set for `cfg` on `g` from the run's
/// initial-infection stream. Sorted ascending.
std::vector<NodeId> draw_initial_infected(const Graph& g, const SimConfig& cfg);

struct StepOutcome {
  bool absorbed = false;  // total rate is zero; nothing can ever happen
  double waiting_time = 0.0;
  NodeId node = 0;
};

/// Exact Gillespie direct-method engine for the controlled two-state CTMC.
/// Per-node intensities live in a sum tree; a flip touches the flipped node
/// and its neighbors only, O(d log N).
class Engine {
 public:
  Engine(const Graph& g, const RateTable& table, double rho, NetworkState initial);

  const NetworkState& state() const { return state_; }
  double time() const { return time_; }
  double total_rate() const { return tree_[1]; }
  double rate(NodeId i) const { return tree_[leaves_ + i]; }
  std::span<const std::uint8_t> treatment() const { return treated_; }

  /// Replaces R. Every target must be infected (AllocationError otherwise).
  void set_treatment(std::span<const NodeId> targets);

  /// Draws the waiting time to the next event; nullopt when absorbed.
  std::optional<double> sample_waiting_time(Rng& rng) const;
  /// Picks node i with probability rate(i) / total_rate(). Requires total_rate() > 0.
  NodeId sample_node(Rng& rng) const;
  /// Flips node i. A treated node that recovers loses its treatment.
  void flip(NodeId i);
  void advance_to(double t) { time_ = t; }

  /// sample_waiting_time + sample_node + flip, advancing the clock.
  StepOutcome step(Rng& rng);

  /// Rebuilds every rate from scratch and compares with the incremental ones.
  bool coherent() const;

 private:
  double compute_rate(NodeId i) const;
  void refresh(NodeId i);

  const Graph* graph_;
  const RateTable* table_;
  double rho_;
  NetworkState state_;
  std::vector<std::uint8_t> treated_;
  std::vector<NodeId> treated_list_;
  std::size_t leaves_ = 1;
  std::vector<double> tree_;
  double time_ = 0.0;
};

/// Modified next-reaction engine (random time change representation). Each
/// node has an infection and a recovery channel; only the one matching its
/// state has positive intensity. Channel c of node i fires when its
/// integrated intensity reaches the running sum of counter_exponential(key,
/// 2i + c, k). Next firing times sit in an indexed min-heap.
class NextReactionEngine {
 public:
  NextReactionEngine(const Graph& g, const RateTable& table, double rho, NetworkState initial, std::uint64_t key);

  const NetworkState& state() const { return state_; }
  double time() const { return time_; }
  double rate(NodeId i) const { return nodes_[i].rate; }
  std::span<const std::uint8_t> treatment() const { return treated_; }

  void set_treatment(std::span<const NodeId> targets);

  /// Absolute time of the next firing; +infinity when absorbed.
  double next_time() const { return heap_.empty() ? INFINITY : nodes_[heap_[0]].fire_at; }
  /// Fires the earliest channel: moves the clock there and flips its node.
  NodeId fire();
  /// Moves the clock forward without an event (t <= next_time()).
  void advance_to(double t) { time_ = t; }

  bool coherent() const;

 private:
  struct Channel {
    double internal = 0.0;  // integrated intensity so far
    double next = 0.0;      // internal time of the next firing
    std::uint64_t count = 0;
  };
  struct Node {
    Channel channel[2];  // [0] infection, [1] recovery
    double rate = 0.0;
    double since = 0.0;  // time `internal` of the active channel was last brought up to date
    double fire_at = INFINITY;
  };

  double compute_rate(NodeId i) const;
  void update(NodeId i);
  void draw_next(NodeId i, int c);
  void sift_up(std::size_t k);
  void sift_down(std::size_t k);
  void place(NodeId i);

  const Graph* graph_;
  const RateTable* table_;
  double rho_;
  std::uint64_t key_;
  NetworkState state_;
  std::vector<std::uint8_t> treated_;
  std::vector<NodeId> treated_list_;
  std::vector<Node> nodes_;
  std::vector<NodeId> heap_;        // all nodes, ordered by fire_at
  std::vector<std::size_t> where_;  // heap position of each node
  double time_ = 0.0;
};

/// One controlled run: allocate, step, record, reallocate, until extinction
/// or t_max. Deterministic given cfg.seed.
Trajectory run(const Graph& g, const RateModel& model, StrategyKind strategy, const SimConfig& cfg,
               StrategyContext context = {});

/// Closed-form first derivative at u = 0 of E[N_I(t + u) | X(t) = X]:
///   -sum_i H_i X_i - rho sum_i R_i X_i + sum_i I_i (1 - X_i)
double expected_infected_derivative(const Graph& g, const NetworkState& x, const RateModel& model,
                                    std::span<const std::uint8_t> resources, double rho);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// (E[N_I(h)] - N_I(0)) / h from `runs` independent runs of length h with
/// the treatment held fixed.
MonteCarloEstimate estimate_infected_derivative(const Graph& g, const NetworkState& x, const RateModel& model,
                                                std::span<const NodeId> treated, double rho, double h,
                                                std::size_t runs, std::uint64_t seed);

}  // namespace epictl
