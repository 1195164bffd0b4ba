#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epictl/dynamics.hpp"
#include "epictl/graph.hpp"
#include "epictl/rng.hpp"
#include "epictl/state.hpp"

namespace epictl {

enum class StrategyKind { glrie, lrie, lrsr, mcm, rand };

/// Accepts "glrie" | "lrie" | "lrsr" | "mcm" | "rand"; throws std::invalid_argument otherwise.
StrategyKind parse_strategy(std::string_view name);
std::string_view strategy_name(StrategyKind kind);

/// Scores of the infected nodes, ordered best target first. Healthy nodes
/// never appear.
struct ScoreVector {
  std::vector<NodeId> order;
  std::vector<double> scores;  // scores[k] belongs to order[k]

  std::size_t size() const { return order.size(); }
  /// Score of infected node i; throws std::out_of_range for healthy nodes.
  double score_of(NodeId i) const;
};

/// Relative width under which two scores count as tied. Mathematically equal
/// scores reached through different floating-point sums differ by a few ulps;
/// such ties are broken by ascending node id.
inline constexpr double kScoreTieTolerance = 1e-10;

/// Sorts (score, node) pairs descending by score, then groups near-equal
/// scores and orders each group by ascending node id.
ScoreVector rank_scores(std::vector<std::pair<double, NodeId>> scored);

/// Greedy criticality score of every infected node i:
///   S_i = -[(H_i + I_i) + sum_j (X_j dH_{j,i} - (1 - X_j) dI_{j,i})]
/// where dH_{j,i}, dI_{j,i} are the changes of j's recovery / infection rate
/// when i is counted healthy. Only neighbors of i contribute because rates
/// depend on X only through infected-neighbor counts.
ScoreVector glrie_scores(const Graph& g, const NetworkState& x, const RateModel& model);
ScoreVector glrie_scores(const Graph& g, const NetworkState& x, const RateTable& table);

/// LRIE closed form: beta * (healthy neighbors - infected neighbors) - delta.
ScoreVector lrie_scores(const Graph& g, const NetworkState& x, const LinearSisParams& p);

/// A static node priority: order[0] is treated first; position[order[k]] == k.
struct NodePriority {
  std::vector<NodeId> order;
  std::vector<std::uint32_t> position;

  static NodePriority from_order(std::vector<NodeId> order);
};

struct PowerIterationOptions {
  double tolerance = 1e-10;
  int max_iterations = 100000;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct PrincipalEigen {
  std::vector<double> vector;  // unit 2-norm, nonnegative
  double value = 0.0;          // spectral radius
  int iterations = 0;
  double residual = 0.0;       // ||A u - lambda u||_2
};

/// Power iteration on A + I (the shift keeps bipartite graphs from
/// oscillating). Throws ConvergenceError after max_iterations.
PrincipalEigen principal_eigenvector(const Graph& g, const PowerIterationOptions& opts = {});

/// LRSR: nodes by descending u_i^2 (first-order eigen-drop), ties by id.
NodePriority lrsr_ranking(const Graph& g, const PowerIterationOptions& opts = {});

/// Prefix cuts of a linear arrangement: cuts[k] = edges between order[0..k]
/// and the rest. Size n - 1 (empty for n < 2).
std::vector<int> cut_profile(const Graph& g, std::span<const NodeId> order);
int arrangement_maxcut(const Graph& g, std::span<const NodeId> order);

struct MaxcutArrangement {
  NodePriority priority;
  int maxcut = 0;
  std::string heuristic;
};

/// MCM priority order: per connected component, spectral seriation by the
/// Fiedler vector, then adjacent-swap descent until a pass makes no move.
MaxcutArrangement mcm_ordering(const Graph& g);

/// Nodes that receive a treatment unit, in strategy rank order.
struct ResourceAllocation {
  std::vector<NodeId> targets;
  int budget = 0;
  double rho = 0.0;
};

/// Precomputed, read-only data a strategy needs for one graph. Shared
/// between runs on the same graph.
struct StrategyContext {
  std::shared_ptr<const NodePriority> lrsr;
  std::shared_ptr<const NodePriority> mcm;

  /// Computes whatever `kind` needs (nothing for dynamic strategies).
  static StrategyContext prepare(StrategyKind kind, const Graph& g);
};

/// Stateful allocation policy for one run: owns scratch buffers and the
/// strategy's private random stream (used by RAND only).
class Allocator {
 public:
  Allocator(StrategyKind kind, const Graph& g, const RateModel& model, StrategyContext context,
            std::uint64_t strategy_seed);

  StrategyKind kind() const { return kind_; }
  const RateTable& table() const { return table_; }

  /// Top-min(budget, N_I) infected nodes by this strategy's ranking.
  void allocate(const NetworkState& x, int budget, std::vector<NodeId>& targets);

 private:
  void select_by_score(const NetworkState& x, std::size_t take, std::vector<NodeId>& targets);
  void select_by_priority(const NetworkState& x, const NodePriority& priority, std::size_t take,
                          std::vector<NodeId>& targets);

  StrategyKind kind_;
  const Graph* graph_;
  RateTable table_;
  LinearSisParams linear_;
  StrategyContext context_;
  Rng rng_;
  std::vector<std::pair<double, NodeId>> scratch_;
};

/// One-shot allocation for the current state.
ResourceAllocation allocate(StrategyKind kind, const Graph& g, const NetworkState& x, const RateModel& model,
                            int budget, double rho, std::uint64_t seed);

}  // namespace epictl
