#include "epictl/strategies.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace epictl {

StrategyKind parse_strategy(std::string_view name) {
  if (name == "glrie") return StrategyKind::glrie;
  if (name == "lrie") return StrategyKind::lrie;
  if (name == "lrsr") return StrategyKind::lrsr;
  if (name == "mcm") return StrategyKind::mcm;
  if (name == "rand") return StrategyKind::rand;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::glrie: return "glrie";
    case StrategyKind::lrie: return "lrie";
    case StrategyKind::lrsr: return "lrsr";
    case StrategyKind::mcm: return "mcm";
    case StrategyKind::rand: return "rand";
  }
  return "?";
}

double ScoreVector::score_of(NodeId i) const {
  for (std::size_t k = 0; k < order.size(); ++k)
    if (order[k] == i) return scores[k];
  throw std::out_of_range("no score for node " + std::to_string(i) + " (not infected)");
}

namespace {

double tie_width(const std::vector<std::pair<double, NodeId>>& scored) {
  double scale = 1.0;
  for (const auto& s : scored) scale = std::max(scale, std::abs(s.first));
  return kScoreTieTolerance * scale;
}

// Descending exact sort, then each run of scores within `width` of the run's
// leader is reordered by ascending id.
void order_with_ties(std::vector<std::pair<double, NodeId>>& scored, double width) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  auto begin = scored.begin();
  while (begin != scored.end()) {
    const double floor = begin->first - width;
    auto end = std::find_if(begin, scored.end(), [floor](const auto& s) { return s.first < floor; });
    std::sort(begin, end, [](const auto& a, const auto& b) { return a.second < b.second; });
    begin = end;
  }
}

template <class Rates>
double glrie_score(const Graph& g, const NetworkState& x, const Rates& rates, NodeId i) {
  const int n_i = x.infected_neighbors(i);
  const int d_i = g.degree(i);
  const double base = rates.recovery(n_i, d_i) + rates.infection(n_i, d_i);
  double sum = 0.0;
  for (NodeId j : g.neighbors(i)) {
    // i is infected, so n_j >= 1 and "i healthy" means n_j - 1.
    const int n_j = x.infected_neighbors(j);
    const int d_j = g.degree(j);
    if (x.infected(j)) {
      const double dh = rates.recovery(n_j, d_j) - rates.recovery(n_j - 1, d_j);
      assert(dh <= 1e-12);
      sum += dh;
    } else {
      const double di = rates.infection(n_j, d_j) - rates.infection(n_j - 1, d_j);
      assert(di >= -1e-12);
      sum -= di;
    }
  }
  return -(base + sum);
}

template <class Rates>
ScoreVector glrie_scores_impl(const Graph& g, const NetworkState& x, const Rates& rates) {
  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(x.infected_count());
  for (NodeId i : x.infected_nodes()) scored.emplace_back(glrie_score(g, x, rates, i), i);
  return rank_scores(std::move(scored));
}

double lrie_score(const Graph& g, const NetworkState& x, const LinearSisParams& p, NodeId i) {
  const int infected = x.infected_neighbors(i);
  const int healthy = g.degree(i) - infected;
  return p.beta * (healthy - infected) - p.delta;
}

}  // namespace

ScoreVector rank_scores(std::vector<std::pair<double, NodeId>> scored) {
  order_with_ties(scored, tie_width(scored));
  ScoreVector out;
  out.order.reserve(scored.size());
  out.scores.reserve(scored.size());
  for (const auto& [s, i] : scored) {
    out.order.push_back(i);
    out.scores.push_back(s);
  }
  return out;
}

ScoreVector glrie_scores(const Graph& g, const NetworkState& x, const RateModel& model) {
  return glrie_scores_impl(g, x, model);
}

ScoreVector glrie_scores(const Graph& g, const NetworkState& x, const RateTable& table) {
  return glrie_scores_impl(g, x, table);
}

ScoreVector lrie_scores(const Graph& g, const NetworkState& x, const LinearSisParams& p) {
  std::vector<std::pair<double, NodeId>> scored;
  scored.reserve(x.infected_count());
  for (NodeId i : x.infected_nodes()) scored.emplace_back(lrie_score(g, x, p, i), i);
  return rank_scores(std::move(scored));
}

NodePriority NodePriority::from_order(std::vector<NodeId> order) {
  NodePriority p;
  p.position.assign(order.size(), 0);
  for (std::size_t k = 0; k < order.size(); ++k) p.position[order[k]] = static_cast<std::uint32_t>(k);
  p.order = std::move(order);
  return p;
}

StrategyContext StrategyContext::prepare(StrategyKind kind, const Graph& g) {
  StrategyContext ctx;
  if (kind == StrategyKind::lrsr) ctx.lrsr = std::make_shared<const NodePriority>(lrsr_ranking(g));
  if (kind == StrategyKind::mcm) ctx.mcm = std::make_shared<const NodePriority>(mcm_ordering(g).priority);
  return ctx;
}

Allocator::Allocator(StrategyKind kind, const Graph& g, const RateModel& model, StrategyContext context,
                     std::uint64_t strategy_seed)
    : kind_(kind),
      graph_(&g),
      table_(model, g.max_degree()),
      linear_(model.linearization()),
      context_(std::move(context)),
      rng_(strategy_seed) {
  if (kind_ == StrategyKind::lrsr && !context_.lrsr) context_.lrsr = StrategyContext::prepare(kind_, g).lrsr;
  if (kind_ == StrategyKind::mcm && !context_.mcm) context_.mcm = StrategyContext::prepare(kind_, g).mcm;
}

void Allocator::allocate(const NetworkState& x, int budget, std::vector<NodeId>& targets) {
  targets.clear();
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(std::max(budget, 0)), x.infected_count());
  if (take == 0) return;
  switch (kind_) {
    case StrategyKind::glrie:
    case StrategyKind::lrie:
      select_by_score(x, take, targets);
      break;
    case StrategyKind::lrsr:
      select_by_priority(x, *context_.lrsr, take, targets);
      break;
    case StrategyKind::mcm:
      select_by_priority(x, *context_.mcm, take, targets);
      break;
    case StrategyKind::rand: {
      auto infected = x.infected_nodes();
      targets.assign(infected.begin(), infected.end());
      for (std::size_t k = 0; k < take; ++k) {
        std::swap(targets[k], targets[k + rng_.index(targets.size() - k)]);
      }
      targets.resize(take);
      break;
    }
  }
}

void Allocator::select_by_score(const NetworkState& x, std::size_t take, std::vector<NodeId>& targets) {
  const Graph& g = *graph_;
  scratch_.clear();
  for (NodeId i : x.infected_nodes()) {
    const double s = kind_ == StrategyKind::glrie ? glrie_score(g, x, table_, i) : lrie_score(g, x, linear_, i);
    scratch_.emplace_back(s, i);
  }
  const double width = tie_width(scratch_);
  if (take < scratch_.size()) {
    // Only scores near or above the take-th best can end up selected.
    std::nth_element(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(take - 1), scratch_.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const double cutoff = scratch_[take - 1].first - 4.0 * width;
    auto keep = std::partition(scratch_.begin(), scratch_.end(), [cutoff](const auto& s) { return s.first >= cutoff; });
    scratch_.erase(keep, scratch_.end());
  }
  order_with_ties(scratch_, width);
  for (std::size_t k = 0; k < take; ++k) targets.push_back(scratch_[k].second);
}

void Allocator::select_by_priority(const NetworkState& x, const NodePriority& priority, std::size_t take,
                                   std::vector<NodeId>& targets) {
  auto infected = x.infected_nodes();
  targets.assign(infected.begin(), infected.end());
  auto by_position = [&](NodeId a, NodeId b) { return priority.position[a] < priority.position[b]; };
  std::partial_sort(targets.begin(), targets.begin() + static_cast<std::ptrdiff_t>(take), targets.end(),
                    by_position);
  targets.resize(take);
}

ResourceAllocation allocate(StrategyKind kind, const Graph& g, const NetworkState& x, const RateModel& model,
                            int budget, double rho, std::uint64_t seed) {
  Allocator allocator(kind, g, model, StrategyContext::prepare(kind, g), seed);
  ResourceAllocation out;
  out.budget = budget;
  out.rho = rho;
  allocator.allocate(x, budget, out.targets);
  return out;
}

}  // namespace epictl
