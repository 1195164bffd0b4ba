#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epictl/graph.hpp"

namespace epictl {

/// Binary node states plus the caches the dynamics need: per-node
/// infected-neighbor counts and an unordered list of infected nodes.
/// The graph is passed to mutators rather than stored, so states stay
/// plain values that can be copied and compared.
class NetworkState {
 public:
  NetworkState() = default;
  /// All nodes healthy.
  explicit NetworkState(const Graph& g);
  NetworkState(const Graph& g, std::span<const NodeId> infected);

  static NetworkState from_states(const Graph& g, std::span<const std::uint8_t> states);

  std::size_t node_count() const { return states_.size(); }
  bool infected(NodeId i) const { return states_[i] != 0; }
  int infected_neighbors(NodeId i) const { return neighbor_counts_[i]; }
  std::size_t infected_count() const { return infected_list_.size(); }

  /// Infected nodes in unspecified order.
  std::span<const NodeId> infected_nodes() const { return infected_list_; }
  std::span<const std::uint8_t> states() const { return states_; }

  void flip(const Graph& g, NodeId i);
  void set(const Graph& g, NodeId i, bool infected) {
    if (this->infected(i) != infected) flip(g, i);
  }

  /// Recomputes every cache from scratch and compares.
  bool coherent(const Graph& g) const;

  bool operator==(const NetworkState& other) const { return states_ == other.states_; }

 private:
  static constexpr std::uint32_t kAbsent = UINT32_MAX;

  std::vector<std::uint8_t> states_;
  std::vector<int> neighbor_counts_;
  std::vector<NodeId> infected_list_;
  std::vector<std::uint32_t> list_position_;
};

}  // namespace epictl
