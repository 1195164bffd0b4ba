#include "epictl/state.hpp"

#include <algorithm>

namespace epictl {

NetworkState::NetworkState(const Graph& g)
    : states_(g.node_count(), 0),
      neighbor_counts_(g.node_count(), 0),
      list_position_(g.node_count(), kAbsent) {}

NetworkState::NetworkState(const Graph& g, std::span<const NodeId> infected) : NetworkState(g) {
  for (NodeId i : infected) {
    if (i >= g.node_count()) throw GraphError("infected node id out of range");
    set(g, i, true);
  }
}

NetworkState NetworkState::from_states(const Graph& g, std::span<const std::uint8_t> states) {
  if (states.size() != g.node_count()) throw GraphError("state vector size does not match graph");
  NetworkState x(g);
  for (NodeId i = 0; i < states.size(); ++i) x.set(g, i, states[i] != 0);
  return x;
}

void NetworkState::flip(const Graph& g, NodeId i) {
  const bool now_infected = states_[i] == 0;
  states_[i] = now_infected ? 1 : 0;
  const int delta = now_infected ? 1 : -1;
  for (NodeId j : g.neighbors(i)) neighbor_counts_[j] += delta;
  if (now_infected) {
    list_position_[i] = static_cast<std::uint32_t>(infected_list_.size());
    infected_list_.push_back(i);
  } else {
    const std::uint32_t pos = list_position_[i];
    const NodeId last = infected_list_.back();
    infected_list_[pos] = last;
    list_position_[last] = pos;
    infected_list_.pop_back();
    list_position_[i] = kAbsent;
  }
}

bool NetworkState::coherent(const Graph& g) const {
  std::size_t count = 0;
  for (NodeId i = 0; i < node_count(); ++i) {
    int n = 0;
    for (NodeId j : g.neighbors(i)) n += states_[j];
    if (n != neighbor_counts_[i]) return false;
    if (states_[i]) {
      ++count;
      if (list_position_[i] == kAbsent || infected_list_[list_position_[i]] != i) return false;
    } else if (list_position_[i] != kAbsent) {
      return false;
    }
  }
  return count == infected_list_.size();
}

}  // namespace epictl
