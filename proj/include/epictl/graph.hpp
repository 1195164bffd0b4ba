#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace epictl {

using NodeId = std::uint32_t;

/// Undirected simple graph in compressed adjacency form. Neighbor lists are
/// sorted ascending, symmetric and free of self-loops. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Builds from an edge list. Self-loops and duplicates (in either
  /// orientation) are dropped. Endpoints must be < node_count.
  static Graph from_edges(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
  }
  int degree(NodeId i) const { return static_cast<int>(offsets_[i + 1] - offsets_[i]); }
  int max_degree() const;
  bool has_edge(NodeId i, NodeId j) const;

  /// Edges as (i, j) with i < j, lexicographically sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  bool operator==(const Graph&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// G(n, p) with p = avg_degree / (n - 1).
Graph generate_er(std::size_t n, double avg_degree, std::uint64_t seed);

/// Initial graph for preferential attachment growth.
enum class PaSeedGraph {
  star,      // star on m + 1 nodes; total edge count (n - m) * m
  complete,  // complete graph on m + 1 nodes
};

/// Barabasi-Albert growth: each new node attaches to m distinct existing
/// nodes chosen proportionally to degree.
Graph generate_pa(std::size_t n, std::size_t m, std::uint64_t seed,
                  PaSeedGraph seed_graph = PaSeedGraph::star);

/// Watts-Strogatz: ring lattice with k/2 neighbors per side, each lattice
/// edge rewired at its far endpoint with probability p_rewire.
Graph generate_sw(std::size_t n, std::size_t k, double p_rewire, std::uint64_t seed);

/// How to treat a possibly directed edge list on disk.
enum class EdgeDirection {
  symmetrize,       // i-j present if either (i,j) or (j,i) is listed
  mutual_only,      // i-j present only if both (i,j) and (j,i) are listed
};

/// Parses whitespace-separated integer pairs; '#' lines are comments. Node
/// ids are compacted to 0..N-1 in ascending order of the original ids.
Graph load_edge_list(std::istream& in, EdgeDirection direction = EdgeDirection::symmetrize);
Graph load_edge_list_file(const std::string& path,
                          EdgeDirection direction = EdgeDirection::symmetrize);

/// Canonical text form: a header comment, then "i j" with i < j, sorted.
void write_edge_list(std::ostream& out, const Graph& g);
std::string to_edge_list(const Graph& g);

}  // namespace epictl
