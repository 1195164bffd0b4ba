#include "epictl/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "epictl/rng.hpp"

namespace epictl {

Graph Graph::from_edges(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<std::vector<NodeId>> adj(node_count);
  for (auto [a, b] : edges) {
    if (a >= node_count || b >= node_count) throw GraphError("edge endpoint out of range");
    if (a == b) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  Graph g;
  g.offsets_.reserve(node_count + 1);
  g.offsets_.push_back(0);
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.neighbors_.insert(g.neighbors_.end(), list.begin(), list.end());
    g.offsets_.push_back(g.neighbors_.size());
  }
  return g;
}

int Graph::max_degree() const {
  int best = 0;
  for (std::size_t i = 0; i < node_count(); ++i) best = std::max(best, degree(static_cast<NodeId>(i)));
  return best;
}

bool Graph::has_edge(NodeId i, NodeId j) const {
  auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < node_count(); ++i) {
    for (NodeId j : neighbors(static_cast<NodeId>(i))) {
      if (j > i) out.emplace_back(static_cast<NodeId>(i), j);
    }
  }
  return out;
}

Graph generate_er(std::size_t n, double avg_degree, std::uint64_t seed) {
  if (n < 2) throw GraphError("ER graph needs n >= 2");
  const double p = avg_degree / static_cast<double>(n - 1);
  if (!(p > 0.0 && p <= 1.0)) throw GraphError("ER edge probability must lie in (0, 1]");
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, edges);
}

Graph generate_pa(std::size_t n, std::size_t m, std::uint64_t seed, PaSeedGraph seed_graph) {
  if (m < 1 || m >= n) throw GraphError("PA graph needs 1 <= m < n");
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  // Every edge endpoint appears once here, so a uniform pick is degree-proportional.
  std::vector<NodeId> endpoints;
  auto add = [&](NodeId a, NodeId b) {
    edges.emplace_back(a, b);
    endpoints.push_back(a);
    endpoints.push_back(b);
  };
  const auto core = static_cast<NodeId>(m + 1);
  if (seed_graph == PaSeedGraph::star) {
    for (NodeId j = 1; j < core; ++j) add(0, j);
  } else {
    for (NodeId i = 0; i < core; ++i)
      for (NodeId j = i + 1; j < core; ++j) add(i, j);
  }
  std::vector<NodeId> targets;
  for (auto v = core; v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      NodeId t = endpoints[rng.index(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) add(v, t);
  }
  return Graph::from_edges(n, edges);
}

Graph generate_sw(std::size_t n, std::size_t k, double p_rewire, std::uint64_t seed) {
  if (k % 2 != 0) throw GraphError("SW ring degree k must be even");
  if (k >= n) throw GraphError("SW ring degree k must be < n");
  if (!(p_rewire >= 0.0 && p_rewire <= 1.0)) throw GraphError("SW rewiring probability must lie in [0, 1]");
  Rng rng(seed);
  std::vector<std::set<NodeId>> adj(n);
  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t s = 1; s <= k / 2; ++s) {
      auto j = static_cast<NodeId>((i + s) % n);
      adj[i].insert(j);
      adj[j].insert(i);
    }
  }
  for (std::size_t s = 1; s <= k / 2; ++s) {
    for (NodeId u = 0; u < n; ++u) {
      auto v = static_cast<NodeId>((u + s) % n);
      if (!rng.bernoulli(p_rewire)) continue;
      if (adj[u].size() >= n - 1) continue;
      NodeId w = 0;
      do {
        w = static_cast<NodeId>(rng.index(n));
      } while (w == u || adj[u].count(w) != 0);
      adj[u].erase(v);
      adj[v].erase(u);
      adj[u].insert(w);
      adj[w].insert(u);
    }
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j : adj[i])
      if (j > i) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges);
}

namespace {

bool parse_id(std::string_view token, std::uint64_t& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

Graph load_edge_list(std::istream& in, EdgeDirection direction) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || view[first] == '#') continue;
    std::istringstream tokens(line);
    std::string a, b, extra;
    std::uint64_t u = 0, v = 0;
    if (!(tokens >> a >> b) || (tokens >> extra) || !parse_id(a, u) || !parse_id(b, v)) {
      throw GraphError("malformed edge on line " + std::to_string(line_no) + ": '" + line + "'");
    }
    raw.emplace_back(u, v);
  }
  if (raw.empty()) throw GraphError("edge list is empty");

  std::vector<std::uint64_t> ids;
  ids.reserve(raw.size() * 2);
  for (auto [u, v] : raw) {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto compact = [&](std::uint64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(raw.size());
  if (direction == EdgeDirection::symmetrize) {
    for (auto [u, v] : raw) edges.emplace_back(compact(u), compact(v));
  } else {
    std::vector<std::pair<NodeId, NodeId>> directed;
    for (auto [u, v] : raw) directed.emplace_back(compact(u), compact(v));
    std::sort(directed.begin(), directed.end());
    for (auto [u, v] : directed) {
      if (u < v && std::binary_search(directed.begin(), directed.end(), std::pair{v, u})) {
        edges.emplace_back(u, v);
      }
    }
  }
  return Graph::from_edges(ids.size(), edges);
}

Graph load_edge_list_file(const std::string& path, EdgeDirection direction) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open edge list '" + path + "'");
  return load_edge_list(in, direction);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
  for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

}  // namespace epictl
