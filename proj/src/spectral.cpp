// Static, structure-only rankings: LRSR eigen-drop and MCM linear arrangement.

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "epictl/strategies.hpp"

namespace epictl {

PrincipalEigen principal_eigenvector(const Graph& g, const PowerIterationOptions& opts) {
  const std::size_t n = g.node_count();
  PrincipalEigen out;
  if (n == 0) return out;
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  double norm = 0.0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    for (NodeId i = 0; i < n; ++i) {
      double acc = x[i];
      for (NodeId j : g.neighbors(i)) acc += x[j];
      y[i] = acc;
    }
    norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] /= norm;
      change = std::max(change, std::abs(y[i] - x[i]));
    }
    std::swap(x, y);
    if (change < opts.tolerance) {
      out.iterations = it;
      break;
    }
  }
  out.value = norm - 1.0;
  double residual = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    double ax = 0.0;
    for (NodeId j : g.neighbors(i)) ax += x[j];
    residual += (ax - out.value * x[i]) * (ax - out.value * x[i]);
  }
  out.residual = std::sqrt(residual);
  if (out.iterations == 0) {
    throw ConvergenceError("power iteration did not converge in " + std::to_string(opts.max_iterations) +
                               " iterations (residual " + std::to_string(out.residual) + ")",
                           out.residual);
  }
  out.vector = std::move(x);
  return out;
}

NodePriority lrsr_ranking(const Graph& g, const PowerIterationOptions& opts) {
  const PrincipalEigen eig = principal_eigenvector(g, opts);
  std::vector<NodeId> order(g.node_count());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return eig.vector[a] * eig.vector[a] > eig.vector[b] * eig.vector[b];
  });
  return NodePriority::from_order(std::move(order));
}

std::vector<int> cut_profile(const Graph& g, std::span<const NodeId> order) {
  const std::size_t n = order.size();
  std::vector<std::uint32_t> pos(g.node_count());
  for (std::size_t k = 0; k < n; ++k) pos[order[k]] = static_cast<std::uint32_t>(k);
  std::vector<int> cuts;
  if (n < 2) return cuts;
  cuts.reserve(n - 1);
  int cut = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const NodeId u = order[k];
    for (NodeId v : g.neighbors(u)) cut += pos[v] < k ? -1 : 1;
    cuts.push_back(cut);
  }
  return cuts;
}

int arrangement_maxcut(const Graph& g, std::span<const NodeId> order) {
  auto cuts = cut_profile(g, order);
  return cuts.empty() ? 0 : *std::max_element(cuts.begin(), cuts.end());
}

namespace {

constexpr std::size_t kDenseFiedlerLimit = 600;

std::vector<std::vector<NodeId>> connected_components(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<int> label(n, -1);
  std::vector<std::vector<NodeId>> comps;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    comps.emplace_back();
    label[s] = static_cast<int>(comps.size() - 1);
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      comps.back().push_back(u);
      for (NodeId v : g.neighbors(u)) {
        if (label[v] < 0) {
          label[v] = label[s];
          stack.push_back(v);
        }
      }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

// Fiedler vector of the Laplacian of one connected component (local indices).
Eigen::VectorXd fiedler_vector(const Graph& g, const std::vector<NodeId>& comp) {
  const auto m = static_cast<Eigen::Index>(comp.size());
  auto local = [&](NodeId v) {
    return static_cast<Eigen::Index>(std::lower_bound(comp.begin(), comp.end(), v) - comp.begin());
  };
  if (comp.size() <= kDenseFiedlerLimit) {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const NodeId u = comp[static_cast<std::size_t>(a)];
      lap(a, a) = g.degree(u);
      for (NodeId v : g.neighbors(u)) lap(a, local(v)) = -1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    return solver.eigenvectors().col(1);
  }
  // Inverse iteration on the Laplacian, restricted to the complement of the
  // constant vector. A tiny shift keeps the CG system definite.
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index a = 0; a < m; ++a) {
    const NodeId u = comp[static_cast<std::size_t>(a)];
    trips.emplace_back(a, a, g.degree(u) + 1e-8);
    for (NodeId v : g.neighbors(u)) trips.emplace_back(a, local(v), -1.0);
  }
  Eigen::SparseMatrix<double> lap(m, m);
  lap.setFromTriplets(trips.begin(), trips.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-10);
  cg.compute(lap);
  Eigen::VectorXd x(m);
  for (Eigen::Index a = 0; a < m; ++a) x(a) = std::cos(0.7 * static_cast<double>(a)) + 1e-3 * static_cast<double>(a);
  for (int it = 0; it < 200; ++it) {
    x.array() -= x.mean();
    x.normalize();
    Eigen::VectorXd next = cg.solve(x);
    next.array() -= next.mean();
    next.normalize();
    const double change = std::min((next - x).norm(), (next + x).norm());
    x = next;
    if (change < 1e-9) break;
  }
  return x;
}

// Adjacent-swap descent: swapping order[k], order[k+1] changes only the k-th
// prefix cut, so a strict decrease there never raises the maximum.
void adjacent_swap_descent(const Graph& g, std::vector<NodeId>& order, std::vector<std::uint32_t>& pos,
                           std::size_t begin, std::size_t end) {
  auto before = [&](NodeId x, std::size_t k) {
    int e = 0;
    for (NodeId y : g.neighbors(x)) e += pos[y] < k;
    return e;
  };
  constexpr int kMaxPasses = 1000;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool moved = false;
    for (std::size_t k = begin; k + 1 < end; ++k) {
      const NodeId u = order[k];
      const NodeId v = order[k + 1];
      const int keep = g.degree(u) - 2 * before(u, k);
      const int swap = g.degree(v) - 2 * before(v, k);
      if (swap < keep) {
        std::swap(order[k], order[k + 1]);
        pos[u] = static_cast<std::uint32_t>(k + 1);
        pos[v] = static_cast<std::uint32_t>(k);
        moved = true;
      }
    }
    if (!moved) break;
  }
}

}  // namespace

MaxcutArrangement mcm_ordering(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<std::uint32_t> pos(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& comp : connected_components(g)) {
    const std::size_t begin = order.size();
    if (comp.size() <= 2) {
      order.insert(order.end(), comp.begin(), comp.end());
    } else {
      Eigen::VectorXd f = fiedler_vector(g, comp);
      // Canonical sign: the lowest-id node sits at the low end.
      if (f(0) > 0) f = -f;
      std::vector<std::size_t> idx(comp.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return f(static_cast<Eigen::Index>(a)) < f(static_cast<Eigen::Index>(b));
      });
      for (std::size_t a : idx) order.push_back(comp[a]);
    }
    spans.emplace_back(begin, order.size());
  }
  for (std::size_t k = 0; k < n; ++k) pos[order[k]] = static_cast<std::uint32_t>(k);
  for (auto [begin, end] : spans) adjacent_swap_descent(g, order, pos, begin, end);

  MaxcutArrangement out;
  out.maxcut = arrangement_maxcut(g, order);
  out.priority = NodePriority::from_order(std::move(order));
  out.heuristic = "fiedler-seriation+adjacent-swap";
  return out;
}

}  // namespace epictl
