#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epictl/graph.hpp"
#include "epictl/state.hpp"

namespace epictl {

/// Sigmoid rate family. Infection saturates at s_inf as the infected-neighbor
/// count grows; recovery saturates at s_rec + delta as the healthy-neighbor
/// count grows. All parameters are nonnegative.
struct SigmoidParams {
  double s_inf = 0.0;
  double a_inf = 0.0;
  double s_rec = 0.0;
  double a_rec = 0.0;
  double delta = 1.0;
};

/// Standard SIS: infection beta per infected neighbor, recovery delta.
struct LinearSisParams {
  double beta = 0.0;
  double delta = 1.0;
};

struct NodeRates {
  double infection = 0.0;
  double recovery = 0.0;
};

/// s_inf * (1 - 2 / (1 + exp(4 a_inf n))), evaluated as s_inf * tanh(2 a_inf n).
double sigmoid_infection(int n, int d, const SigmoidParams& p);
/// s_rec * (1 - 2 / (1 + exp(4 a_rec (d - n)))) + delta.
double sigmoid_recovery(int n, int d, const SigmoidParams& p);
NodeRates linear_sis_rates(int n, int d, const LinearSisParams& p);

enum class ModelKind { linear_sis, sigmoid, custom };

/// Rate of a node as a function of (infected-neighbor count n, degree d).
using RateFn = std::function<double(int n, int d)>;

/// The pair of node rate functions (I, H). Immutable after construction.
class RateModel {
 public:
  static RateModel linear_sis(LinearSisParams p);
  static RateModel sigmoid(SigmoidParams p);
  /// `linearization` gives the (beta, delta) that LRIE scores with.
  static RateModel custom(RateFn infection, RateFn recovery, LinearSisParams linearization);

  ModelKind kind() const { return kind_; }
  double infection(int n, int d) const { return infection_(n, d); }
  double recovery(int n, int d) const { return recovery_(n, d); }

  /// Linear SIS surrogate used by LRIE: exact for linear_sis, slope at the
  /// origin (2 s_inf a_inf) and delta for sigmoid.
  LinearSisParams linearization() const { return linearization_; }

  const std::optional<SigmoidParams>& sigmoid_params() const { return sigmoid_; }
  const std::optional<LinearSisParams>& linear_params() const { return linear_; }

  std::string describe() const;

 private:
  ModelKind kind_ = ModelKind::custom;
  RateFn infection_;
  RateFn recovery_;
  LinearSisParams linearization_;
  std::optional<SigmoidParams> sigmoid_;
  std::optional<LinearSisParams> linear_;
};

/// RateModel tabulated over 0 <= n <= d <= max_degree, so the simulator
/// and scorers never call through std::function in their inner loops.
class RateTable {
 public:
  RateTable() = default;
  RateTable(const RateModel& model, int max_degree);

  int max_degree() const { return max_degree_; }
  double infection(int n, int d) const { return infection_[index(n, d)]; }
  double recovery(int n, int d) const { return recovery_[index(n, d)]; }

 private:
  static std::size_t index(int n, int d) {
    return static_cast<std::size_t>(d) * static_cast<std::size_t>(d + 1) / 2 + static_cast<std::size_t>(n);
  }

  int max_degree_ = -1;
  std::vector<double> infection_;
  std::vector<double> recovery_;
};

/// Full-state adapter: derives n from X and the neighborhood of i.
double infection_rate(const RateModel& model, const Graph& g, std::span<const std::uint8_t> x, NodeId i);
double recovery_rate(const RateModel& model, const Graph& g, std::span<const std::uint8_t> x, NodeId i);

class AllocationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Total transition intensity of node i:
///   healthy  -> I(n_i, d_i)
///   infected -> H(n_i, d_i) + rho * R_i
/// `resources` is the per-node 0/1 vector R. Throws AllocationError when a
/// healthy node carries a resource.
double node_poisson_rate(const NetworkState& x, const Graph& g, NodeId i, const RateModel& model,
                         std::span<const std::uint8_t> resources, double rho);

}  // namespace epictl
