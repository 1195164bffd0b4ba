#include "epictl/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace epictl {

// 1 - 2/(1 + e^{4x}) == tanh(2x); tanh avoids the cancellation near x = 0.
double sigmoid_infection(int n, int /*d*/, const SigmoidParams& p) {
  return p.s_inf * std::tanh(2.0 * p.a_inf * n);
}

double sigmoid_recovery(int n, int d, const SigmoidParams& p) {
  return p.s_rec * std::tanh(2.0 * p.a_rec * (d - n)) + p.delta;
}

NodeRates linear_sis_rates(int n, int /*d*/, const LinearSisParams& p) {
  return {p.beta * n, p.delta};
}

RateModel RateModel::linear_sis(LinearSisParams p) {
  if (p.beta < 0 || p.delta < 0) throw std::invalid_argument("linear SIS rates must be nonnegative");
  RateModel m;
  m.kind_ = ModelKind::linear_sis;
  m.infection_ = [p](int n, int d) { return linear_sis_rates(n, d, p).infection; };
  m.recovery_ = [p](int n, int d) { return linear_sis_rates(n, d, p).recovery; };
  m.linearization_ = p;
  m.linear_ = p;
  return m;
}

RateModel RateModel::sigmoid(SigmoidParams p) {
  if (p.s_inf < 0 || p.a_inf < 0 || p.s_rec < 0 || p.a_rec < 0 || p.delta < 0) {
    throw std::invalid_argument("sigmoid parameters must be nonnegative");
  }
  RateModel m;
  m.kind_ = ModelKind::sigmoid;
  m.infection_ = [p](int n, int d) { return sigmoid_infection(n, d, p); };
  m.recovery_ = [p](int n, int d) { return sigmoid_recovery(n, d, p); };
  m.linearization_ = {2.0 * p.s_inf * p.a_inf, p.delta};
  m.sigmoid_ = p;
  return m;
}

RateModel RateModel::custom(RateFn infection, RateFn recovery, LinearSisParams linearization) {
  RateModel m;
  m.kind_ = ModelKind::custom;
  m.infection_ = std::move(infection);
  m.recovery_ = std::move(recovery);
  m.linearization_ = linearization;
  return m;
}

std::string RateModel::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case ModelKind::linear_sis:
      out << "linear_sis beta=" << linear_->beta << " delta=" << linear_->delta;
      break;
    case ModelKind::sigmoid:
      out << "sigmoid s_I=" << sigmoid_->s_inf << " a_I=" << sigmoid_->a_inf << " s_H=" << sigmoid_->s_rec
          << " a_H=" << sigmoid_->a_rec << " delta=" << sigmoid_->delta;
      break;
    case ModelKind::custom:
      out << "custom";
      break;
  }
  return out.str();
}

RateTable::RateTable(const RateModel& model, int max_degree) : max_degree_(max_degree) {
  const std::size_t size = index(0, max_degree + 1);
  infection_.resize(size);
  recovery_.resize(size);
  for (int d = 0; d <= max_degree; ++d) {
    for (int n = 0; n <= d; ++n) {
      infection_[index(n, d)] = model.infection(n, d);
      recovery_[index(n, d)] = model.recovery(n, d);
    }
  }
}

namespace {

int count_infected_neighbors(const Graph& g, std::span<const std::uint8_t> x, NodeId i) {
  int n = 0;
  for (NodeId j : g.neighbors(i)) n += x[j] != 0;
  return n;
}

}  // namespace

double infection_rate(const RateModel& model, const Graph& g, std::span<const std::uint8_t> x, NodeId i) {
  return model.infection(count_infected_neighbors(g, x, i), g.degree(i));
}

double recovery_rate(const RateModel& model, const Graph& g, std::span<const std::uint8_t> x, NodeId i) {
  return model.recovery(count_infected_neighbors(g, x, i), g.degree(i));
}

double node_poisson_rate(const NetworkState& x, const Graph& g, NodeId i, const RateModel& model,
                         std::span<const std::uint8_t> resources, double rho) {
  const int n = x.infected_neighbors(i);
  const int d = g.degree(i);
  const bool treated = !resources.empty() && resources[i] != 0;
  if (!x.infected(i)) {
    if (treated) throw AllocationError("resource allocated to healthy node " + std::to_string(i));
    return model.infection(n, d);
  }
  return model.recovery(n, d) + (treated ? rho : 0.0);
}

}  // namespace epictl
