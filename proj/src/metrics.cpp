#include "epictl/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace epictl {

double auc_between(const Trajectory& traj, double t0, double t1) {
  t0 = std::max(t0, 0.0);
  t1 = std::min(t1, traj.horizon);
  if (!(t1 > t0)) return 0.0;
  double area = 0.0;
  double t = 0.0;
  auto infected = static_cast<double>(traj.initial_infected.size());
  auto segment = [&](double a, double b, double level) {
    const double lo = std::max(a, t0), hi = std::min(b, t1);
    if (hi > lo) area += level * (hi - lo);
  };
  for (const auto& e : traj.events) {
    if (e.time >= t1) break;
    segment(t, e.time, infected);
    infected += e.new_state ? 1.0 : -1.0;
    t = e.time;
  }
  segment(t, traj.horizon, infected);
  return area;
}

double auc(const Trajectory& traj) { return auc_between(traj, 0.0, traj.horizon); }

std::size_t final_infection(const Trajectory& traj) { return traj.final_count(); }

std::optional<double> extinction_time(const Trajectory& traj) {
  long long infected = static_cast<long long>(traj.initial_infected.size());
  if (infected == 0) return 0.0;
  for (const auto& e : traj.events) {
    infected += e.new_state ? 1 : -1;
    if (infected == 0) return e.time;
  }
  return std::nullopt;
}

RunMetrics run_metrics(const Trajectory& traj) {
  return {auc(traj), final_infection(traj), extinction_time(traj)};
}

std::vector<double> infected_at(const Trajectory& traj, std::span<const double> times) {
  std::vector<double> out;
  out.reserve(times.size());
  auto infected = static_cast<double>(traj.initial_infected.size());
  std::size_t next = 0;
  for (double t : times) {
    while (next < traj.events.size() && traj.events[next].time <= t) {
      infected += traj.events[next].new_state ? 1.0 : -1.0;
      ++next;
    }
    out.push_back(infected);
  }
  return out;
}

std::vector<double> time_grid(double t_max, std::size_t points) {
  if (points < 2) throw MetricsError("time grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = t_max * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  grid.back() = t_max;
  return grid;
}

RunRecord make_record(const Trajectory& traj, std::span<const double> grid, std::uint64_t seed) {
  return {seed, run_metrics(traj), infected_at(traj, grid)};
}

SampleStats sample_stats(std::span<const double> values) {
  SampleStats s;
  const auto m = static_cast<double>(values.size());
  if (values.empty()) return s;
  // Shifted by the first sample so identical samples give exactly zero spread.
  const double k = values.front();
  double sum = 0.0, sq = 0.0;
  for (double v : values) {
    sum += v - k;
    sq += (v - k) * (v - k);
  }
  s.mean = k + sum / m;
  if (values.size() < 2) return s;
  sq = std::max(0.0, sq - sum * sum / m);
  s.std = std::sqrt(sq / (m - 1.0));
  s.ci95 = kGaussianZ95 * s.std / std::sqrt(m);
  return s;
}

BatchSummary summarize(std::vector<RunRecord> runs, std::span<const double> grid, std::size_t node_count,
                       double t_max) {
  if (runs.empty()) throw MetricsError("empty batch");
  if (node_count == 0) throw MetricsError("batch over an empty graph");
  BatchSummary b;
  b.node_count = node_count;
  b.t_max = t_max;
  b.grid.assign(grid.begin(), grid.end());
  const auto n = static_cast<double>(node_count);
  std::vector<double> column(runs.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      if (runs[r].curve.size() != grid.size()) throw MetricsError("run curve does not match the grid");
      column[r] = runs[r].curve[k] / n;
    }
    const SampleStats s = sample_stats(column);
    b.mean_fraction.push_back(s.mean);
    b.ci95.push_back(s.ci95);
  }
  std::vector<double> aucs, fis, eets;
  for (const auto& r : runs) {
    aucs.push_back(r.metrics.auc);
    fis.push_back(static_cast<double>(r.metrics.fis));
    if (r.metrics.eet) {
      eets.push_back(*r.metrics.eet);
    } else {
      ++b.censored;
    }
  }
  b.auc = sample_stats(aucs);
  b.fis = sample_stats(fis);
  if (!eets.empty()) b.mean_eet = sample_stats(eets).mean;
  b.runs = std::move(runs);
  return b;
}

BatchSummary batch_summary(std::span<const Trajectory> trajectories, std::size_t grid_points) {
  if (trajectories.empty()) throw MetricsError("empty batch");
  const double t_max = trajectories.front().horizon;
  const std::size_t n = trajectories.front().node_count;
  const auto grid = time_grid(t_max, grid_points);
  std::vector<RunRecord> runs;
  for (const auto& t : trajectories) {
    if (t.horizon != t_max || t.node_count != n) throw MetricsError("batch mixes horizons or graph sizes");
    runs.push_back(make_record(t, grid, 0));
  }
  return summarize(std::move(runs), grid, n, t_max);
}

double auc_ratio(double mean_auc_a, double mean_auc_b) {
  if (mean_auc_b == 0.0) return mean_auc_a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return mean_auc_a / mean_auc_b;
}

double auc_ratio(const BatchSummary& a, const BatchSummary& b) { return auc_ratio(a.auc.mean, b.auc.mean); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

void write_runs_csv(std::ostream& out, const BatchSummary& batch, const std::string& strategy,
                    const std::string& params) {
  out << "seed,strategy,params,auc,fis,eet,censored\n";
  for (const auto& r : batch.runs) {
    out << r.seed << ',' << strategy << ",\"" << params << "\"," << format_number(r.metrics.auc) << ','
        << r.metrics.fis << ',' << (r.metrics.eet ? format_number(*r.metrics.eet) : std::string()) << ','
        << (r.metrics.censored() ? 1 : 0) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const BatchSummary& batch) {
  out << "time,mean_fraction,ci95_low,ci95_high,ci95_half_width\n";
  for (std::size_t k = 0; k < batch.grid.size(); ++k) {
    const double m = batch.mean_fraction[k], h = batch.ci95[k];
    out << format_number(batch.grid[k]) << ',' << format_number(m) << ',' << format_number(m - h) << ','
        << format_number(m + h) << ',' << format_number(h) << '\n';
  }
}

}  // namespace epictl
