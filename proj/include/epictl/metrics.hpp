#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epictl/trajectory.hpp"

namespace epictl {

inline constexpr double kGaussianZ95 = 1.96;

struct RunMetrics {
  double auc = 0.0;               // integral of N_I over [0, horizon], node * time units
  std::size_t fis = 0;            // N_I at the horizon
  std::optional<double> eet;      // first time N_I hits 0; empty when censored

  bool censored() const { return !eet.has_value(); }
};

/// Exact integral of the step function N_I(t) over [0, horizon].
double auc(const Trajectory& traj);
/// Same integral restricted to [t0, t1], clamped to [0, horizon].
double auc_between(const Trajectory& traj, double t0, double t1);
std::size_t final_infection(const Trajectory& traj);
std::optional<double> extinction_time(const Trajectory& traj);
RunMetrics run_metrics(const Trajectory& traj);

/// N_I(t) for each t in `times` (right-continuous: events at t count).
/// `times` must be ascending.
std::vector<double> infected_at(const Trajectory& traj, std::span<const double> times);

/// Evenly spaced grid of `points` >= 2 values covering [0, t_max].
std::vector<double> time_grid(double t_max, std::size_t points);

/// What a batch keeps of one run: its metrics and its curve on the grid.
struct RunRecord {
  std::uint64_t seed = 0;
  RunMetrics metrics;
  std::vector<double> curve;  // infected counts on the batch grid
};

RunRecord make_record(const Trajectory& traj, std::span<const double> grid, std::uint64_t seed);

struct SampleStats {
  double mean = 0.0;
  double std = 0.0;   // sample standard deviation (M - 1)
  double ci95 = 0.0;  // 1.96 * std / sqrt(M)
};

SampleStats sample_stats(std::span<const double> values);

struct BatchSummary {
  std::size_t node_count = 0;
  double t_max = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_fraction;  // mean infected fraction per grid point
  std::vector<double> ci95;           // Gaussian 95% half-width per grid point
  std::vector<RunRecord> runs;
  SampleStats auc;
  SampleStats fis;
  std::optional<double> mean_eet;     // over uncensored runs
  std::size_t censored = 0;

  std::size_t run_count() const { return runs.size(); }
};

class MetricsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws MetricsError for an empty batch or mismatched horizons / sizes.
BatchSummary summarize(std::vector<RunRecord> runs, std::span<const double> grid, std::size_t node_count,
                       double t_max);
BatchSummary batch_summary(std::span<const Trajectory> trajectories, std::size_t grid_points);

/// Mean AUC of `a` over mean AUC of `b`. A zero denominator yields 1 when the
/// numerator is also zero and +infinity otherwise.
double auc_ratio(const BatchSummary& a, const BatchSummary& b);
double auc_ratio(double mean_auc_a, double mean_auc_b);

/// One row per run: seed,strategy,params,auc,fis,eet,censored
void write_runs_csv(std::ostream& out, const BatchSummary& batch, const std::string& strategy,
                    const std::string& params);
/// time,mean_fraction,ci95_low,ci95_high,ci95_half_width
void write_curve_csv(std::ostream& out, const BatchSummary& batch);

/// Shortest round-trip decimal form; "inf" / "nan" for non-finite values.
std::string format_number(double v);

}  // namespace epictl
