#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "epictl/graph.hpp"

namespace epictl {

struct Event {
  double time = 0.0;
  NodeId node = 0;
  std::uint8_t new_state = 0;

  bool operator==(const Event&) const = default;
};

/// Event log of one run. N_I is piecewise constant between events and stays
/// at its last value from final_time up to the horizon.
struct Trajectory {
  std::size_t node_count = 0;
  std::vector<NodeId> initial_infected;  // ascending
  std::vector<Event> events;             // strictly increasing times
  double horizon = 0.0;                  // t_max
  double final_time = 0.0;               // extinction time, or horizon
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t initial_count() const { return initial_infected.size(); }
  /// Infected count after all events.
  std::size_t final_count() const;

  bool operator==(const Trajectory&) const = default;
};

/// Replays the log and checks every structural invariant; returns an
/// explanation of the first violation, or an empty string.
std::string validate(const Trajectory& traj);

/// Line-oriented log: '#' header lines (format tag, metadata echo, node
/// count, horizon, final time, initial infected set), then one
/// "time node new_state" line per event. Doubles use shortest round-trip form.
void write_trajectory(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory_file(const std::string& path);

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace epictl
