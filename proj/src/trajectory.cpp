#include "epictl/trajectory.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace epictl {

namespace {
constexpr std::string_view kFormatTag = "# epictl-trajectory 1";
}

std::size_t Trajectory::final_count() const {
  long long count = static_cast<long long>(initial_infected.size());
  for (const auto& e : events) count += e.new_state ? 1 : -1;
  return static_cast<std::size_t>(count);
}

std::string validate(const Trajectory& traj) {
  std::vector<std::uint8_t> x(traj.node_count, 0);
  for (NodeId i : traj.initial_infected) {
    if (i >= traj.node_count) return "initial node out of range";
    if (x[i]) return "duplicate initial node";
    x[i] = 1;
  }
  double last = 0.0;
  bool first = true;
  for (const auto& e : traj.events) {
    if (e.node >= traj.node_count) return "event node out of range";
    if (!first && !(e.time > last)) return fmt::format("event times not strictly increasing at t={}", e.time);
    if (e.time < 0.0 || e.time > traj.final_time) return fmt::format("event time {} outside [0, final_time]", e.time);
    if (x[e.node] == e.new_state) return fmt::format("event at t={} does not change node {}", e.time, e.node);
    x[e.node] = e.new_state;
    last = e.time;
    first = false;
  }
  if (traj.final_time > traj.horizon) return "final_time beyond horizon";
  return {};
}

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out << kFormatTag << '\n';
  for (const auto& [key, value] : traj.metadata) out << "# meta " << key << ' ' << value << '\n';
  out << "# nodes " << traj.node_count << '\n';
  out << fmt::format("# horizon {}\n# final_time {}\n", traj.horizon, traj.final_time);
  out << "# initial";
  for (NodeId i : traj.initial_infected) out << ' ' << i;
  out << '\n';
  std::string buf;
  for (const auto& e : traj.events) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{} {} {}\n", e.time, e.node, int{e.new_state});
    out << buf;
  }
}

Trajectory read_trajectory(std::istream& in) {
  Trajectory traj;
  std::string line;
  if (!std::getline(in, line) || line != kFormatTag) throw FormatError("not a trajectory log");
  bool have_nodes = false, have_horizon = false, have_final = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    if (line[0] == '#') {
      std::string hash, key;
      fields >> hash >> key;
      if (key == "meta") {
        std::string name, value;
        fields >> name;
        std::getline(fields >> std::ws, value);
        traj.metadata.emplace_back(name, value);
      } else if (key == "nodes") {
        have_nodes = static_cast<bool>(fields >> traj.node_count);
      } else if (key == "horizon") {
        have_horizon = static_cast<bool>(fields >> traj.horizon);
      } else if (key == "final_time") {
        have_final = static_cast<bool>(fields >> traj.final_time);
      } else if (key == "initial") {
        NodeId i;
        while (fields >> i) traj.initial_infected.push_back(i);
      }
      continue;
    }
    Event e;
    int state = 0;
    std::string extra;
    if (!(fields >> e.time >> e.node >> state) || (state != 0 && state != 1) || (fields >> extra)) {
      throw FormatError("malformed event on line " + std::to_string(line_no));
    }
    e.new_state = static_cast<std::uint8_t>(state);
    traj.events.push_back(e);
  }
  if (!have_nodes || !have_horizon || !have_final) throw FormatError("trajectory header incomplete");
  if (auto why = validate(traj); !why.empty()) throw FormatError("invalid trajectory: " + why);
  return traj;
}

Trajectory read_trajectory_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open trajectory '" + path + "'");
  return read_trajectory(in);
}

}  // namespace epictl
