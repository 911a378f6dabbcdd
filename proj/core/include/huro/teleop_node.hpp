#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "huro/protocol.hpp"
#include "huro/robot_sim.hpp"
#include "huro/world.hpp"

namespace huro::node {

using protocol::Envelope;
using protocol::LogLevel;
using protocol::LogMsg;

inline constexpr std::size_t kLogCapacity = 500;
inline constexpr double kTelemetryPeriod = 1.0;  // seconds

// Fixed-capacity log history; the oldest entry is evicted first.
class LogRing {
 public:
  explicit LogRing(std::size_t capacity = kLogCapacity) : capacity_(capacity) {}

  void push(LogMsg entry);
  const std::deque<LogMsg>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::deque<LogMsg> entries_;
};

struct NodeOptions {
  double drain_rate = sim::kDefaultDrainRate;
};

/// The remote-control node. It owns the simulated robot and the course, takes
/// /teleop/cmd and /teleop/map publishes, and emits state, telemetry, map and
/// log envelopes. Not thread-safe: the gateway drives it from one logical
/// owner.
class TeleopNode {
 public:
  explicit TeleopNode(world::CourseMap map, NodeOptions options = {});

  /// Validates and queues commands; applies map edits immediately. Returns the
  /// envelopes to fan out (logs, map broadcasts).
  std::vector<Envelope> handle_publish(const Envelope& e);

  /// Applies queued commands in arrival order, drains the battery and returns
  /// logs for step events, one StateMsg, and a TelemetryMsg once per second.
  std::vector<Envelope> run_tick(double dt);

  /// Records a log entry stamped with node uptime and returns it.
  LogMsg append_log(LogLevel level, std::string text);

  Envelope map_envelope() const;
  Envelope state_envelope() const;

  void set_render_fps(double fps) { render_fps_ = fps; }
  // Test hook: the simulator has no fall model.
  void force_posture(protocol::Posture posture);

  const sim::RobotState& state() const { return state_; }
  const world::CourseMap& map() const { return map_; }
  const LogRing& log() const { return log_; }
  std::size_t queued() const { return queue_.size(); }
  double uptime() const { return uptime_; }

 private:
  Envelope log_envelope(LogLevel level, std::string text);
  std::vector<Envelope> handle_command(const huro::Json& payload);
  std::vector<Envelope> handle_map_edit(const huro::Json& payload);

  world::CourseMap map_;
  NodeOptions options_;
  sim::RobotState state_;
  std::deque<protocol::CommandMsg> queue_;
  LogRing log_;
  double uptime_ = 0.0;
  double since_telemetry_ = 0.0;
  double render_fps_ = 0.0;
};

}  // namespace huro::node
