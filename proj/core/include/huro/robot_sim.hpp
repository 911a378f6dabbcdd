#pragma once

#include <string>
#include <variant>
#include <vector>

#include "huro/protocol.hpp"
#include "huro/world.hpp"

namespace huro::sim {

using protocol::CoefficientSet;
using protocol::CommandMsg;
using protocol::Posture;

inline constexpr double kHeadPanLimit = 1.2;
inline constexpr double kHeadTiltLimit = 0.6;
inline constexpr double kFullBatteryVolts = 12.6;
inline constexpr double kDefaultDrainRate = 0.0005;  // V/s
inline constexpr double kCrawlStepFactor = 0.5;

struct RobotState {
  world::Pose2D pose;
  double head_pan = 0.0;
  double head_tilt = 0.0;
  Posture posture = Posture::Standing;
  double battery_v = kFullBatteryVolts;
  CoefficientSet coefficients;
  long long contact_count = 0;
  bool finished = false;

  bool operator==(const RobotState&) const = default;
};

// Standing at the course start with a full battery.
RobotState initial_state(const world::CourseMap& map);

namespace event {
struct Contact {
  std::vector<std::string> ids;
  bool operator==(const Contact&) const = default;
};
struct Finished {
  bool operator==(const Finished&) const = default;
};
struct Rejected {
  std::string reason;
  bool operator==(const Rejected&) const = default;
};
struct PostureChanged {
  Posture posture;
  bool operator==(const PostureChanged&) const = default;
};
}  // namespace event

using Event = std::variant<event::Contact, event::Finished, event::Rejected, event::PostureChanged>;

struct StepResult {
  RobotState state;
  std::vector<Event> events;

  bool rejected() const;
};

/// Applies one discrete command. Operator mistakes (moving while fallen,
/// shifting while crawling) come back as a Rejected event with the state
/// untouched. Contacts never block motion; they are counted per obstacle id
/// touched along the step.
StepResult apply_command(const RobotState& state, const CommandMsg& cmd, const world::CourseMap& map);

/// Linear battery drain, floored at zero.
RobotState tick(const RobotState& state, double dt, double drain_rate = kDefaultDrainRate);

protocol::StateMsg snapshot(const RobotState& state);

RobotState force_posture(const RobotState& state, Posture posture);

}  // namespace huro::sim
