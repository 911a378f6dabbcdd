#include "huro/robot_sim.hpp"

#include <algorithm>
#include <cmath>

namespace huro::sim {
namespace {

using protocol::Action;

StepResult reject(const RobotState& state, std::string reason) {
  return {state, {event::Rejected{std::move(reason)}}};
}

std::string posture_reason(std::string_view action, Posture posture) {
  return std::string(action) + " not allowed while " + std::string(protocol::to_string(posture));
}

// Moves the disc by (dx, dy), recording any contact along the way.
void translate(StepResult& out, const world::CourseMap& map, double dx, double dy) {
  auto& pose = out.state.pose;
  const world::Point from = pose.position();
  const world::Point to{from.x + dx, from.y + dy};
  auto ids = world::sweep_contact(map, from, to, map.robot_radius);
  pose.x = to.x;
  pose.y = to.y;
  if (!ids.empty()) {
    out.state.contact_count += static_cast<long long>(ids.size());
    out.events.emplace_back(event::Contact{std::move(ids)});
  }
}

void set_posture(StepResult& out, Posture posture) {
  if (out.state.posture == posture) return;
  out.state.posture = posture;
  out.events.emplace_back(event::PostureChanged{posture});
}

bool can_walk(Posture p) { return p == Posture::Standing || p == Posture::Crawling; }

}  // namespace

RobotState initial_state(const world::CourseMap& map) {
  RobotState s;
  s.pose = map.start;
  s.finished = world::reached_finish(map, s.pose);
  return s;
}

bool StepResult::rejected() const {
  return std::any_of(events.begin(), events.end(),
                     [](const Event& e) { return std::holds_alternative<event::Rejected>(e); });
}

StepResult apply_command(const RobotState& state, const CommandMsg& cmd, const world::CourseMap& map) {
  StepResult out{state, {}};
  auto& s = out.state;
  const auto& coeffs = s.coefficients;
  const auto name = protocol::to_string(cmd.action);
  const double heading = s.pose.theta;

  switch (cmd.action) {
    case Action::WalkForward:
    case Action::WalkBackward: {
      if (!can_walk(s.posture)) return reject(state, posture_reason(name, s.posture));
      const double sign = cmd.action == Action::WalkForward ? 1.0 : -1.0;
      const double step = s.posture == Posture::Crawling ? kCrawlStepFactor * coeffs.step_m : coeffs.step_m;
      translate(out, map, sign * step * std::cos(heading), sign * step * std::sin(heading));
      break;
    }
    case Action::TurnLeft:
    case Action::TurnRight: {
      if (!can_walk(s.posture)) return reject(state, posture_reason(name, s.posture));
      const double sign = cmd.action == Action::TurnLeft ? 1.0 : -1.0;
      s.pose.theta = world::normalize_angle(heading + sign * coeffs.turn_rad);
      break;
    }
    case Action::ShiftLeft:
    case Action::ShiftRight: {
      if (s.posture != Posture::Standing) return reject(state, posture_reason(name, s.posture));
      const double side = heading + (cmd.action == Action::ShiftLeft ? 1.0 : -1.0) * world::kPi / 2;
      translate(out, map, coeffs.shift_m * std::cos(side), coeffs.shift_m * std::sin(side));
      break;
    }
    case Action::CrawlForward: {
      if (!can_walk(s.posture)) return reject(state, posture_reason(name, s.posture));
      set_posture(out, Posture::Crawling);
      const double step = kCrawlStepFactor * coeffs.step_m;
      translate(out, map, step * std::cos(heading), step * std::sin(heading));
      break;
    }
    case Action::GetUp:
      set_posture(out, Posture::Standing);
      break;
    case Action::StartPose:
      s.pose = map.start;
      s.head_pan = 0.0;
      s.head_tilt = 0.0;
      set_posture(out, Posture::StartPose);
      break;
    case Action::ResetPose:
      s.head_pan = 0.0;
      s.head_tilt = 0.0;
      set_posture(out, Posture::Standing);
      break;
    case Action::HeadPan:
      s.head_pan = std::clamp(s.head_pan + cmd.value.value_or(0.0), -kHeadPanLimit, kHeadPanLimit);
      break;
    case Action::HeadTilt:
      s.head_tilt = std::clamp(s.head_tilt + cmd.value.value_or(0.0), -kHeadTiltLimit, kHeadTiltLimit);
      break;
    case Action::HeadReset:
      s.head_pan = 0.0;
      s.head_tilt = 0.0;
      break;
    case Action::SetCoefficients:
      if (cmd.coefficients) s.coefficients = cmd.coefficients->clamped();
      break;
  }

  const bool finished = world::reached_finish(map, s.pose);
  if (finished && !state.finished) out.events.emplace_back(event::Finished{});
  s.finished = finished;
  return out;
}

RobotState tick(const RobotState& state, double dt, double drain_rate) {
  RobotState next = state;
  next.battery_v = std::max(0.0, state.battery_v - drain_rate * dt);
  return next;
}

protocol::StateMsg snapshot(const RobotState& state) {
  return {state.pose.x,     state.pose.y,          state.pose.theta,    state.head_pan, state.head_tilt,
          state.posture,    state.coefficients,    state.contact_count, state.finished};
}

RobotState force_posture(const RobotState& state, Posture posture) {
  RobotState next = state;
  next.posture = posture;
  return next;
}

}  // namespace huro::sim
