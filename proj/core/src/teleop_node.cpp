#include "huro/teleop_node.hpp"


namespace huro::node {
namespace {

using protocol::CommandErrc;
using huro::Json;

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

}  // namespace

void LogRing::push(LogMsg entry) {
  if (capacity_ == 0) return;
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(entry));
}

TeleopNode::TeleopNode(world::CourseMap map, NodeOptions options)
    : map_(std::move(map)), options_(options), state_(sim::initial_state(map_)) {}

LogMsg TeleopNode::append_log(LogLevel level, std::string text) {
  LogMsg entry{level, std::move(text), uptime_};
  log_.push(entry);
  return entry;
}

Envelope TeleopNode::log_envelope(LogLevel level, std::string text) {
  return protocol::make_publish(protocol::kLogTopic, protocol::to_json(append_log(level, std::move(text))));
}

Envelope TeleopNode::map_envelope() const {
  return protocol::make_publish(protocol::kMapTopic, protocol::to_json(protocol::MapMsg{map_, state_.pose}));
}

Envelope TeleopNode::state_envelope() const {
  return protocol::make_publish(protocol::kStateTopic, protocol::to_json(sim::snapshot(state_)));
}

void TeleopNode::force_posture(protocol::Posture posture) { state_ = sim::force_posture(state_, posture); }

std::vector<Envelope> TeleopNode::handle_publish(const Envelope& e) {
  if (e.op != protocol::Op::Publish || !e.msg) return {};
  if (e.topic == protocol::kCmdTopic) return handle_command(*e.msg);
  if (e.topic == protocol::kMapTopic && protocol::is_map_edit(*e.msg)) return handle_map_edit(*e.msg);
  return {};
}

std::vector<Envelope> TeleopNode::handle_command(const Json& payload) {
  auto cmd = protocol::validate_command(payload);
  if (!cmd) {
    const auto level = cmd.error().code == CommandErrc::UnknownAction ? LogLevel::Warn : LogLevel::Error;
    std::string text(protocol::to_string(cmd.error().code));
    if (!cmd.error().detail.empty()) text += ": " + cmd.error().detail;
    return {log_envelope(level, std::move(text))};
  }
  queue_.push_back(*cmd);
  return {};
}

std::vector<Envelope> TeleopNode::handle_map_edit(const Json& payload) {
  auto edit = protocol::parse_map_edit(payload);
  if (!edit) {
    return {log_envelope(LogLevel::Warn, "map edit rejected: " + std::string(protocol::to_string(edit.error().code)) +
                                              ": " + edit.error().detail)};
  }
  auto result = std::visit(
      [this](const auto& e) -> world::CourseResult<world::CourseMap> {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, protocol::PlaceObstacle>) {
          return world::place_obstacle(map_, e.obstacle);
        } else if constexpr (std::is_same_v<T, protocol::MoveObstacle>) {
          return world::move_obstacle(map_, e.id, e.dx, e.dy);
        } else if constexpr (std::is_same_v<T, protocol::RemoveObstacle>) {
          return world::remove_obstacle(map_, e.id);
        } else {
          return world::set_start_pose(map_, e.start);
        }
      },
      *edit);
  if (!result) {
    return {log_envelope(LogLevel::Warn, "map edit rejected: " + std::string(world::to_string(result.error().code)) +
                                              ": " + result.error().detail)};
  }
  map_ = std::move(result).value();
  state_.finished = world::reached_finish(map_, state_.pose);
  return {map_envelope()};
}

std::vector<Envelope> TeleopNode::run_tick(double dt) {
  std::vector<Envelope> out;
  while (!queue_.empty()) {
    const auto cmd = queue_.front();
    queue_.pop_front();
    auto step = sim::apply_command(state_, cmd, map_);
    state_ = step.state;
    for (const auto& ev : step.events) {
      std::visit(
          [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, sim::event::Rejected>) {
              out.push_back(log_envelope(LogLevel::Warn, "rejected " + std::string(protocol::to_string(cmd.action)) +
                                                             ": " + e.reason));
            } else if constexpr (std::is_same_v<T, sim::event::Contact>) {
              out.push_back(log_envelope(LogLevel::Warn, "contact with " + join(e.ids)));
            } else if constexpr (std::is_same_v<T, sim::event::Finished>) {
              out.push_back(log_envelope(LogLevel::Info, "finish line reached"));
            } else {
              out.push_back(log_envelope(LogLevel::Info, "posture " + std::string(protocol::to_string(e.posture))));
            }
          },
          ev);
    }
  }

  state_ = sim::tick(state_, dt, options_.drain_rate);
  uptime_ += dt;
  since_telemetry_ += dt;
  out.push_back(state_envelope());

  // Tolerance absorbs accumulated rounding from fractional tick periods.
  if (since_telemetry_ >= kTelemetryPeriod - 1e-9) {
    since_telemetry_ -= kTelemetryPeriod;
    out.push_back(protocol::make_publish(protocol::kTelemetryTopic,
                                         protocol::to_json(protocol::TelemetryMsg{render_fps_, state_.battery_v, uptime_})));
  }
  return out;
}

}  // namespace huro::node
