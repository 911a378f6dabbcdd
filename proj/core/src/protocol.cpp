#include "huro/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace huro::protocol {
namespace {

constexpr std::array<std::pair<Op, std::string_view>, 6> kOps{{
    {Op::Advertise, "advertise"},
    {Op::Unadvertise, "unadvertise"},
    {Op::Publish, "publish"},
    {Op::Subscribe, "subscribe"},
    {Op::Unsubscribe, "unsubscribe"},
    {Op::Status, "status"},
}};

constexpr std::array<std::pair<Action, std::string_view>, 14> kActions{{
    {Action::WalkForward, "walk_forward"},
    {Action::WalkBackward, "walk_backward"},
    {Action::TurnLeft, "turn_left"},
    {Action::TurnRight, "turn_right"},
    {Action::ShiftLeft, "shift_left"},
    {Action::ShiftRight, "shift_right"},
    {Action::CrawlForward, "crawl_forward"},
    {Action::GetUp, "get_up"},
    {Action::StartPose, "start_pose"},
    {Action::ResetPose, "reset_pose"},
    {Action::HeadPan, "head_pan"},
    {Action::HeadTilt, "head_tilt"},
    {Action::HeadReset, "head_reset"},
    {Action::SetCoefficients, "set_coefficients"},
}};

constexpr std::array<std::pair<Posture, std::string_view>, 4> kPostures{{
    {Posture::Standing, "standing"},
    {Posture::Crawling, "crawling"},
    {Posture::Fallen, "fallen"},
    {Posture::StartPose, "start_pose"},
}};

constexpr std::array<std::pair<LogLevel, std::string_view>, 3> kLevels{{
    {LogLevel::Info, "info"},
    {LogLevel::Warn, "warn"},
    {LogLevel::Error, "error"},
}};

template <class E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "unknown";
}

template <class E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view name) {
  for (const auto& [e, n] : table) {
    if (n == name) return e;
  }
  return std::nullopt;
}

int nesting_depth(const Json& root) {
  int deepest = 0;
  std::vector<std::pair<const Json*, int>> stack{{&root, 1}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    if (!node->is_structured()) continue;
    deepest = std::max(deepest, depth);
    if (deepest > kMaxNestingDepth) return deepest;
    for (const auto& child : *node) stack.emplace_back(&child, depth + 1);
  }
  return deepest;
}

DecodeError decode_error(DecodeErrc code, std::string detail) { return {code, std::move(detail)}; }

CommandError command_error(CommandErrc code, std::string detail) { return {code, std::move(detail)}; }

std::optional<double> number_field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

Result<CoefficientSet, CommandErrc> coefficients_from_json(const Json& j) {
  if (!j.is_object()) return command_error(CommandErrc::MissingCoefficients, "coefficients must be an object");
  CoefficientSet c;
  const std::pair<const char*, double*> fields[] = {
      {"step_m", &c.step_m}, {"turn_rad", &c.turn_rad}, {"shift_m", &c.shift_m}};
  for (auto [key, out] : fields) {
    auto v = number_field(j, key);
    if (!v) return command_error(CommandErrc::InvalidField, std::string("coefficients.") + key + " must be a number");
    if (!std::isfinite(*v)) return command_error(CommandErrc::NonFiniteValue, std::string("coefficients.") + key);
    *out = *v;
  }
  return c.clamped();
}

}  // namespace

std::string_view to_string(Op op) { return name_of(kOps, op); }
std::optional<Op> op_from_string(std::string_view name) { return lookup(kOps, name); }

std::string_view to_string(DecodeErrc code) {
  switch (code) {
    case DecodeErrc::MalformedJson: return "MalformedJson";
    case DecodeErrc::UnknownOp: return "UnknownOp";
    case DecodeErrc::MissingField: return "MissingField";
    case DecodeErrc::InvalidField: return "InvalidField";
  }
  return "Unknown";
}

bool is_valid_topic(std::string_view topic) { return !topic.empty() && topic.front() == '/'; }

std::string encode_envelope(const Envelope& e) {
  Json j;
  j["op"] = std::string(to_string(e.op));
  if (e.id) j["id"] = *e.id;
  j["topic"] = e.topic;
  if (e.msg && (e.op == Op::Publish || e.op == Op::Status)) j["msg"] = *e.msg;
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

Result<Envelope, DecodeErrc> decode_envelope(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end(), nullptr, false);
  } catch (const std::exception& ex) {
    return decode_error(DecodeErrc::MalformedJson, ex.what());
  }
  if (j.is_discarded()) return decode_error(DecodeErrc::MalformedJson, "frame is not valid JSON");
  if (!j.is_object()) return decode_error(DecodeErrc::MalformedJson, "frame must be a JSON object");
  if (nesting_depth(j) > kMaxNestingDepth) return decode_error(DecodeErrc::InvalidField, "nesting too deep");

  auto op_it = j.find("op");
  if (op_it == j.end()) return decode_error(DecodeErrc::MissingField, "op");
  if (!op_it->is_string()) return decode_error(DecodeErrc::UnknownOp, "op must be a string");
  auto op = op_from_string(op_it->get_ref<const std::string&>());
  if (!op) return decode_error(DecodeErrc::UnknownOp, op_it->get<std::string>());

  Envelope e;
  e.op = *op;
  auto topic_it = j.find("topic");
  if (topic_it == j.end()) return decode_error(DecodeErrc::MissingField, "topic");
  if (!topic_it->is_string() || !is_valid_topic(topic_it->get_ref<const std::string&>())) {
    return decode_error(DecodeErrc::InvalidField, "topic must be a string starting with '/'");
  }
  e.topic = topic_it->get<std::string>();

  if (auto id_it = j.find("id"); id_it != j.end()) {
    if (!id_it->is_string()) return decode_error(DecodeErrc::InvalidField, "id must be a string");
    e.id = id_it->get<std::string>();
  }

  if (e.op == Op::Publish || e.op == Op::Status) {
    auto msg_it = j.find("msg");
    if (msg_it == j.end()) return decode_error(DecodeErrc::MissingField, "msg");
    e.msg = std::move(*msg_it);
  }
  return e;
}

Envelope make_publish(std::string_view topic, Json msg) {
  return Envelope{Op::Publish, std::string(topic), std::nullopt, std::move(msg)};
}

Envelope make_subscribe(std::string_view topic) { return Envelope{Op::Subscribe, std::string(topic), std::nullopt, std::nullopt}; }

Envelope make_unsubscribe(std::string_view topic) {
  return Envelope{Op::Unsubscribe, std::string(topic), std::nullopt, std::nullopt};
}

Envelope make_status(std::string_view level, std::string_view text, std::string_view topic) {
  Json msg{{"level", std::string(level)}, {"msg", std::string(text)}};
  return Envelope{Op::Status, std::string(topic), std::nullopt, std::move(msg)};
}

CoefficientSet CoefficientSet::clamped() const {
  return {std::clamp(step_m, kStepMin, kStepMax), std::clamp(turn_rad, kTurnMin, kTurnMax),
          std::clamp(shift_m, kShiftMin, kShiftMax)};
}

std::string_view to_string(Action action) { return name_of(kActions, action); }
std::optional<Action> action_from_string(std::string_view name) { return lookup(kActions, name); }

std::string_view to_string(CommandErrc code) {
  switch (code) {
    case CommandErrc::UnknownAction: return "UnknownAction";
    case CommandErrc::NonFiniteValue: return "NonFiniteValue";
    case CommandErrc::MissingValue: return "MissingValue";
    case CommandErrc::MissingCoefficients: return "MissingCoefficients";
    case CommandErrc::InvalidField: return "InvalidField";
  }
  return "Unknown";
}

Result<CommandMsg, CommandErrc> validate_command(const Json& raw) {
  if (!raw.is_object()) return command_error(CommandErrc::InvalidField, "command must be an object");
  auto action_it = raw.find("action");
  if (action_it == raw.end() || !action_it->is_string()) {
    return command_error(CommandErrc::UnknownAction, "action must be a string");
  }
  auto action = action_from_string(action_it->get_ref<const std::string&>());
  if (!action) return command_error(CommandErrc::UnknownAction, action_it->get<std::string>());

  CommandMsg cmd;
  cmd.action = *action;

  std::optional<double> value;
  if (auto it = raw.find("value"); it != raw.end() && !it->is_null()) {
    if (!it->is_number()) return command_error(CommandErrc::InvalidField, "value must be a number");
    value = it->get<double>();
    if (!std::isfinite(*value)) return command_error(CommandErrc::NonFiniteValue, "value");
  }

  switch (cmd.action) {
    case Action::HeadPan:
    case Action::HeadTilt:
      if (!value) return command_error(CommandErrc::MissingValue, std::string(to_string(cmd.action)) + " requires value");
      cmd.value = value;
      break;
    case Action::SetCoefficients: {
      auto it = raw.find("coefficients");
      if (it == raw.end() || it->is_null()) return command_error(CommandErrc::MissingCoefficients, "coefficients");
      auto coeffs = coefficients_from_json(*it);
      if (!coeffs) return coeffs.error();
      cmd.coefficients = *coeffs;
      break;
    }
    default:
      break;
  }
  return cmd;
}

Json to_json(const CoefficientSet& c) {
  return Json{{"step_m", c.step_m}, {"turn_rad", c.turn_rad}, {"shift_m", c.shift_m}};
}

Json to_json(const CommandMsg& c) {
  Json j{{"action", std::string(to_string(c.action))}};
  if (c.value) j["value"] = *c.value;
  if (c.coefficients) j["coefficients"] = to_json(*c.coefficients);
  return j;
}

std::string_view to_string(Posture posture) { return name_of(kPostures, posture); }
std::optional<Posture> posture_from_string(std::string_view name) { return lookup(kPostures, name); }

std::string_view to_string(LogLevel level) { return name_of(kLevels, level); }
std::optional<LogLevel> log_level_from_string(std::string_view name) { return lookup(kLevels, name); }

Json to_json(const StateMsg& s) {
  return Json{{"x", s.x},
              {"y", s.y},
              {"theta", s.theta},
              {"head_pan", s.head_pan},
              {"head_tilt", s.head_tilt},
              {"posture", std::string(to_string(s.posture))},
              {"coefficients", to_json(s.coefficients)},
              {"contact_count", s.contact_count},
              {"finished", s.finished}};
}

Json to_json(const TelemetryMsg& t) {
  return Json{{"fps", t.fps}, {"battery_v", t.battery_v}, {"uptime_s", t.uptime_s}};
}

Json to_json(const LogMsg& l) {
  return Json{{"level", std::string(to_string(l.level))}, {"text", l.text}, {"t", l.t}};
}

Json to_json(const MapMsg& m) {
  Json j = world::to_json(m.course);
  j["pose"] = world::to_json(m.pose);
  return j;
}

std::optional<StateMsg> state_from_json(const Json& j) {
  if (!j.is_object()) return std::nullopt;
  StateMsg s;
  const std::pair<const char*, double*> numbers[] = {
      {"x", &s.x}, {"y", &s.y}, {"theta", &s.theta}, {"head_pan", &s.head_pan}, {"head_tilt", &s.head_tilt}};
  for (auto [key, out] : numbers) {
    auto v = number_field(j, key);
    if (!v) return std::nullopt;
    *out = *v;
  }
  auto posture = j.find("posture");
  auto contacts = j.find("contact_count");
  auto finished = j.find("finished");
  auto coeffs = j.find("coefficients");
  if (posture == j.end() || !posture->is_string()) return std::nullopt;
  if (contacts == j.end() || !contacts->is_number_integer()) return std::nullopt;
  if (finished == j.end() || !finished->is_boolean()) return std::nullopt;
  if (coeffs == j.end()) return std::nullopt;
  auto p = posture_from_string(posture->get_ref<const std::string&>());
  auto c = coefficients_from_json(*coeffs);
  if (!p || !c) return std::nullopt;
  s.posture = *p;
  s.coefficients = *c;
  s.contact_count = contacts->get<long long>();
  s.finished = finished->get<bool>();
  return s;
}

std::optional<TelemetryMsg> telemetry_from_json(const Json& j) {
  if (!j.is_object()) return std::nullopt;
  auto fps = number_field(j, "fps");
  auto battery = number_field(j, "battery_v");
  auto uptime = number_field(j, "uptime_s");
  if (!fps || !battery || !uptime) return std::nullopt;
  return TelemetryMsg{*fps, *battery, *uptime};
}

std::optional<LogMsg> log_from_json(const Json& j) {
  if (!j.is_object()) return std::nullopt;
  auto level = j.find("level");
  auto text = j.find("text");
  auto t = number_field(j, "t");
  if (level == j.end() || !level->is_string() || text == j.end() || !text->is_string() || !t) return std::nullopt;
  auto lvl = log_level_from_string(level->get_ref<const std::string&>());
  if (!lvl) return std::nullopt;
  return LogMsg{*lvl, text->get<std::string>(), *t};
}

bool is_map_edit(const Json& payload) { return payload.is_object() && payload.contains("edit"); }

Result<MapEdit, CommandErrc> parse_map_edit(const Json& payload) {
  if (!is_map_edit(payload)) return command_error(CommandErrc::InvalidField, "map edit requires an 'edit' key");
  const auto& kind_json = payload["edit"];
  if (!kind_json.is_string()) return command_error(CommandErrc::InvalidField, "edit must be a string");
  const auto& kind = kind_json.get_ref<const std::string&>();
  auto id_of = [&]() -> std::optional<std::string> {
    auto it = payload.find("id");
    if (it == payload.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
  };
  if (kind == "place_obstacle") {
    auto it = payload.find("obstacle");
    if (it == payload.end()) return command_error(CommandErrc::InvalidField, "place_obstacle requires obstacle");
    auto o = world::obstacle_from_json(*it);
    if (!o) return command_error(CommandErrc::InvalidField, o.error().detail);
    return MapEdit{PlaceObstacle{*o}};
  }
  if (kind == "move_obstacle") {
    auto id = id_of();
    auto dx = number_field(payload, "dx");
    auto dy = number_field(payload, "dy");
    if (!id || !dx || !dy) return command_error(CommandErrc::InvalidField, "move_obstacle requires id, dx, dy");
    if (!std::isfinite(*dx) || !std::isfinite(*dy)) return command_error(CommandErrc::NonFiniteValue, "dx/dy");
    return MapEdit{MoveObstacle{*id, *dx, *dy}};
  }
  if (kind == "remove_obstacle") {
    auto id = id_of();
    if (!id) return command_error(CommandErrc::InvalidField, "remove_obstacle requires id");
    return MapEdit{RemoveObstacle{*id}};
  }
  if (kind == "set_start_pose") {
    auto it = payload.find("start");
    if (it == payload.end()) return command_error(CommandErrc::InvalidField, "set_start_pose requires start");
    auto pose = world::pose_from_json(*it);
    if (!pose) return command_error(CommandErrc::InvalidField, pose.error().detail);
    return MapEdit{SetStartPose{*pose}};
  }
  return command_error(CommandErrc::UnknownAction, "unknown edit '" + kind + "'");
}

Json to_json(const MapEdit& edit) {
  return std::visit(
      [](const auto& e) -> Json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, PlaceObstacle>) {
          return Json{{"edit", "place_obstacle"}, {"obstacle", world::to_json(e.obstacle)}};
        } else if constexpr (std::is_same_v<T, MoveObstacle>) {
          return Json{{"edit", "move_obstacle"}, {"id", e.id}, {"dx", e.dx}, {"dy", e.dy}};
        } else if constexpr (std::is_same_v<T, RemoveObstacle>) {
          return Json{{"edit", "remove_obstacle"}, {"id", e.id}};
        } else {
          return Json{{"edit", "set_start_pose"}, {"start", world::to_json(e.start)}};
        }
      },
      edit);
}

}  // namespace huro::protocol
