#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "huro/json.hpp"
#include "huro/result.hpp"
#include "huro/world.hpp"

namespace huro::protocol {

inline constexpr std::string_view kCmdTopic = "/teleop/cmd";
inline constexpr std::string_view kStateTopic = "/teleop/state";
inline constexpr std::string_view kTelemetryTopic = "/teleop/telemetry";
inline constexpr std::string_view kLogTopic = "/teleop/log";
inline constexpr std::string_view kMapTopic = "/teleop/map";
// Topic used on status envelopes when the offending frame named no topic.
inline constexpr std::string_view kStatusTopic = "/status";

// Maximum JSON nesting accepted on the wire.
inline constexpr int kMaxNestingDepth = 64;

// ---------------------------------------------------------------------------
// Envelope

enum class Op { Advertise, Unadvertise, Publish, Subscribe, Unsubscribe, Status };

std::string_view to_string(Op op);
std::optional<Op> op_from_string(std::string_view name);

/// One pub/sub protocol message. `msg` is present exactly for publish and
/// status envelopes.
struct Envelope {
  Op op = Op::Publish;
  std::string topic;
  std::optional<std::string> id;
  std::optional<Json> msg;

  bool operator==(const Envelope&) const = default;
};

enum class DecodeErrc { MalformedJson, UnknownOp, MissingField, InvalidField };
using DecodeError = Error<DecodeErrc>;

std::string_view to_string(DecodeErrc code);

/// Single-line JSON with keys in the order op, id, topic, msg.
std::string encode_envelope(const Envelope& e);

/// Never throws. Unknown extra keys (e.g. roslib's "type") are ignored, as is
/// a stray msg on non-publish ops.
Result<Envelope, DecodeErrc> decode_envelope(std::string_view text);

bool is_valid_topic(std::string_view topic);

Envelope make_publish(std::string_view topic, Json msg);
Envelope make_subscribe(std::string_view topic);
Envelope make_unsubscribe(std::string_view topic);
/// Status reply: msg = {"level": level, "msg": text}.
Envelope make_status(std::string_view level, std::string_view text, std::string_view topic = kStatusTopic);

// ---------------------------------------------------------------------------
// Commands

struct CoefficientSet {
  static constexpr double kStepMin = 0.01, kStepMax = 0.50;
  static constexpr double kTurnMin = 0.01, kTurnMax = 1.57;
  static constexpr double kShiftMin = 0.01, kShiftMax = 0.30;

  double step_m = 0.10;
  double turn_rad = 0.30;
  double shift_m = 0.05;

  CoefficientSet clamped() const;
  bool operator==(const CoefficientSet&) const = default;
};

enum class Action {
  WalkForward,
  WalkBackward,
  TurnLeft,
  TurnRight,
  ShiftLeft,
  ShiftRight,
  CrawlForward,
  GetUp,
  StartPose,
  ResetPose,
  HeadPan,
  HeadTilt,
  HeadReset,
  SetCoefficients,
};

std::string_view to_string(Action action);
std::optional<Action> action_from_string(std::string_view name);

struct CommandMsg {
  Action action = Action::WalkForward;
  std::optional<double> value;                  // head_pan / head_tilt only
  std::optional<CoefficientSet> coefficients;   // set_coefficients only

  bool operator==(const CommandMsg&) const = default;
};

enum class CommandErrc { UnknownAction, NonFiniteValue, MissingValue, MissingCoefficients, InvalidField };
using CommandError = Error<CommandErrc>;

std::string_view to_string(CommandErrc code);

/// Checks a /teleop/cmd payload. Fields the action does not use are dropped;
/// coefficients are clamped into their declared ranges.
Result<CommandMsg, CommandErrc> validate_command(const Json& raw);

Json to_json(const CoefficientSet& c);
Json to_json(const CommandMsg& c);

// ---------------------------------------------------------------------------
// Feedback payloads

enum class Posture { Standing, Crawling, Fallen, StartPose };

std::string_view to_string(Posture posture);
std::optional<Posture> posture_from_string(std::string_view name);

struct StateMsg {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double head_pan = 0.0;
  double head_tilt = 0.0;
  Posture posture = Posture::Standing;
  CoefficientSet coefficients;
  long long contact_count = 0;
  bool finished = false;

  bool operator==(const StateMsg&) const = default;
};

struct TelemetryMsg {
  double fps = 0.0;
  double battery_v = 0.0;
  double uptime_s = 0.0;

  bool operator==(const TelemetryMsg&) const = default;
};

enum class LogLevel { Info, Warn, Error };

std::string_view to_string(LogLevel level);
std::optional<LogLevel> log_level_from_string(std::string_view name);

struct LogMsg {
  LogLevel level = LogLevel::Info;
  std::string text;
  double t = 0.0;

  bool operator==(const LogMsg&) const = default;
};

struct MapMsg {
  world::CourseMap course;
  world::Pose2D pose;

  bool operator==(const MapMsg&) const = default;
};

Json to_json(const StateMsg& s);
Json to_json(const TelemetryMsg& t);
Json to_json(const LogMsg& l);
Json to_json(const MapMsg& m);

std::optional<StateMsg> state_from_json(const Json& j);
std::optional<TelemetryMsg> telemetry_from_json(const Json& j);
std::optional<LogMsg> log_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Map edits published on /teleop/map: {"edit": <kind>, ...}

struct PlaceObstacle {
  world::Obstacle obstacle;
  bool operator==(const PlaceObstacle&) const = default;
};
struct MoveObstacle {
  std::string id;
  double dx = 0.0;
  double dy = 0.0;
  bool operator==(const MoveObstacle&) const = default;
};
struct RemoveObstacle {
  std::string id;
  bool operator==(const RemoveObstacle&) const = default;
};
struct SetStartPose {
  world::Pose2D start;
  bool operator==(const SetStartPose&) const = default;
};

using MapEdit = std::variant<PlaceObstacle, MoveObstacle, RemoveObstacle, SetStartPose>;

/// True when a /teleop/map payload carries an "edit" key (as opposed to a
/// MapMsg broadcast).
bool is_map_edit(const Json& payload);
Result<MapEdit, CommandErrc> parse_map_edit(const Json& payload);
Json to_json(const MapEdit& edit);

}  // namespace huro::protocol
