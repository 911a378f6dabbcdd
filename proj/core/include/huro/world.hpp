#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "huro/json.hpp"
#include "huro/result.hpp"

namespace huro::world {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultRobotRadius = 0.12;
inline constexpr std::string_view kWallId = "wall";

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

// Wraps an angle into (-pi, pi].
double normalize_angle(double theta);

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, (-pi, pi]

  Point position() const { return {x, y}; }
  bool operator==(const Pose2D&) const = default;
};

struct Rect {
  double x = 0.0;  // lower-left corner
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const Rect&) const = default;
};

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;

  bool operator==(const Circle&) const = default;
};

using Shape = std::variant<Rect, Circle>;

struct Obstacle {
  std::string id;
  Shape shape;

  bool operator==(const Obstacle&) const = default;
};

struct CourseMap {
  double width = 3.0;
  double height = 6.0;
  std::vector<Obstacle> obstacles;
  Pose2D start{1.5, 0.4, kPi / 2};
  double finish_y = 5.5;
  double robot_radius = kDefaultRobotRadius;

  const Obstacle* find(std::string_view id) const;
  bool operator==(const CourseMap&) const = default;
};

enum class CourseErrc { ParseError, InvalidGeometry, DuplicateId, UnknownId };
using CourseError = Error<CourseErrc>;
template <class T>
using CourseResult = Result<T, CourseErrc>;

std::string_view to_string(CourseErrc code);

// Returns the first violated CourseMap invariant, or nothing when valid.
std::optional<CourseError> validate(const CourseMap& map);

CourseResult<CourseMap> load_course(std::string_view bytes);
std::string save_course(const CourseMap& map);

Json to_json(const Obstacle& obstacle);
CourseResult<Obstacle> obstacle_from_json(const Json& j);
Json to_json(const Pose2D& pose);
CourseResult<Pose2D> pose_from_json(const Json& j);
Json to_json(const CourseMap& map);
CourseResult<CourseMap> course_from_json(const Json& j);

// Edits are pure: the input map is never modified.
CourseResult<CourseMap> place_obstacle(const CourseMap& map, Obstacle obstacle);
CourseResult<CourseMap> move_obstacle(const CourseMap& map, std::string_view id, double dx, double dy);
CourseResult<CourseMap> remove_obstacle(const CourseMap& map, std::string_view id);
CourseResult<CourseMap> set_start_pose(const CourseMap& map, Pose2D pose);

// Ids of every obstacle touching the disc, plus "wall" when the disc reaches
// or crosses a course boundary. Sorted, unique; empty means clear.
std::vector<std::string> check_contact(const CourseMap& map, Point center, double radius);

// Same as check_contact but for every disc centre along the segment from..to.
std::vector<std::string> sweep_contact(const CourseMap& map, Point from, Point to, double radius);

bool reached_finish(const CourseMap& map, const Pose2D& pose);

// Shape-level queries shared with the renderer.
double distance_to_shape(const Shape& shape, Point p);
double segment_distance_to_shape(const Shape& shape, Point a, Point b);

}  // namespace huro::world
