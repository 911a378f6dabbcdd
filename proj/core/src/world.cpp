#include "huro/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace huro::world {
namespace {

CourseError geometry_error(std::string detail) {
  return {CourseErrc::InvalidGeometry, std::move(detail)};
}

CourseError parse_error(std::string detail) { return {CourseErrc::ParseError, std::move(detail)}; }

std::optional<double> number_field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return std::nullopt;
  return it->get<double>();
}

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double point_segment_distance(Point p, Point a, Point b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

// Liang-Barsky clip of segment a..b against a closed rectangle.
bool segment_hits_rect(const Rect& r, Point a, Point b) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - r.x, r.x + r.w - a.x, a.y - r.y, r.y + r.h - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  return true;
}

bool shape_inside(const Shape& shape, double width, double height) {
  if (const auto* r = std::get_if<Rect>(&shape)) {
    return r->x >= 0.0 && r->y >= 0.0 && r->x + r->w <= width && r->y + r->h <= height;
  }
  const auto& c = std::get<Circle>(shape);
  return c.cx - c.r >= 0.0 && c.cy - c.r >= 0.0 && c.cx + c.r <= width && c.cy + c.r <= height;
}

std::optional<CourseError> validate_obstacle(const Obstacle& o, double width, double height) {
  if (o.id.empty()) return geometry_error("obstacle id must be non-empty");
  if (o.id == kWallId) return geometry_error("obstacle id 'wall' is reserved");
  if (const auto* r = std::get_if<Rect>(&o.shape)) {
    if (!finite_all({r->x, r->y, r->w, r->h})) return geometry_error("obstacle '" + o.id + "' has non-finite dimensions");
    if (r->w <= 0.0 || r->h <= 0.0) return geometry_error("obstacle '" + o.id + "' must have w, h > 0");
  } else {
    const auto& c = std::get<Circle>(o.shape);
    if (!finite_all({c.cx, c.cy, c.r})) return geometry_error("obstacle '" + o.id + "' has non-finite dimensions");
    if (c.r <= 0.0) return geometry_error("obstacle '" + o.id + "' must have r > 0");
  }
  if (!shape_inside(o.shape, width, height)) return geometry_error("obstacle '" + o.id + "' lies outside course bounds");
  return std::nullopt;
}

std::vector<std::string> sorted_unique(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace

double normalize_angle(double theta) {
  double r = std::remainder(theta, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

const Obstacle* CourseMap::find(std::string_view id) const {
  auto it = std::find_if(obstacles.begin(), obstacles.end(), [&](const Obstacle& o) { return o.id == id; });
  return it == obstacles.end() ? nullptr : &*it;
}

std::string_view to_string(CourseErrc code) {
  switch (code) {
    case CourseErrc::ParseError: return "ParseError";
    case CourseErrc::InvalidGeometry: return "InvalidGeometry";
    case CourseErrc::DuplicateId: return "DuplicateId";
    case CourseErrc::UnknownId: return "UnknownId";
  }
  return "Unknown";
}

std::optional<CourseError> validate(const CourseMap& map) {
  if (!finite_all({map.width, map.height}) || map.width <= 0.0 || map.height <= 0.0) {
    return geometry_error("width and height must be finite and > 0");
  }
  if (!std::isfinite(map.robot_radius) || map.robot_radius <= 0.0) {
    return geometry_error("robot_radius must be finite and > 0");
  }
  std::set<std::string_view> seen;
  for (const auto& o : map.obstacles) {
    if (auto err = validate_obstacle(o, map.width, map.height)) return err;
    if (!seen.insert(o.id).second) return CourseError{CourseErrc::DuplicateId, "duplicate obstacle id '" + o.id + "'"};
  }
  const auto& s = map.start;
  if (!finite_all({s.x, s.y, s.theta})) return geometry_error("start pose must be finite");
  if (s.x < 0.0 || s.y < 0.0 || s.x > map.width || s.y > map.height) {
    return geometry_error("start pose lies outside course bounds");
  }
  if (s.theta != normalize_angle(s.theta)) return geometry_error("start theta must be normalized to (-pi, pi]");
  if (!std::isfinite(map.finish_y) || map.finish_y <= 0.0 || map.finish_y > map.height) {
    return geometry_error("finish_y must lie in (0, height]");
  }
  if (map.finish_y <= s.y) return geometry_error("finish_y must be greater than start.y");
  if (auto ids = check_contact(map, s.position(), map.robot_radius); !ids.empty()) {
    return geometry_error("start pose is in contact with '" + ids.front() + "'");
  }
  return std::nullopt;
}

Json to_json(const Pose2D& pose) { return Json{{"x", pose.x}, {"y", pose.y}, {"theta", pose.theta}}; }

CourseResult<Pose2D> pose_from_json(const Json& j) {
  if (!j.is_object()) return parse_error("pose must be an object");
  auto x = number_field(j, "x");
  auto y = number_field(j, "y");
  auto theta = number_field(j, "theta");
  if (!x || !y || !theta) return parse_error("pose requires numeric x, y, theta");
  return Pose2D{*x, *y, normalize_angle(*theta)};
}

Json to_json(const Obstacle& obstacle) {
  Json j;
  j["id"] = obstacle.id;
  if (const auto* r = std::get_if<Rect>(&obstacle.shape)) {
    j["shape"] = "rect";
    j["x"] = r->x;
    j["y"] = r->y;
    j["w"] = r->w;
    j["h"] = r->h;
  } else {
    const auto& c = std::get<Circle>(obstacle.shape);
    j["shape"] = "circle";
    j["cx"] = c.cx;
    j["cy"] = c.cy;
    j["r"] = c.r;
  }
  return j;
}

CourseResult<Obstacle> obstacle_from_json(const Json& j) {
  if (!j.is_object()) return parse_error("obstacle must be an object");
  auto id = j.find("id");
  auto shape = j.find("shape");
  if (id == j.end() || !id->is_string()) return parse_error("obstacle requires string id");
  if (shape == j.end() || !shape->is_string()) return parse_error("obstacle requires string shape");
  const auto kind = shape->get<std::string>();
  if (kind == "rect") {
    auto x = number_field(j, "x");
    auto y = number_field(j, "y");
    auto w = number_field(j, "w");
    auto h = number_field(j, "h");
    if (!x || !y || !w || !h) return parse_error("rect requires numeric x, y, w, h");
    return Obstacle{id->get<std::string>(), Rect{*x, *y, *w, *h}};
  }
  if (kind == "circle") {
    auto cx = number_field(j, "cx");
    auto cy = number_field(j, "cy");
    auto r = number_field(j, "r");
    if (!cx || !cy || !r) return parse_error("circle requires numeric cx, cy, r");
    return Obstacle{id->get<std::string>(), Circle{*cx, *cy, *r}};
  }
  return parse_error("unknown shape '" + kind + "'");
}

Json to_json(const CourseMap& map) {
  Json obstacles = Json::array();
  for (const auto& o : map.obstacles) obstacles.push_back(to_json(o));
  return Json{{"width", map.width},
              {"height", map.height},
              {"start", to_json(map.start)},
              {"finish_y", map.finish_y},
              {"robot_radius", map.robot_radius},
              {"obstacles", std::move(obstacles)}};
}

CourseResult<CourseMap> course_from_json(const Json& j) {
  if (!j.is_object()) return parse_error("course must be a JSON object");
  CourseMap map;
  map.obstacles.clear();
  auto width = number_field(j, "width");
  auto height = number_field(j, "height");
  auto finish = number_field(j, "finish_y");
  if (!width || !height || !finish) return parse_error("course requires numeric width, height, finish_y");
  map.width = *width;
  map.height = *height;
  map.finish_y = *finish;
  if (auto it = j.find("robot_radius"); it != j.end()) {
    if (!it->is_number()) return parse_error("robot_radius must be a number");
    map.robot_radius = it->get<double>();
  }
  auto start = j.find("start");
  if (start == j.end()) return parse_error("course requires start");
  auto pose = pose_from_json(*start);
  if (!pose) return pose.error();
  map.start = *pose;
  if (auto it = j.find("obstacles"); it != j.end()) {
    if (!it->is_array()) return parse_error("obstacles must be an array");
    for (const auto& item : *it) {
      auto o = obstacle_from_json(item);
      if (!o) return o.error();
      map.obstacles.push_back(std::move(o).value());
    }
  }
  if (auto err = validate(map)) return *err;
  return map;
}

CourseResult<CourseMap> load_course(std::string_view bytes) {
  Json j = Json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) return parse_error("course file is not valid JSON");
  return course_from_json(j);
}

std::string save_course(const CourseMap& map) { return to_json(map).dump(2) + "\n"; }

CourseResult<CourseMap> place_obstacle(const CourseMap& map, Obstacle obstacle) {
  if (map.find(obstacle.id) != nullptr) {
    return CourseError{CourseErrc::DuplicateId, "obstacle id '" + obstacle.id + "' already exists"};
  }
  CourseMap next = map;
  next.obstacles.push_back(std::move(obstacle));
  if (auto err = validate(next)) return *err;
  return next;
}

CourseResult<CourseMap> move_obstacle(const CourseMap& map, std::string_view id, double dx, double dy) {
  CourseMap next = map;
  auto it = std::find_if(next.obstacles.begin(), next.obstacles.end(), [&](const Obstacle& o) { return o.id == id; });
  if (it == next.obstacles.end()) return CourseError{CourseErrc::UnknownId, "no obstacle '" + std::string(id) + "'"};
  if (!finite_all({dx, dy})) return geometry_error("move offsets must be finite");
  if (auto* r = std::get_if<Rect>(&it->shape)) {
    r->x += dx;
    r->y += dy;
  } else {
    auto& c = std::get<Circle>(it->shape);
    c.cx += dx;
    c.cy += dy;
  }
  if (auto err = validate(next)) return *err;
  return next;
}

CourseResult<CourseMap> remove_obstacle(const CourseMap& map, std::string_view id) {
  CourseMap next = map;
  auto it = std::find_if(next.obstacles.begin(), next.obstacles.end(), [&](const Obstacle& o) { return o.id == id; });
  if (it == next.obstacles.end()) return CourseError{CourseErrc::UnknownId, "no obstacle '" + std::string(id) + "'"};
  next.obstacles.erase(it);
  return next;
}

CourseResult<CourseMap> set_start_pose(const CourseMap& map, Pose2D pose) {
  CourseMap next = map;
  pose.theta = normalize_angle(pose.theta);
  next.start = pose;
  if (auto err = validate(next)) return *err;
  return next;
}

double distance_to_shape(const Shape& shape, Point p) {
  if (const auto* r = std::get_if<Rect>(&shape)) {
    const double dx = std::max({r->x - p.x, 0.0, p.x - (r->x + r->w)});
    const double dy = std::max({r->y - p.y, 0.0, p.y - (r->y + r->h)});
    return std::hypot(dx, dy);
  }
  const auto& c = std::get<Circle>(shape);
  return std::max(0.0, std::hypot(p.x - c.cx, p.y - c.cy) - c.r);
}

double segment_distance_to_shape(const Shape& shape, Point a, Point b) {
  if (const auto* r = std::get_if<Rect>(&shape)) {
    if (segment_hits_rect(*r, a, b)) return 0.0;
    // Disjoint convex sets: the closest pair involves an endpoint of the
    // segment or a corner of the rectangle.
    double best = std::min(distance_to_shape(shape, a), distance_to_shape(shape, b));
    const Point corners[4] = {{r->x, r->y}, {r->x + r->w, r->y}, {r->x, r->y + r->h}, {r->x + r->w, r->y + r->h}};
    for (const auto& c : corners) best = std::min(best, point_segment_distance(c, a, b));
    return best;
  }
  const auto& c = std::get<Circle>(shape);
  return std::max(0.0, point_segment_distance({c.cx, c.cy}, a, b) - c.r);
}

std::vector<std::string> check_contact(const CourseMap& map, Point center, double radius) {
  return sweep_contact(map, center, center, radius);
}

std::vector<std::string> sweep_contact(const CourseMap& map, Point from, Point to, double radius) {
  // Canonical endpoint order keeps the result bit-identical for a->b and b->a.
  if (std::tie(to.x, to.y) < std::tie(from.x, from.y)) std::swap(from, to);
  std::vector<std::string> ids;
  for (const auto& o : map.obstacles) {
    if (segment_distance_to_shape(o.shape, from, to) <= radius) ids.push_back(o.id);
  }
  const double min_x = std::min(from.x, to.x);
  const double max_x = std::max(from.x, to.x);
  const double min_y = std::min(from.y, to.y);
  const double max_y = std::max(from.y, to.y);
  if (min_x - radius <= 0.0 || min_y - radius <= 0.0 || max_x + radius >= map.width || max_y + radius >= map.height) {
    ids.emplace_back(kWallId);
  }
  return sorted_unique(std::move(ids));
}

bool reached_finish(const CourseMap& map, const Pose2D& pose) { return pose.y >= map.finish_y; }

}  // namespace huro::world
