#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "huro/robot_sim.hpp"
#include "huro/world.hpp"

namespace huro::camera {

// Column wall height is height * kWallScale / distance.
inline constexpr double kWallScale = 1.0;  // metres

struct RenderConfig {
  int width = 320;
  int height = 240;
  double fov = 1.047;  // radians
  int fps = 15;
  int jpeg_quality = 70;

  bool valid() const;
  bool operator==(const RenderConfig&) const = default;
};

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kSkyColor{135, 190, 235};
inline constexpr Rgb kFloorColor{52, 120, 60};
inline constexpr Rgb kWallColor{170, 170, 175};

struct FrameBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB8

  FrameBuffer() = default;
  FrameBuffer(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {}

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  bool operator==(const FrameBuffer&) const = default;
};

struct RayHit {
  double distance = 0.0;
  int obstacle = -1;  // index into CourseMap::obstacles, -1 for a boundary wall
};

/// Nearest obstacle or wall along the ray. The origin must lie inside the
/// course, which keeps every distance finite. An origin inside an obstacle
/// hits it at distance 0.
RayHit cast_ray_hit(const world::CourseMap& map, world::Point origin, double direction);
double cast_ray(const world::CourseMap& map, world::Point origin, double direction);

/// Base colour used for an obstacle; stable for a given id.
Rgb obstacle_color(std::string_view id);

/// First-person raycast view. Column j looks along
/// theta + head_pan - fov * (j / (width - 1) - 1/2), so column 0 is the
/// leftmost (counter-clockwise) bearing.
FrameBuffer render_frame(const world::CourseMap& map, const sim::RobotState& state, const RenderConfig& cfg);

/// Row of the horizon for the given state, before clipping to the image.
double horizon_row(const sim::RobotState& state, int height);

/// Baseline JPEG. Quality is clamped to [1, 100].
std::vector<std::uint8_t> encode_jpeg(const FrameBuffer& frame, int quality);

}  // namespace huro::camera
