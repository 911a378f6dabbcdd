#include "huro/camera.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <limits>

#include <jpeglib.h>

namespace huro::camera {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<Rgb, 8> kPalette{{
    {230, 120, 30},
    {40, 90, 200},
    {200, 60, 60},
    {220, 200, 40},
    {150, 70, 180},
    {30, 160, 170},
    {240, 150, 180},
    {120, 80, 40},
}};

// Entry distance of the ray into a closed rectangle, 0 if the origin is inside.
double ray_rect(const world::Rect& r, world::Point o, double dx, double dy) {
  double t0 = 0.0;
  double t1 = kInf;
  const double lo[2] = {r.x, r.y};
  const double hi[2] = {r.x + r.w, r.y + r.h};
  const double org[2] = {o.x, o.y};
  const double dir[2] = {dx, dy};
  for (int axis = 0; axis < 2; ++axis) {
    if (dir[axis] == 0.0) {
      if (org[axis] < lo[axis] || org[axis] > hi[axis]) return kInf;
      continue;
    }
    double ta = (lo[axis] - org[axis]) / dir[axis];
    double tb = (hi[axis] - org[axis]) / dir[axis];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return kInf;
  }
  return t0;
}

double ray_circle(const world::Circle& c, world::Point o, double dx, double dy) {
  const double fx = o.x - c.cx;
  const double fy = o.y - c.cy;
  const double cterm = fx * fx + fy * fy - c.r * c.r;
  if (cterm <= 0.0) return 0.0;
  const double b = fx * dx + fy * dy;
  const double disc = b * b - cterm;
  if (disc < 0.0) return kInf;
  const double t = -b - std::sqrt(disc);
  return t >= 0.0 ? t : kInf;
}

double ray_walls(const world::CourseMap& map, world::Point o, double dx, double dy) {
  double t = kInf;
  if (dx > 0.0) t = std::min(t, (map.width - o.x) / dx);
  if (dx < 0.0) t = std::min(t, -o.x / dx);
  if (dy > 0.0) t = std::min(t, (map.height - o.y) / dy);
  if (dy < 0.0) t = std::min(t, -o.y / dy);
  return std::max(t, 0.0);
}

Rgb shade(Rgb base, double distance) {
  const double f = std::clamp(1.0 / (1.0 + 0.25 * distance), 0.25, 1.0);
  return {static_cast<std::uint8_t>(std::lround(base[0] * f)), static_cast<std::uint8_t>(std::lround(base[1] * f)),
          static_cast<std::uint8_t>(std::lround(base[2] * f))};
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
};

void on_jpeg_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

}  // namespace

bool RenderConfig::valid() const {
  return width >= 32 && height >= 24 && fov > 0.0 && fov < world::kPi && fps >= 1 && fps <= 30 &&
         jpeg_quality >= 1 && jpeg_quality <= 100;
}

Rgb FrameBuffer::at(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void FrameBuffer::set(int x, int y, Rgb c) {
  const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = c[0];
  pixels[i + 1] = c[1];
  pixels[i + 2] = c[2];
}

RayHit cast_ray_hit(const world::CourseMap& map, world::Point origin, double direction) {
  const double dx = std::cos(direction);
  const double dy = std::sin(direction);
  RayHit best{ray_walls(map, origin, dx, dy), -1};
  for (std::size_t i = 0; i < map.obstacles.size(); ++i) {
    const auto& shape = map.obstacles[i].shape;
    const double t = std::holds_alternative<world::Rect>(shape)
                         ? ray_rect(std::get<world::Rect>(shape), origin, dx, dy)
                         : ray_circle(std::get<world::Circle>(shape), origin, dx, dy);
    if (t < best.distance) best = {t, static_cast<int>(i)};
  }
  return best;
}

double cast_ray(const world::CourseMap& map, world::Point origin, double direction) {
  return cast_ray_hit(map, origin, direction).distance;
}

Rgb obstacle_color(std::string_view id) {
  std::uint32_t h = 2166136261u;  // FNV-1a
  for (unsigned char c : id) {
    h ^= c;
    h *= 16777619u;
  }
  return kPalette[h % kPalette.size()];
}

double horizon_row(const sim::RobotState& state, int height) {
  double row = height / 2.0 + (state.head_tilt / sim::kHeadTiltLimit) * (height / 3.0);
  if (state.posture == protocol::Posture::Crawling) row += height / 4.0;
  return row;
}

FrameBuffer render_frame(const world::CourseMap& map, const sim::RobotState& state, const RenderConfig& cfg) {
  FrameBuffer frame(cfg.width, cfg.height);
  const world::Point eye = state.pose.position();
  const double base = state.pose.theta + state.head_pan;
  const double horizon = horizon_row(state, cfg.height);
  const double span = cfg.width > 1 ? static_cast<double>(cfg.width - 1) : 1.0;

  for (int j = 0; j < cfg.width; ++j) {
    const double bearing = base - cfg.fov * (j / span - 0.5);
    const RayHit hit = cast_ray_hit(map, eye, bearing);
    const double d = std::max(hit.distance, 1e-6);
    const double column = std::min(static_cast<double>(cfg.height), cfg.height * kWallScale / d);
    const double top = horizon - column / 2.0;
    const double bottom = horizon + column / 2.0;
    const Rgb wall = shade(hit.obstacle < 0 ? kWallColor : obstacle_color(map.obstacles[hit.obstacle].id), d);
    for (int row = 0; row < cfg.height; ++row) {
      const double centre = row + 0.5;
      if (centre < top) {
        frame.set(j, row, centre < horizon ? kSkyColor : kFloorColor);
      } else if (centre < bottom) {
        frame.set(j, row, wall);
      } else {
        frame.set(j, row, kFloorColor);
      }
    }
  }
  return frame;
}

std::vector<std::uint8_t> encode_jpeg(const FrameBuffer& frame, int quality) {
  jpeg_compress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = on_jpeg_error;

  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    return {};
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &buffer, &size);
  cinfo.image_width = static_cast<JDIMENSION>(frame.width);
  cinfo.image_height = static_cast<JDIMENSION>(frame.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, std::clamp(quality, 1, 100), TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const auto stride = static_cast<std::size_t>(frame.width) * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPLE*>(frame.pixels.data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  std::vector<std::uint8_t> out(buffer, buffer + size);
  std::free(buffer);
  return out;
}

}  // namespace huro::camera
