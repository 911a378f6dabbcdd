#include "huro/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

namespace huro::gateway {
namespace {

ConfigError invalid(std::string detail) { return {ConfigErrc::InvalidValue, std::move(detail)}; }

template <class T>
bool read_field(const Json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return true;
  if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) return false;
    out = it->template get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) return false;
    out = it->template get<T>();
  } else {
    if (!it->is_number()) return false;
    out = it->template get<T>();
  }
  return true;
}

}  // namespace

std::string_view to_string(ConfigErrc code) {
  switch (code) {
    case ConfigErrc::UnknownFlag: return "UnknownFlag";
    case ConfigErrc::InvalidValue: return "InvalidValue";
    case ConfigErrc::HelpRequested: return "HelpRequested";
  }
  return "Unknown";
}

std::optional<ConfigError> validate(const Config& c) {
  if (c.port < 1 || c.port > 65535) return invalid("port must be in [1, 65535]");
  if (c.tick_hz < 1 || c.tick_hz > 100) return invalid("tick-hz must be in [1, 100]");
  if (c.render.width < 32) return invalid("cam-width must be >= 32");
  if (c.render.height < 24) return invalid("cam-height must be >= 24");
  if (c.render.fps < 1 || c.render.fps > 30) return invalid("cam-fps must be in [1, 30]");
  if (!c.render.valid()) return invalid("render settings out of range");
  if (c.host.empty()) return invalid("host must be non-empty");
  return std::nullopt;
}

Result<Config, ConfigErrc> apply_config_json(Config base, const Json& j) {
  if (!j.is_object()) return invalid("config must be a JSON object");
  bool ok = read_field(j, "host", base.host) && read_field(j, "port", base.port) &&
            read_field(j, "course_path", base.course_path) && read_field(j, "tick_hz", base.tick_hz) &&
            read_field(j, "static_dir", base.static_dir);
  if (auto r = j.find("render"); ok && r != j.end()) {
    ok = r->is_object() && read_field(*r, "width", base.render.width) && read_field(*r, "height", base.render.height) &&
         read_field(*r, "fov", base.render.fov) && read_field(*r, "fps", base.render.fps) &&
         read_field(*r, "jpeg_quality", base.render.jpeg_quality);
  }
  if (!ok) return invalid("config field has the wrong type");
  return base;
}

Result<Config, ConfigErrc> parse_cli(const std::vector<std::string>& args,
                                     const std::optional<std::string>& env_config_path) {
  Config config;
  if (env_config_path && !env_config_path->empty()) {
    std::ifstream in(*env_config_path);
    if (!in) return invalid("cannot read config file '" + *env_config_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    Json j = Json::parse(buffer.str(), nullptr, false);
    if (j.is_discarded()) return invalid("config file '" + *env_config_path + "' is not valid JSON");
    auto merged = apply_config_json(config, j);
    if (!merged) return merged.error();
    config = *merged;
  }

  CLI::App app{"Teleoperation gateway for the simulated humanoid", "huro_gateway"};
  std::optional<std::string> host, course, static_dir;
  std::optional<int> port, tick_hz, cam_width, cam_height, cam_fps, cam_quality;
  app.add_option("--host", host, "Bind address (default 0.0.0.0)");
  app.add_option("--port", port, "TCP port for HTTP and WebSocket (default 9090)");
  app.add_option("--course", course, "Course JSON file (default: built-in 3x6 m course)");
  app.add_option("--tick-hz", tick_hz, "Simulation and state publish rate, 1-100 Hz (default 20)");
  app.add_option("--cam-width", cam_width, "Camera width in pixels (default 320)");
  app.add_option("--cam-height", cam_height, "Camera height in pixels (default 240)");
  app.add_option("--cam-fps", cam_fps, "Camera frame rate, 1-30 Hz (default 15)");
  app.add_option("--cam-quality", cam_quality, "JPEG quality, 1-100 (default 70)");
  app.add_option("--static-dir", static_dir, "Directory served at / and /static (default ./static)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return ConfigError{ConfigErrc::HelpRequested, app.help()};
  } catch (const CLI::ExtrasError& e) {
    return ConfigError{ConfigErrc::UnknownFlag, e.what()};
  } catch (const CLI::ParseError& e) {
    return invalid(e.what());
  }

  if (host) config.host = *host;
  if (port) config.port = *port;
  if (course) config.course_path = *course;
  if (tick_hz) config.tick_hz = *tick_hz;
  if (cam_width) config.render.width = *cam_width;
  if (cam_height) config.render.height = *cam_height;
  if (cam_fps) config.render.fps = *cam_fps;
  if (cam_quality) config.render.jpeg_quality = *cam_quality;
  if (static_dir) config.static_dir = *static_dir;

  if (auto err = validate(config)) return *err;
  return config;
}

Result<Config, ConfigErrc> parse_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  std::optional<std::string> env;
  if (const char* path = std::getenv(std::string(kConfigEnvVar).c_str())) env = path;
  return parse_cli(args, env);
}

}  // namespace huro::gateway
