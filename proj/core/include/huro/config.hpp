#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "huro/camera.hpp"
#include "huro/json.hpp"
#include "huro/result.hpp"

namespace huro::gateway {

inline constexpr std::string_view kConfigEnvVar = "HURO_TELEOP_CONFIG";

struct Config {
  std::string host = "0.0.0.0";
  int port = 9090;
  std::string course_path;  // empty: built-in default course
  int tick_hz = 20;
  camera::RenderConfig render;
  std::string static_dir = "static";

  bool operator==(const Config&) const = default;
};

enum class ConfigErrc { UnknownFlag, InvalidValue, HelpRequested };
using ConfigError = Error<ConfigErrc>;

std::string_view to_string(ConfigErrc code);

/// First violated range constraint, if any.
std::optional<ConfigError> validate(const Config& config);

/// Overlays the fields present in a JSON document onto `base`.
Result<Config, ConfigErrc> apply_config_json(Config base, const Json& j);

/// Precedence: command line, then the JSON file named by `env_config_path`,
/// then defaults. `args` excludes the program name. HelpRequested carries the
/// usage text in its detail.
Result<Config, ConfigErrc> parse_cli(const std::vector<std::string>& args,
                                     const std::optional<std::string>& env_config_path = std::nullopt);

/// parse_cli with the config path taken from HURO_TELEOP_CONFIG.
Result<Config, ConfigErrc> parse_cli(int argc, const char* const* argv);

}  // namespace huro::gateway
