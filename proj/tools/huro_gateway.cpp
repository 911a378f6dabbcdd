// Gateway entry point: loads the course, then serves the console, the camera
// stream and the pub/sub WebSocket until SIGINT/SIGTERM.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <pthread.h>

#include "huro/config.hpp"
#include "huro/server.hpp"
#include "huro/world.hpp"

namespace {

huro::world::CourseResult<huro::world::CourseMap> load_course_file(const std::string& path) {
  if (path.empty()) return huro::world::CourseMap{};
  std::ifstream in(path, std::ios::binary);
  if (!in) return huro::world::CourseError{huro::world::CourseErrc::ParseError, "cannot open '" + path + "'"};
  std::stringstream buffer;
  buffer << in.rdbuf();
  return huro::world::load_course(buffer.str());
}

}  // namespace

int main(int argc, char** argv) {
  using huro::gateway::ConfigErrc;

  auto config = huro::gateway::parse_cli(argc, argv);
  if (!config) {
    if (config.error().code == ConfigErrc::HelpRequested) {
      std::cout << config.error().detail;
      return 0;
    }
    std::cerr << "huro_gateway: " << huro::gateway::to_string(config.error().code) << ": " << config.error().detail
              << "\nRun with --help for usage.\n";
    return 2;
  }

  auto course = load_course_file(config->course_path);
  if (!course) {
    std::cerr << "huro_gateway: " << huro::world::to_string(course.error().code) << ": " << course.error().detail
              << "\n";
    return 1;
  }

  // Blocked before any thread starts; handled by sigwait.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  huro::gateway::Server server(*config, *course);
  try {
    server.start();
  } catch (const std::exception& ex) {
    std::cerr << "huro_gateway: " << ex.what() << "\n";
    return 1;
  }
  std::cout << "huro_gateway listening on " << config->host << ":" << server.port() << " (ws /ws, mjpeg /stream, "
            << config->tick_hz << " Hz tick, camera " << config->render.width << "x" << config->render.height << " @ "
            << config->render.fps << " fps)" << std::endl;

  int received = 0;
  sigwait(&signals, &received);
  std::cout << "huro_gateway: shutting down" << std::endl;
  server.stop();
  return 0;
}
