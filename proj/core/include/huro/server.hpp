#pragma once

#include <cstdint>
#include <memory>

#include "huro/config.hpp"
#include "huro/router.hpp"
#include "huro/world.hpp"

namespace huro::gateway {

struct ServerOptions {
  RouterOptions router;
  int io_threads = 2;
  // When false the simulation only advances through Server::step().
  bool autotick = true;
};

/// HTTP + WebSocket front door:
///   GET /, /static/*   console assets from Config::static_dir
///   GET /stream        MJPEG (multipart/x-mixed-replace; boundary=frame)
///   GET /health        {"status":"ok"}
///   GET /ws            WebSocket upgrade, one JSON envelope per text frame
/// A port of 0 binds an ephemeral port.
class Server {
 public:
  Server(Config config, world::CourseMap map, ServerOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the I/O, tick and render threads. Throws
  /// std::runtime_error when the address cannot be bound.
  void start();
  void stop();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();

  std::uint16_t port() const;
  /// Camera frames rendered over the last second.
  double render_fps() const;
  /// Advances the simulation by dt and fans out the results.
  void step(double dt);

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace huro::gateway
