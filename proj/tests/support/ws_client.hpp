#pragma once

// Blocking WebSocket / HTTP clients for integration tests.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "huro/protocol.hpp"

namespace huro::testing {

class WsClient {
 public:
  WsClient(std::uint16_t port, std::chrono::milliseconds timeout = std::chrono::milliseconds(3000));
  ~WsClient();
  WsClient(const WsClient&) = delete;
  WsClient& operator=(const WsClient&) = delete;

  void send_text(const std::string& text);
  void send(const protocol::Envelope& e) { send_text(protocol::encode_envelope(e)); }
  /// Next text frame, or nullopt on timeout / close.
  std::optional<std::string> receive();
  /// Next frame that decodes to an envelope on `topic`.
  std::optional<protocol::Envelope> receive_on(const std::string& topic);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct HttpReply {
  int status = 0;
  std::string headers;
  std::string body;
};

HttpReply http_get(std::uint16_t port, const std::string& target);

/// Reads raw bytes of GET `target` until at least `min_bytes` arrive or the
/// timeout passes. Header bytes are stripped into `headers`.
std::vector<std::uint8_t> http_stream(std::uint16_t port, const std::string& target, std::size_t min_bytes,
                                      std::chrono::milliseconds timeout, std::string* headers = nullptr);

}  // namespace huro::testing
