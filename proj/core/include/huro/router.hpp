#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "huro/protocol.hpp"
#include "huro/teleop_node.hpp"

namespace huro::gateway {

using SessionId = std::uint64_t;

/// Topic -> registrations. Subscribing twice creates two registrations, and
/// each unsubscribe removes exactly one; a session receives a publish once as
/// long as it holds at least one registration.
class TopicRegistry {
 public:
  void subscribe(SessionId session, const std::string& topic);
  bool unsubscribe(SessionId session, const std::string& topic);
  void advertise(SessionId session, const std::string& topic);
  bool unadvertise(SessionId session, const std::string& topic);
  void drop_session(SessionId session);

  std::vector<SessionId> subscribers(const std::string& topic) const;
  bool is_subscribed(SessionId session, const std::string& topic) const;
  bool references(SessionId session) const;
  bool empty() const { return subscribers_.empty() && advertisers_.empty(); }

 private:
  using Counts = std::map<std::string, std::map<SessionId, int>>;
  static void add(Counts& table, SessionId session, const std::string& topic);
  static bool remove(Counts& table, SessionId session, const std::string& topic);

  Counts subscribers_;
  Counts advertisers_;
};

struct Delivery {
  SessionId session;
  std::string text;

  bool operator==(const Delivery&) const = default;
};

struct RouterOptions {
  bool self_echo = true;
};

/// The single serialized authority for pub/sub routing. Owns the registry
/// and the teleop node; every inbound frame and every tick passes through it,
/// and the returned deliveries are in the order they must be sent.
class Router {
 public:
  explicit Router(node::TeleopNode node, RouterOptions options = {});

  SessionId connect();
  void disconnect(SessionId session);
  bool connected(SessionId session) const { return sessions_.count(session) != 0; }

  /// Decodes and routes one text frame. Malformed input yields a status
  /// envelope to the sender only.
  std::vector<Delivery> on_frame(SessionId session, std::string_view text);
  std::vector<Delivery> route_envelope(SessionId session, const protocol::Envelope& e);
  std::vector<Delivery> tick(double dt);

  const TopicRegistry& registry() const { return registry_; }
  node::TeleopNode& node() { return node_; }
  const node::TeleopNode& node() const { return node_; }

 private:
  void fan_out(const protocol::Envelope& e, SessionId origin, bool skip_origin, std::vector<Delivery>& out) const;

  node::TeleopNode node_;
  RouterOptions options_;
  TopicRegistry registry_;
  std::set<SessionId> sessions_;
  SessionId next_id_ = 1;
};

inline constexpr SessionId kNodeSession = 0;

}  // namespace huro::gateway
