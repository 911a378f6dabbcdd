#include "huro/router.hpp"

namespace huro::gateway {

using protocol::Envelope;
using protocol::Op;

void TopicRegistry::add(Counts& table, SessionId session, const std::string& topic) { ++table[topic][session]; }

bool TopicRegistry::remove(Counts& table, SessionId session, const std::string& topic) {
  auto t = table.find(topic);
  if (t == table.end()) return false;
  auto s = t->second.find(session);
  if (s == t->second.end()) return false;
  if (--s->second == 0) t->second.erase(s);
  if (t->second.empty()) table.erase(t);
  return true;
}

void TopicRegistry::subscribe(SessionId session, const std::string& topic) { add(subscribers_, session, topic); }
bool TopicRegistry::unsubscribe(SessionId session, const std::string& topic) {
  return remove(subscribers_, session, topic);
}
void TopicRegistry::advertise(SessionId session, const std::string& topic) { add(advertisers_, session, topic); }
bool TopicRegistry::unadvertise(SessionId session, const std::string& topic) {
  return remove(advertisers_, session, topic);
}

void TopicRegistry::drop_session(SessionId session) {
  for (auto* table : {&subscribers_, &advertisers_}) {
    for (auto it = table->begin(); it != table->end();) {
      it->second.erase(session);
      it = it->second.empty() ? table->erase(it) : std::next(it);
    }
  }
}

std::vector<SessionId> TopicRegistry::subscribers(const std::string& topic) const {
  std::vector<SessionId> out;
  if (auto it = subscribers_.find(topic); it != subscribers_.end()) {
    for (const auto& [session, count] : it->second) out.push_back(session);
  }
  return out;
}

bool TopicRegistry::is_subscribed(SessionId session, const std::string& topic) const {
  auto it = subscribers_.find(topic);
  return it != subscribers_.end() && it->second.count(session) != 0;
}

bool TopicRegistry::references(SessionId session) const {
  for (const auto* table : {&subscribers_, &advertisers_}) {
    for (const auto& [topic, sessions] : *table) {
      if (sessions.count(session) != 0) return true;
    }
  }
  return false;
}

Router::Router(node::TeleopNode node, RouterOptions options) : node_(std::move(node)), options_(options) {}

SessionId Router::connect() {
  const SessionId id = next_id_++;
  sessions_.insert(id);
  return id;
}

void Router::disconnect(SessionId session) {
  sessions_.erase(session);
  registry_.drop_session(session);
}

void Router::fan_out(const Envelope& e, SessionId origin, bool skip_origin, std::vector<Delivery>& out) const {
  const auto subs = registry_.subscribers(e.topic);
  if (subs.empty()) return;
  const std::string text = protocol::encode_envelope(e);
  for (SessionId s : subs) {
    if (skip_origin && s == origin) continue;
    out.push_back({s, text});
  }
}

std::vector<Delivery> Router::on_frame(SessionId session, std::string_view text) {
  auto decoded = protocol::decode_envelope(text);
  if (!decoded) {
    const auto& err = decoded.error();
    std::string reason(protocol::to_string(err.code));
    if (!err.detail.empty()) reason += ": " + err.detail;
    return {{session, protocol::encode_envelope(protocol::make_status("error", reason))}};
  }
  return route_envelope(session, *decoded);
}

std::vector<Delivery> Router::route_envelope(SessionId session, const Envelope& e) {
  std::vector<Delivery> out;
  switch (e.op) {
    case Op::Subscribe:
      registry_.subscribe(session, e.topic);
      // Latched: a new map subscriber gets the current course straight away.
      if (e.topic == protocol::kMapTopic) out.push_back({session, protocol::encode_envelope(node_.map_envelope())});
      break;
    case Op::Unsubscribe:
      registry_.unsubscribe(session, e.topic);
      break;
    case Op::Advertise:
      registry_.advertise(session, e.topic);
      break;
    case Op::Unadvertise:
      registry_.unadvertise(session, e.topic);
      break;
    case Op::Publish: {
      fan_out(e, session, !options_.self_echo, out);
      for (const auto& reply : node_.handle_publish(e)) fan_out(reply, kNodeSession, false, out);
      break;
    }
    case Op::Status:
      break;
  }
  return out;
}

std::vector<Delivery> Router::tick(double dt) {
  std::vector<Delivery> out;
  for (const auto& e : node_.run_tick(dt)) fan_out(e, kNodeSession, false, out);
  return out;
}

}  // namespace huro::gateway
