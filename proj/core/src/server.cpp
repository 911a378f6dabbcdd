#include "huro/server.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "huro/camera.hpp"
#include "huro/mjpeg.hpp"

namespace huro::gateway {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxFrameBytes = 1 << 20;
constexpr std::size_t kMaxOutboundQueue = 4096;

std::string_view mime_type(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

// Latest encoded camera frame plus a monotonically increasing sequence number.
class FrameStore {
 public:
  void publish(std::vector<std::uint8_t> jpeg) {
    auto frame = std::make_shared<const std::vector<std::uint8_t>>(std::move(jpeg));
    std::lock_guard lock(mutex_);
    latest_ = std::move(frame);
    ++seq_;
    const auto now = Clock::now();
    stamps_.push_back(now);
    while (!stamps_.empty() && now - stamps_.front() > std::chrono::seconds(1)) stamps_.pop_front();
  }

  std::pair<std::uint64_t, std::shared_ptr<const std::vector<std::uint8_t>>> latest() const {
    std::lock_guard lock(mutex_);
    return {seq_, latest_};
  }

  double fps() const {
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    return static_cast<double>(std::count_if(stamps_.begin(), stamps_.end(), [&](auto t) {
      return now - t <= std::chrono::seconds(1);
    }));
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const std::vector<std::uint8_t>> latest_;
  std::uint64_t seq_ = 0;
  std::deque<Clock::time_point> stamps_;
};

class WsSession;
// Serializes every router call and queues deliveries onto sessions under the lock.
class Hub {
 public:
  Hub(world::CourseMap map, RouterOptions options) : router_(node::TeleopNode(std::move(map)), options) {}

  SessionId attach(const std::shared_ptr<WsSession>& session);
  void detach(SessionId id);
  void on_frame(SessionId id, std::string_view text);
  void tick(double dt, double render_fps);

  std::pair<world::CourseMap, sim::RobotState> scene() {
    std::lock_guard lock(mutex_);
    return {router_.node().map(), router_.node().state()};
  }

 private:
  void dispatch(const std::vector<Delivery>& deliveries);

  std::mutex mutex_;
  Router router_;
  std::map<SessionId, std::weak_ptr<WsSession>> sessions_;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Hub& hub) : ws_(std::move(socket)), hub_(hub) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxFrameBytes);
    ws_.text(true);
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  // Thread-safe: hops onto the session's strand.
  void send(std::shared_ptr<const std::string> text) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      if (self->closed_) return;
      if (self->outbox_.size() >= kMaxOutboundQueue) {
        // A consumer this far behind is gone for practical purposes.
        self->close();
        return;
      }
      self->outbox_.push_back(std::move(text));
      if (self->outbox_.size() == 1) self->write_next();
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    id_ = hub_.attach(shared_from_this());
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      close();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    hub_.on_frame(id_, text);
    read_next();
  }

  void write_next() {
    ws_.async_write(net::buffer(*outbox_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      close();
      return;
    }
    outbox_.pop_front();
    if (!outbox_.empty()) write_next();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    outbox_.clear();
    if (id_ != 0) hub_.detach(id_);
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ignored);
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  Hub& hub_;
  SessionId id_ = 0;
  std::deque<std::shared_ptr<const std::string>> outbox_;
  bool closed_ = false;
};

SessionId Hub::attach(const std::shared_ptr<WsSession>& session) {
  std::lock_guard lock(mutex_);
  const SessionId id = router_.connect();
  sessions_[id] = session;
  return id;
}

void Hub::detach(SessionId id) {
  std::lock_guard lock(mutex_);
  router_.disconnect(id);
  sessions_.erase(id);
}

void Hub::on_frame(SessionId id, std::string_view text) {
  std::lock_guard lock(mutex_);
  if (!router_.connected(id)) return;
  dispatch(router_.on_frame(id, text));
}

void Hub::tick(double dt, double render_fps) {
  std::lock_guard lock(mutex_);
  router_.node().set_render_fps(render_fps);
  dispatch(router_.tick(dt));
}

void Hub::dispatch(const std::vector<Delivery>& deliveries) {
  for (const auto& d : deliveries) {
    auto it = sessions_.find(d.session);
    if (it == sessions_.end()) continue;
    if (auto session = it->second.lock()) session->send(std::make_shared<const std::string>(d.text));
  }
}

// Paces one MJPEG consumer at the configured fps, always sending the newest
// frame and skipping any it missed.
class StreamSession : public std::enable_shared_from_this<StreamSession> {
 public:
  StreamSession(beast::tcp_stream&& stream, const FrameStore& frames, int fps)
      : stream_(std::move(stream)), timer_(stream_.get_executor()), frames_(frames),
        period_(std::chrono::microseconds(1'000'000 / std::max(fps, 1))) {}

  void run() {
    stream_.expires_never();
    header_ = "HTTP/1.1 200 OK\r\nContent-Type: ";
    header_ += kMjpegContentType;
    header_ += "\r\nCache-Control: no-cache, no-store\r\nPragma: no-cache\r\nConnection: close\r\n\r\n";
    net::async_write(stream_, net::buffer(header_),
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (!ec) self->next_frame();
                     });
  }

 private:
  void next_frame() {
    auto [seq, jpeg] = frames_.latest();
    if (jpeg && seq != sent_seq_) {
      sent_seq_ = seq;
      part_ = mjpeg_part(*jpeg);
      net::async_write(stream_, net::buffer(part_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (!ec) self->wait();
      });
      return;
    }
    wait();
  }

  void wait() {
    timer_.expires_after(period_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->next_frame();
    });
  }

  beast::tcp_stream stream_;
  net::steady_timer timer_;
  const FrameStore& frames_;
  std::chrono::microseconds period_;
  std::string header_;
  std::vector<std::uint8_t> part_;
  std::uint64_t sent_seq_ = 0;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Hub& hub, const FrameStore& frames, const Config& config)
      : stream_(std::move(socket)), hub_(hub), frames_(frames), config_(config) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read_request, shared_from_this()));
  }

 private:
  void read_request() {
    parser_.emplace();
    parser_->body_limit(64 * 1024);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    auto req = parser_->release();
    const std::string target(req.target());
    const std::string path = target.substr(0, target.find('?'));

    if (websocket::is_upgrade(req)) {
      if (path == "/ws") {
        std::make_shared<WsSession>(stream_.release_socket(), hub_)->run(std::move(req));
      }
      return;
    }
    if (req.method() == http::verb::get && path == "/stream") {
      std::make_shared<StreamSession>(std::move(stream_), frames_, config_.render.fps)->run();
      return;
    }
    respond(handle(req, path));
  }

  http::response<http::string_body> text_response(const http::request<http::string_body>& req, http::status status,
                                                  std::string_view type, std::string body) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::server, "huro-gateway");
    res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  http::response<http::string_body> handle(const http::request<http::string_body>& req, const std::string& path) {
    if (req.method() != http::verb::get && req.method() != http::verb::head) {
      return text_response(req, http::status::method_not_allowed, "text/plain", "method not allowed\n");
    }
    if (path == "/health") return text_response(req, http::status::ok, "application/json", R"({"status":"ok"})");

    std::string relative;
    if (path == "/" || path == "/index.html") {
      relative = "index.html";
    } else if (path.rfind("/static/", 0) == 0) {
      relative = path.substr(8);
    } else {
      return text_response(req, http::status::not_found, "text/plain", "not found\n");
    }
    if (relative.empty() || relative.find("..") != std::string::npos) {
      return text_response(req, http::status::bad_request, "text/plain", "bad path\n");
    }
    const auto file = std::filesystem::path(config_.static_dir) / relative;
    std::ifstream in(file, std::ios::binary);
    if (!in) return text_response(req, http::status::not_found, "text/plain", "not found\n");
    std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto res = text_response(req, http::status::ok, mime_type(file), std::move(body));
    if (req.method() == http::verb::head) res.body().clear();
    return res;
  }

  void respond(http::response<http::string_body> res) {
    auto shared = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *shared, [self = shared_from_this(), shared](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (shared->need_eof()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read_request();
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  Hub& hub_;
  const FrameStore& frames_;
  const Config& config_;
};

}  // namespace

struct Server::Impl {
  Impl(Config cfg, world::CourseMap map, ServerOptions opts)
      : config(std::move(cfg)), options(opts), hub(std::move(map), opts.router), acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (!acceptor.is_open()) return;
      if (!ec) std::make_shared<HttpSession>(std::move(socket), hub, frames, config)->run();
      accept();
    });
  }

  void tick_loop() {
    const auto period = std::chrono::microseconds(1'000'000 / config.tick_hz);
    const double dt = 1.0 / config.tick_hz;
    auto next = Clock::now() + period;
    while (!stopping) {
      {
        std::unique_lock lock(wake_mutex);
        wake.wait_until(lock, next, [this] { return stopping.load(); });
      }
      if (stopping) break;
      hub.tick(dt, frames.fps());
      next += period;
    }
  }

  void render_loop() {
    const auto period = std::chrono::microseconds(1'000'000 / config.render.fps);
    auto next = Clock::now();
    while (!stopping) {
      auto [map, state] = hub.scene();
      frames.publish(camera::encode_jpeg(camera::render_frame(map, state, config.render), config.render.jpeg_quality));
      next += period;
      std::unique_lock lock(wake_mutex);
      wake.wait_until(lock, next, [this] { return stopping.load(); });
    }
  }

  Config config;
  ServerOptions options;
  Hub hub;
  FrameStore frames;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;
  std::atomic<bool> stopping{false};
  std::atomic<bool> running{false};
  std::mutex wake_mutex;
  std::condition_variable wake;
};

Server::Server(Config config, world::CourseMap map, ServerOptions options)
    : impl_(std::make_shared<Impl>(std::move(config), std::move(map), options)) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& d = *impl_;
  if (d.running.exchange(true)) return;
  beast::error_code ec;
  const auto address = net::ip::make_address(d.config.host, ec);
  if (ec) throw std::runtime_error("invalid bind host '" + d.config.host + "'");
  const tcp::endpoint endpoint{address, static_cast<std::uint16_t>(d.config.port)};
  d.acceptor.open(endpoint.protocol(), ec);
  if (!ec) d.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) d.acceptor.bind(endpoint, ec);
  if (!ec) d.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    d.running = false;
    throw std::runtime_error("cannot listen on " + d.config.host + ":" + std::to_string(d.config.port) + ": " +
                             ec.message());
  }
  d.accept();
  for (int i = 0; i < std::max(1, d.options.io_threads); ++i) d.threads.emplace_back([&d] { d.ioc.run(); });
  if (d.options.autotick) d.threads.emplace_back([&d] { d.tick_loop(); });
  d.threads.emplace_back([&d] { d.render_loop(); });
}

void Server::stop() {
  auto& d = *impl_;
  if (!d.running.exchange(false)) return;
  {
    std::lock_guard lock(d.wake_mutex);
    d.stopping = true;
  }
  d.wake.notify_all();
  net::post(d.ioc, [&d] {
    beast::error_code ignored;
    d.acceptor.close(ignored);
  });
  d.ioc.stop();
  for (auto& t : d.threads) {
    if (t.joinable()) t.join();
  }
  d.threads.clear();
}

void Server::wait() {
  auto& d = *impl_;
  std::unique_lock lock(d.wake_mutex);
  d.wake.wait(lock, [&d] { return d.stopping.load(); });
}

std::uint16_t Server::port() const {
  beast::error_code ec;
  auto ep = impl_->acceptor.local_endpoint(ec);
  return ec ? 0 : ep.port();
}

double Server::render_fps() const { return impl_->frames.fps(); }

void Server::step(double dt) { impl_->hub.tick(dt, impl_->frames.fps()); }

}  // namespace huro::gateway
