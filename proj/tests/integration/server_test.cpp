#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "e2e.hpp"
#include "huro/mjpeg.hpp"
#include "huro/server.hpp"
#include "oracles.hpp"
#include "ws_client.hpp"

namespace huro::gateway {
namespace {

using namespace std::chrono_literals;

world::CourseMap course(const std::string& name) {
  std::ifstream in(std::string(HURO_COURSE_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return *world::load_course(ss.str());
}

Config test_config() {
  Config c;
  c.host = "127.0.0.1";
  c.port = 0;
  c.static_dir = HURO_STATIC_DIR;
  return c;
}

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server_ = std::make_unique<Server>(test_config(), course("three_obstacles.json"));
    server_->start();
    ASSERT_NE(server_->port(), 0);
  }
  void TearDown() override { server_->stop(); }

  std::unique_ptr<Server> server_;
};

TEST_F(ServerTest, Health) {
  auto reply = testing::http_get(server_->port(), "/health");
  EXPECT_EQ(reply.status, 200);
  EXPECT_EQ(Json::parse(reply.body), Json({{"status", "ok"}}));
}

TEST_F(ServerTest, IndexAndNotFound) {
  auto index = testing::http_get(server_->port(), "/");
  EXPECT_EQ(index.status, 200);
  EXPECT_NE(index.body.find("<html"), std::string::npos);
  EXPECT_EQ(testing::http_get(server_->port(), "/nope").status, 404);
  EXPECT_EQ(testing::http_get(server_->port(), "/static/../CMakeLists.txt").status, 400);
}

TEST_F(ServerTest, WebSocketStateAndCommands) {
  testing::WsClient client(server_->port());
  client.send(protocol::make_subscribe(protocol::kStateTopic));
  auto first = client.receive_on(std::string(protocol::kStateTopic));
  ASSERT_TRUE(first);
  auto s0 = protocol::state_from_json(*first->msg);
  ASSERT_TRUE(s0);
  EXPECT_DOUBLE_EQ(s0->y, 0.4);

  client.send(protocol::make_publish(protocol::kCmdTopic, Json{{"action", "walk_forward"}}));
  std::optional<protocol::StateMsg> moved;
  for (int i = 0; i < 20 && !(moved && moved->y > 0.45); ++i) {
    auto e = client.receive_on(std::string(protocol::kStateTopic));
    ASSERT_TRUE(e);
    moved = protocol::state_from_json(*e->msg);
  }
  ASSERT_TRUE(moved);
  EXPECT_NEAR(moved->y, 0.5, 1e-9);
}

TEST_F(ServerTest, MalformedFrameStatusAndMapLatch) {
  testing::WsClient client(server_->port());
  client.send_text("[1,2");
  auto status = client.receive_on(std::string(protocol::kStatusTopic));
  ASSERT_TRUE(status);
  EXPECT_EQ((*status->msg)["level"], "error");
  client.send(protocol::make_subscribe(protocol::kMapTopic));
  auto map = client.receive_on(std::string(protocol::kMapTopic));
  ASSERT_TRUE(map);
  auto parsed = world::course_from_json(*map->msg);
  ASSERT_TRUE(parsed);
  EXPECT_EQ(parsed->obstacles.size(), 3u);
}

TEST_F(ServerTest, LogsReachSubscribers) {
  testing::WsClient watcher(server_->port());
  testing::WsClient op(server_->port());
  watcher.send(protocol::make_subscribe(protocol::kLogTopic));
  watcher.send(protocol::make_subscribe("/sync"));
  watcher.send(protocol::make_publish("/sync", Json(1)));
  ASSERT_TRUE(watcher.receive_on("/sync"));
  op.send(protocol::make_publish(protocol::kCmdTopic, Json{{"action", "jump"}}));
  auto log = watcher.receive_on(std::string(protocol::kLogTopic));
  ASSERT_TRUE(log);
  EXPECT_EQ((*log->msg)["level"], "warn");
}

TEST_F(ServerTest, StreamHeadersAndParts) {
  std::string headers;
  auto bytes = testing::http_stream(server_->port(), "/stream", 60000, 5s, &headers);
  EXPECT_NE(headers.find("multipart/x-mixed-replace; boundary=frame"), std::string::npos);
  const auto parts = testing::read_multipart(bytes, std::string(kMjpegBoundary));
  ASSERT_GE(parts.size(), 2u);
  for (const auto& p : parts) {
    EXPECT_EQ(p.content_type, "image/jpeg");
    EXPECT_EQ(p.declared_length, p.body.size());
    auto image = testing::decode_jpeg(p.body);
    ASSERT_TRUE(image);
    EXPECT_EQ(image->width, 320);
  }
}

TEST_F(ServerTest, RenderLoopReportsFps) {
  std::this_thread::sleep_for(1500ms);
  EXPECT_NEAR(server_->render_fps(), 15.0, 3.0);
}

TEST(ServerManual, StepDrivesTicks) {
  ServerOptions options;
  options.autotick = false;
  Server server(test_config(), course("empty_3x6.json"), options);
  server.start();
  testing::WsClient client(server.port(), 500ms);
  client.send(protocol::make_subscribe(protocol::kStateTopic));
  client.send(protocol::make_subscribe("/sync"));
  client.send(protocol::make_publish("/sync", Json(1)));
  ASSERT_TRUE(client.receive_on("/sync"));
  EXPECT_FALSE(client.receive_on(std::string(protocol::kStateTopic)));
  server.step(0.05);
  EXPECT_TRUE(client.receive_on(std::string(protocol::kStateTopic)));
  server.stop();
}

TEST(ServerManual, BindFailureThrows) {
  Server first(test_config(), world::CourseMap{});
  first.start();
  Config taken = test_config();
  taken.port = first.port();
  Server second(taken, world::CourseMap{});
  EXPECT_THROW(second.start(), std::runtime_error);
  first.stop();
}

TEST(ServerE2E, DrivesCourseToFinish) {
  Server server(test_config(), course("three_obstacles.json"));
  server.start();
  auto run = testing::drive_three_obstacle_course(server.port(), 120);
  server.stop();
  EXPECT_TRUE(run.error.empty()) << run.error;
  EXPECT_TRUE(run.finished);
  EXPECT_EQ(run.contacts, 0);
  EXPECT_LE(run.commands, 120);
}

}  // namespace
}  // namespace huro::gateway
