// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "e2e.hpp"
#include "generators.hpp"
#include "huro/camera.hpp"
#include "huro/mjpeg.hpp"
#include "huro/protocol.hpp"
#include "huro/robot_sim.hpp"
#include "huro/server.hpp"
#include "huro/world.hpp"
#include "oracles.hpp"
#include "pubsub_model.hpp"
#include "ws_client.hpp"

namespace {

using namespace huro;
using Clock = std::chrono::steady_clock;

// Pinned thresholds.
constexpr int kFuzzInputs = 100'000;
constexpr int kRoundTrips = 1'000;
constexpr double kFuzzBudgetS = 30.0;

constexpr int kScripts = 1'000;
constexpr int kMaxScriptLength = 200;
constexpr double kPoseTolerance = 1e-9;
constexpr double kKinematicsBudgetS = 60.0;

constexpr int kContactQueries = 10'000;
constexpr int kRayQueries = 10'000;
constexpr double kGeometryTolerance = 0.001;
constexpr double kBoundarySpacing = 0.001;
constexpr double kMarchStep = 0.0005;

constexpr int kStreamParts = 100;
constexpr double kRateWindowS = 2.0;

constexpr int kMaxCommands = 120;
constexpr double kE2eBudgetS = 10.0;

constexpr int kModelSessions = 5;
constexpr int kModelSeeds = 50;
constexpr int kModelOperations = 2'000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

world::CourseMap shipped_course() {
  std::ifstream in(std::string(HURO_COURSE_DIR) + "/three_obstacles.json");
  std::stringstream ss;
  ss << in.rdbuf();
  auto m = world::load_course(ss.str());
  if (!m) throw std::runtime_error("shipped course failed to load: " + m.error().detail);
  return *m;
}

gateway::Config server_config(int width, int height, int fps) {
  gateway::Config c;
  c.host = "127.0.0.1";
  c.port = 0;
  c.static_dir = HURO_STATIC_DIR;
  c.render.width = width;
  c.render.height = height;
  c.render.fps = fps;
  return c;
}

std::string mutate(testing::Rng& rng, std::string text) {
  const int edits = testing::uniform_int(rng, 1, 4);
  for (int i = 0; i < edits && !text.empty(); ++i) {
    const auto at = static_cast<std::size_t>(testing::uniform_int(rng, 0, static_cast<int>(text.size()) - 1));
    switch (testing::uniform_int(rng, 0, 2)) {
      case 0: text[at] = static_cast<char>(testing::uniform_int(rng, 0, 255)); break;
      case 1: text.erase(at, 1); break;
      default: text.insert(at, 1, "{}[]\",:\\"[testing::uniform_int(rng, 0, 7)]); break;
    }
  }
  return text;
}

Outcome protocol_fuzz() {
  const auto start = Clock::now();
  testing::Rng rng(0xF022);
  long long decoded_ok = 0;
  for (int i = 0; i < kFuzzInputs; ++i) {
    std::string input;
    switch (i % 3) {
      case 0: {
        input.resize(static_cast<std::size_t>(testing::uniform_int(rng, 0, 256)));
        for (auto& ch : input) ch = static_cast<char>(testing::uniform_int(rng, 0, 255));
        break;
      }
      case 1: input = mutate(rng, protocol::encode_envelope(testing::random_envelope(rng))); break;
      default: input = std::string(static_cast<std::size_t>(testing::uniform_int(rng, 1, 200)), '[') + "1"; break;
    }
    if (protocol::decode_envelope(input)) ++decoded_ok;
  }
  int mismatches = 0;
  for (int i = 0; i < kRoundTrips; ++i) {
    const auto original = protocol::encode_envelope(testing::random_envelope(rng));
    auto decoded = protocol::decode_envelope(original);
    if (!decoded || protocol::encode_envelope(*decoded) != original) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%d inputs, 0 crashes (%lld decoded); %d/%d round-trip mismatches; %.2f s < %.0f s",
                kFuzzInputs, decoded_ok, mismatches, kRoundTrips, elapsed, kFuzzBudgetS);
  return {mismatches == 0 && elapsed < kFuzzBudgetS, buf};
}

Outcome kinematics_oracle() {
  const auto start = Clock::now();
  testing::Rng rng(0x4B1);
  int pose_failures = 0;
  int contact_failures = 0;
  long long total_contacts = 0;
  double worst = 0.0;
  for (int run = 0; run < kScripts; ++run) {
    const auto map = testing::random_course(rng, 6);
    const auto script = testing::random_script(rng, testing::uniform_int(rng, 1, kMaxScriptLength));
    sim::RobotState s = sim::initial_state(map);
    for (const auto& c : script) s = sim::apply_command(s, c, map).state;
    testing::ReferencePose ref_start;
    ref_start.x = map.start.x;
    ref_start.y = map.start.y;
    ref_start.theta = map.start.theta;
    const auto ref = testing::fold_script(map, script, ref_start);
    const double err = std::max({std::abs(s.pose.x - ref.x), std::abs(s.pose.y - ref.y),
                                 std::abs(world::normalize_angle(s.pose.theta - ref.theta))});
    worst = std::max(worst, err);
    if (err > kPoseTolerance) ++pose_failures;
    if (s.contact_count != ref.contacts) ++contact_failures;
    total_contacts += ref.contacts;
  }
  const double elapsed = seconds_since(start);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "%d scripts: %d pose errors > %.0e (worst %.2e), %d contact_count mismatches (%lld contacts); %.2f s < "
                "%.0f s",
                kScripts, pose_failures, kPoseTolerance, worst, contact_failures, total_contacts, elapsed,
                kKinematicsBudgetS);
  return {pose_failures == 0 && contact_failures == 0 && elapsed < kKinematicsBudgetS, buf};
}

Outcome geometry_oracle() {
  testing::Rng rng(0x6E0);
  int contact_disagreements = 0;
  int contacts_found = 0;
  for (int i = 0; i < kContactQueries; ++i) {
    world::CourseMap map;
    map.width = 3.0;
    map.height = 6.0;
    map.obstacles.push_back(testing::random_obstacle(rng, map, "o"));
    world::Point p{testing::uniform(rng, -0.2, map.width + 0.2), testing::uniform(rng, -0.2, map.height + 0.2)};
    const double r = testing::uniform(rng, 0.02, 0.5);
    if (i % 2 == 0) {
      // Half the queries start near the outline.
      const auto outline = testing::sample_boundary(map.obstacles[0].shape, 0.01);
      const auto& q = outline[static_cast<std::size_t>(testing::uniform_int(rng, 0, static_cast<int>(outline.size()) - 1))];
      p = {q.x + testing::uniform(rng, -1.2 * r, 1.2 * r), q.y + testing::uniform(rng, -1.2 * r, 1.2 * r)};
    }
    const auto ids = world::check_contact(map, p, r);
    const bool analytic = std::find(ids.begin(), ids.end(), "o") != ids.end();
    const auto sampled = testing::sampled_disc_contact(map.obstacles[0].shape, p, r, kBoundarySpacing);
    if (analytic) ++contacts_found;
    if (analytic != sampled.contact && std::abs(sampled.distance - r) > kGeometryTolerance) ++contact_disagreements;
  }
  int ray_failures = 0;
  double worst = 0.0;
  for (int i = 0; i < kRayQueries; ++i) {
    const auto map = testing::random_course(rng, 6);
    const world::Point o{testing::uniform(rng, 0.0, map.width), testing::uniform(rng, 0.0, map.height)};
    const double dir = testing::uniform(rng, -world::kPi, world::kPi);
    const double err = std::abs(camera::cast_ray(map, o, dir) - testing::ray_march(map, o, dir, kMarchStep));
    worst = std::max(worst, std::isfinite(err) ? err : 1e9);
    if (!(err <= kGeometryTolerance)) ++ray_failures;
  }
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "%d contact queries (%d touching): %d disagreements beyond 1 mm; %d rays: %d beyond 1 mm (worst %.2e m)",
                kContactQueries, contacts_found, contact_disagreements, kRayQueries, ray_failures, worst);
  return {contact_disagreements == 0 && ray_failures == 0, buf};
}

std::size_t bytes_per_window(int width, int height, int fps) {
  gateway::Server server(server_config(width, height, fps), shipped_course());
  server.start();
  auto bytes = testing::http_stream(server.port(), "/stream", std::size_t{1} << 30,
                                    std::chrono::milliseconds(static_cast<int>(kRateWindowS * 1000)));
  server.stop();
  return bytes.size();
}

Outcome mjpeg_wire() {
  const auto map = shipped_course();
  const auto config = server_config(320, 240, 30);
  const auto sample = camera::encode_jpeg(
      camera::render_frame(map, sim::initial_state(map), config.render), config.render.jpeg_quality);
  const std::size_t want_bytes = gateway::mjpeg_part(sample).size() * (kStreamParts + 2) * 5 / 4;

  gateway::Server server(config, map);
  server.start();
  std::string headers;
  const auto bytes = testing::http_stream(server.port(), "/stream", want_bytes, std::chrono::seconds(20), &headers);
  server.stop();

  std::string error;
  auto parts = testing::read_multipart(bytes, std::string(gateway::kMjpegBoundary), nullptr, &error);
  int bad_length = 0, bad_markers = 0, undecodable = 0, bad_type = 0;
  const std::size_t checked = std::min<std::size_t>(parts.size(), kStreamParts);
  for (std::size_t i = 0; i < checked; ++i) {
    const auto& p = parts[i];
    if (p.declared_length != p.body.size()) ++bad_length;
    if (p.content_type != "image/jpeg") ++bad_type;
    const auto& b = p.body;
    if (b.size() < 4 || b[0] != 0xFF || b[1] != 0xD8 || b[b.size() - 2] != 0xFF || b[b.size() - 1] != 0xD9)
      ++bad_markers;
    auto image = testing::decode_jpeg(b);
    if (!image || image->width != 320 || image->height != 240) ++undecodable;
  }
  const bool header_ok = headers.find(std::string(gateway::kMjpegContentType)) != std::string::npos;

  const std::size_t small = bytes_per_window(320, 240, 15);
  const std::size_t large = bytes_per_window(640, 480, 15);

  char buf[300];
  std::snprintf(buf, sizeof buf,
                "%zu/%d parts; length errors %d, type errors %d, marker errors %d, undecodable %d%s%s; %.0f B/s at "
                "640x480 vs %.0f B/s at 320x240",
                checked, kStreamParts, bad_length, bad_type, bad_markers, undecodable,
                header_ok ? "" : "; bad Content-Type header", error.empty() ? "" : ("; " + error).c_str(),
                static_cast<double>(large) / kRateWindowS, static_cast<double>(small) / kRateWindowS);
  const bool pass = checked == kStreamParts && bad_length == 0 && bad_type == 0 && bad_markers == 0 &&
                    undecodable == 0 && header_ok && error.empty() && large > small;
  return {pass, buf};
}

Outcome end_to_end() {
  const auto map = shipped_course();
  std::vector<testing::DriveResult> runs;
  double worst_elapsed = 0.0;
  for (int i = 0; i < 2; ++i) {
    gateway::Server server(server_config(320, 240, 15), map);
    server.start();
    const auto start = Clock::now();
    runs.push_back(testing::drive_three_obstacle_course(server.port(), kMaxCommands));
    worst_elapsed = std::max(worst_elapsed, seconds_since(start));
    server.stop();
  }
  const auto& a = runs[0];
  const auto& b = runs[1];
  const bool identical = a.states == b.states;
  char buf[300];
  std::snprintf(buf, sizeof buf,
                "finished=%s contact_count=%lld commands=%d/%d; second run %s (%zu states); %.2f s < %.0f s%s%s",
                a.finished ? "true" : "false", a.contacts, a.commands, kMaxCommands,
                identical ? "bit-identical" : "DIFFERS", a.states.size(), worst_elapsed, kE2eBudgetS,
                a.error.empty() ? "" : "; ", a.error.c_str());
  const bool pass = a.error.empty() && b.error.empty() && a.finished && a.contacts == 0 &&
                    a.commands <= kMaxCommands && identical && worst_elapsed < kE2eBudgetS;
  return {pass, buf};
}

Outcome pubsub_model() {
  long long operations = 0, deliveries = 0;
  std::string first_mismatch;
  int failing = 0;
  for (int seed = 1; seed <= kModelSeeds; ++seed) {
    auto r = testing::run_pubsub_model_check(static_cast<std::uint64_t>(seed), kModelSessions, kModelOperations);
    operations += r.operations;
    deliveries += r.deliveries;
    if (!r.mismatches.empty()) {
      ++failing;
      if (first_mismatch.empty()) first_mismatch = r.mismatches.front();
    }
  }
  char buf[300];
  std::snprintf(buf, sizeof buf, "%d scripts x %d sessions, %lld ops, %lld deliveries: %d scripts diverge%s%s",
                kModelSeeds, kModelSessions, operations, deliveries, failing, first_mismatch.empty() ? "" : "; ",
                first_mismatch.c_str());
  return {failing == 0, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"protocol-fuzz", protocol_fuzz},       {"kinematics-oracle", kinematics_oracle},
      {"geometry-oracle", geometry_oracle},   {"mjpeg-wire", mjpeg_wire},
      {"end-to-end", end_to_end},             {"pubsub-model", pubsub_model},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
