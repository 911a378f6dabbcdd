#include <string>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "huro/camera.hpp"
#include "huro/mjpeg.hpp"
#include "oracles.hpp"

namespace huro::gateway {
namespace {

std::string as_text(const std::vector<std::uint8_t>& bytes) { return {bytes.begin(), bytes.end()}; }

TEST(Mjpeg, FiveBytePart) {
  const std::vector<std::uint8_t> payload = {1, 2, 3, 4, 5};
  const auto part = mjpeg_part(payload);
  const std::string header = "--frame\r\nContent-Type: image/jpeg\r\nContent-Length: 5\r\n\r\n";
  ASSERT_EQ(part.size(), header.size() + 5 + 2);
  EXPECT_EQ(as_text(part).substr(0, header.size()), header);
  EXPECT_EQ(std::vector<std::uint8_t>(part.begin() + static_cast<long>(header.size()), part.end() - 2), payload);
  EXPECT_EQ(as_text(part).substr(part.size() - 2), "\r\n");
}

TEST(Mjpeg, ContentTypeNamesBoundary) {
  EXPECT_NE(std::string(kMjpegContentType).find("boundary=" + std::string(kMjpegBoundary)), std::string::npos);
}

TEST(Mjpeg, EmptyPayload) {
  const auto part = mjpeg_part({});
  EXPECT_NE(as_text(part).find("Content-Length: 0\r\n\r\n\r\n"), std::string::npos);
}

TEST(Mjpeg, ConcatenatedPartsParseBack) {
  testing::Rng rng(5);
  std::vector<std::vector<std::uint8_t>> payloads;
  std::vector<std::uint8_t> stream;
  for (int i = 0; i < 50; ++i) {
    std::vector<std::uint8_t> p(static_cast<std::size_t>(testing::uniform_int(rng, 0, 4000)));
    for (auto& b : p) b = static_cast<std::uint8_t>(testing::uniform_int(rng, 0, 255));
    const auto part = mjpeg_part(p);
    stream.insert(stream.end(), part.begin(), part.end());
    payloads.push_back(std::move(p));
  }
  std::size_t consumed = 0;
  std::string error;
  const auto parts = testing::read_multipart(stream, std::string(kMjpegBoundary), &consumed, &error);
  EXPECT_TRUE(error.empty()) << error;
  ASSERT_EQ(parts.size(), payloads.size());
  EXPECT_EQ(consumed, stream.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    EXPECT_EQ(parts[i].content_type, "image/jpeg");
    EXPECT_EQ(parts[i].declared_length, payloads[i].size());
    EXPECT_EQ(parts[i].body, payloads[i]);
  }
}

TEST(Mjpeg, RealFrameRoundTrip) {
  const camera::RenderConfig config;
  const world::CourseMap map;
  sim::RobotState state = sim::initial_state(map);
  const auto jpeg = camera::encode_jpeg(camera::render_frame(map, state, config), config.jpeg_quality);
  const auto parts = testing::read_multipart(mjpeg_part(jpeg), std::string(kMjpegBoundary));
  ASSERT_EQ(parts.size(), 1u);
  auto image = testing::decode_jpeg(parts[0].body);
  ASSERT_TRUE(image);
  EXPECT_EQ(image->width, config.width);
  EXPECT_EQ(image->height, config.height);
}

TEST(Mjpeg, Deterministic) {
  const std::vector<std::uint8_t> payload(1234, 0xAB);
  EXPECT_EQ(mjpeg_part(payload), mjpeg_part(payload));
}

}  // namespace
}  // namespace huro::gateway
