#include "huro/mjpeg.hpp"

#include <string>

namespace huro::gateway {

std::vector<std::uint8_t> mjpeg_part(std::span<const std::uint8_t> jpeg) {
  std::string header = "--";
  header += kMjpegBoundary;
  header += "\r\nContent-Type: image/jpeg\r\nContent-Length: ";
  header += std::to_string(jpeg.size());
  header += "\r\n\r\n";

  std::vector<std::uint8_t> part;
  part.reserve(header.size() + jpeg.size() + 2);
  part.insert(part.end(), header.begin(), header.end());
  part.insert(part.end(), jpeg.begin(), jpeg.end());
  part.push_back('\r');
  part.push_back('\n');
  return part;
}

}  // namespace huro::gateway
