#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace huro::gateway {

inline constexpr std::string_view kMjpegBoundary = "frame";
inline constexpr std::string_view kMjpegContentType = "multipart/x-mixed-replace; boundary=frame";

/// One multipart part:
/// "--frame\r\nContent-Type: image/jpeg\r\nContent-Length: N\r\n\r\n" + jpeg + "\r\n".
std::vector<std::uint8_t> mjpeg_part(std::span<const std::uint8_t> jpeg);

}  // namespace huro::gateway
