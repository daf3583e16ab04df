#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "image.hpp"

namespace stereocut {

namespace detail {
inline std::uint8_t round_clamp_u8(double value) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(value + 0.5), 0.0, 255.0));
}
}  // namespace detail

// Full-range BT.601 (JPEG/JFIF) conversion.
inline Yuv rgb_to_yuv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double R = r, G = g, B = b;
  return {detail::round_clamp_u8(0.299 * R + 0.587 * G + 0.114 * B),
          detail::round_clamp_u8(128.0 - 0.168736 * R - 0.331264 * G + 0.5 * B),
          detail::round_clamp_u8(128.0 + 0.5 * R - 0.418688 * G - 0.081312 * B)};
}

inline Yuv rgb_to_yuv(Rgb c) { return rgb_to_yuv(c.r, c.g, c.b); }

// Inverse of rgb_to_yuv up to quantization.
inline Rgb yuv_to_rgb(Yuv c) {
  const double Y = c.y, U = c.u - 128.0, V = c.v - 128.0;
  return {detail::round_clamp_u8(Y + 1.402 * V),
          detail::round_clamp_u8(Y - 0.344136 * U - 0.714136 * V),
          detail::round_clamp_u8(Y + 1.772 * U)};
}

inline Frame to_frame(const RgbImage& rgb, int t) {
  Frame frame{Image<Yuv>(rgb.width(), rgb.height()), t};
  auto src = rgb.pixels();
  auto dst = frame.pixels.pixels();
  std::transform(src.begin(), src.end(), dst.begin(), [](Rgb c) { return rgb_to_yuv(c); });
  return frame;
}

inline RgbImage to_rgb(const Frame& frame) {
  RgbImage rgb(frame.width(), frame.height());
  auto src = frame.pixels.pixels();
  auto dst = rgb.pixels();
  std::transform(src.begin(), src.end(), dst.begin(), [](Yuv c) { return yuv_to_rgb(c); });
  return rgb;
}

}  // namespace stereocut
