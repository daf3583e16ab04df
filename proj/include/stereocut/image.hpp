#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace stereocut {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Yuv {
  std::uint8_t y = 0, u = 0, v = 0;
  friend bool operator==(const Yuv&, const Yuv&) = default;
};

// Row-major 2-D raster.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorCode::DimensionMismatch,
                  "image dimensions must be positive, got " + std::to_string(width) + "x" +
                      std::to_string(height));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) noexcept {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const noexcept {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  bool same_shape(int width, int height) const noexcept {
    return width_ == width && height_ == height;
  }
  template <typename U>
  bool same_shape(const Image<U>& other) const noexcept {
    return same_shape(other.width(), other.height());
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using RgbImage = Image<Rgb>;

// Per-pixel label, 1 = foreground.
using BinaryMask = Image<std::uint8_t>;

inline std::size_t count_foreground(const BinaryMask& mask) {
  std::size_t n = 0;
  for (auto v : mask.pixels()) n += v != 0;
  return n;
}

// A left-view frame in YUV, with its 0-based temporal index.
struct Frame {
  Image<Yuv> pixels;
  int t = 0;

  int width() const noexcept { return pixels.width(); }
  int height() const noexcept { return pixels.height(); }
  friend bool operator==(const Frame&, const Frame&) = default;
};

struct DisparityMap {
  Image<double> d;
  Image<std::uint8_t> valid;

  DisparityMap() = default;
  DisparityMap(int width, int height) : d(width, height, 0.0), valid(width, height, 0) {}

  int width() const noexcept { return d.width(); }
  int height() const noexcept { return d.height(); }
  bool is_valid(int x, int y) const noexcept { return valid(x, y) != 0; }

  friend bool operator==(const DisparityMap&, const DisparityMap&) = default;
};

struct StereoSequence {
  std::vector<Frame> frames;
  std::vector<DisparityMap> disparities;

  std::size_t length() const noexcept { return frames.size(); }
  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }

  // Throws CountMismatch / DimensionMismatch when the sequence is inconsistent.
  void validate() const {
    if (frames.size() != disparities.size()) {
      throw Error(ErrorCode::CountMismatch,
                  std::to_string(frames.size()) + " frames vs " +
                      std::to_string(disparities.size()) + " disparity maps");
    }
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (frames[i].width() != width() || frames[i].height() != height() ||
          !disparities[i].d.same_shape(width(), height()) ||
          !disparities[i].valid.same_shape(width(), height())) {
        throw Error(ErrorCode::DimensionMismatch,
                    "frame " + std::to_string(i) + " does not match the sequence size " +
                        std::to_string(width()) + "x" + std::to_string(height()));
      }
    }
  }
};

}  // namespace stereocut
