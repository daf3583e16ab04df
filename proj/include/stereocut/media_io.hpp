#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "color.hpp"
#include "error.hpp"
#include "image.hpp"

namespace stereocut {

namespace fs = std::filesystem;

// Disparity files hold d * 16 as unsigned 16-bit; 0 marks an invalid pixel.
inline constexpr double kDisparityScale = 16.0;

inline DisparityMap decode_disparity(const Image<std::uint16_t>& raw) {
  DisparityMap dm(raw.width(), raw.height());
  auto src = raw.pixels();
  auto d = dm.d.pixels();
  auto valid = dm.valid.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    valid[i] = src[i] != 0;
    d[i] = src[i] / kDisparityScale;
  }
  return dm;
}

inline DisparityMap decode_disparity(const cv::Mat& raw) {
  if (raw.empty() || raw.depth() != CV_16U || raw.channels() != 1) {
    throw Error(ErrorCode::UnsupportedFormat,
                "disparity must be a single-channel 16-bit image (got depth " +
                    std::to_string(raw.depth()) + ", " + std::to_string(raw.channels()) +
                    " channels)");
  }
  Image<std::uint16_t> img(raw.cols, raw.rows);
  for (int y = 0; y < raw.rows; ++y) {
    const auto* row = raw.ptr<std::uint16_t>(y);
    std::copy(row, row + raw.cols, &img(0, y));
  }
  return decode_disparity(img);
}

// Valid pixels never encode to the sentinel 0; values saturate at 65535.
inline Image<std::uint16_t> encode_disparity(const DisparityMap& dm) {
  Image<std::uint16_t> raw(dm.width(), dm.height(), 0);
  auto d = dm.d.pixels();
  auto valid = dm.valid.pixels();
  auto out = raw.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!valid[i]) continue;
    const double q = std::floor(d[i] * kDisparityScale + 0.5);
    out[i] = static_cast<std::uint16_t>(std::clamp(q, 1.0, 65535.0));
  }
  return raw;
}

inline std::string numbered_filename(std::size_t index, std::string_view ext = "png") {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu.", index);
  return std::string(buf) + std::string(ext);
}

// Files named `<digits>.<ext>` in `dir`, ordered by index. The numbering must be
// contiguous; a gap raises MissingFile naming the first absent index.
inline std::vector<fs::path> list_numbered_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::MissingFile, "directory not found: " + dir.string());
  }
  std::vector<std::pair<std::size_t, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    if (stem.empty() || entry.path().extension().string().size() < 2 ||
        !std::all_of(stem.begin(), stem.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      continue;
    }
    std::size_t index = 0;
    auto [ptr, err] = std::from_chars(stem.data(), stem.data() + stem.size(), index);
    if (err != std::errc{}) continue;
    found.emplace_back(index, entry.path());
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> paths;
  paths.reserve(found.size());
  for (std::size_t i = 0; i < found.size(); ++i) {
    const std::size_t expected = found.front().first + i;
    if (found[i].first != expected) {
      throw Error(ErrorCode::MissingFile, "missing index " + std::to_string(expected) + " (" +
                                              numbered_filename(expected, "*") + ") in " +
                                              dir.string());
    }
    paths.push_back(found[i].second);
  }
  return paths;
}

inline cv::Mat read_image(const fs::path& path, int flags) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::MissingFile, "file not found: " + path.string());
  }
  cv::Mat m = cv::imread(path.string(), flags);
  if (m.empty()) throw Error(ErrorCode::UnsupportedFormat, "cannot decode " + path.string());
  return m;
}

inline RgbImage read_rgb(const fs::path& path) {
  cv::Mat bgr = read_image(path, cv::IMREAD_COLOR);
  RgbImage img(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) img(x, y) = {row[x][2], row[x][1], row[x][0]};
  }
  return img;
}

inline DisparityMap read_disparity(const fs::path& path) {
  try {
    return decode_disparity(read_image(path, cv::IMREAD_UNCHANGED));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnsupportedFormat) throw;
    throw Error(ErrorCode::UnsupportedFormat, path.string() + ": " + e.what());
  }
}

// Any nonzero gray value reads as foreground.
inline BinaryMask read_mask(const fs::path& path) {
  cv::Mat gray = read_image(path, cv::IMREAD_GRAYSCALE);
  BinaryMask mask(gray.cols, gray.rows);
  for (int y = 0; y < gray.rows; ++y) {
    const auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < gray.cols; ++x) mask(x, y) = row[x] != 0;
  }
  return mask;
}

inline void write_image(const fs::path& path, const cv::Mat& m) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

inline void write_rgb(const RgbImage& img, const fs::path& path) {
  cv::Mat bgr(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) row[x] = {img(x, y).b, img(x, y).g, img(x, y).r};
  }
  write_image(path, bgr);
}

inline void write_disparity(const DisparityMap& dm, const fs::path& path) {
  const auto raw = encode_disparity(dm);
  cv::Mat m(raw.height(), raw.width(), CV_16UC1);
  for (int y = 0; y < raw.height(); ++y) {
    std::copy(&raw(0, y), &raw(0, y) + raw.width(), m.ptr<std::uint16_t>(y));
  }
  write_image(path, m);
}

inline void write_mask(const BinaryMask& mask, const fs::path& path) {
  cv::Mat m(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < mask.width(); ++x) row[x] = mask(x, y) ? 255 : 0;
  }
  write_image(path, m);
}

// Foreground pixels are blended half-and-half with pure red.
inline RgbImage make_overlay(const Frame& frame, const BinaryMask& mask) {
  if (!mask.same_shape(frame.width(), frame.height())) {
    throw Error(ErrorCode::DimensionMismatch, "overlay mask does not match frame size");
  }
  RgbImage out = to_rgb(frame);
  constexpr double alpha = 0.5;
  constexpr Rgb tint{255, 0, 0};
  auto blend = [](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::floor((1.0 - alpha) * a + alpha * b + 0.5));
  };
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (!mask(x, y)) continue;
      Rgb& c = out(x, y);
      c = {blend(c.r, tint.r), blend(c.g, tint.g), blend(c.b, tint.b)};
    }
  }
  return out;
}

inline void write_overlay(const Frame& frame, const BinaryMask& mask, const fs::path& path) {
  write_rgb(make_overlay(frame, mask), path);
}

inline StereoSequence load_sequence(const fs::path& frame_dir, const fs::path& disparity_dir) {
  const auto frame_paths = list_numbered_files(frame_dir);
  const auto disp_paths = list_numbered_files(disparity_dir);
  if (frame_paths.size() != disp_paths.size()) {
    throw Error(ErrorCode::CountMismatch,
                std::to_string(frame_paths.size()) + " frames in " + frame_dir.string() +
                    " vs " + std::to_string(disp_paths.size()) + " disparity maps in " +
                    disparity_dir.string());
  }
  if (frame_paths.empty()) {
    throw Error(ErrorCode::MissingFile, "no numbered frames in " + frame_dir.string());
  }
  StereoSequence seq;
  seq.frames.reserve(frame_paths.size());
  seq.disparities.reserve(disp_paths.size());
  for (std::size_t i = 0; i < frame_paths.size(); ++i) {
    seq.frames.push_back(to_frame(read_rgb(frame_paths[i]), static_cast<int>(i)));
    seq.disparities.push_back(read_disparity(disp_paths[i]));
    const auto& f = seq.frames.back();
    const auto& d = seq.disparities.back();
    if (!f.pixels.same_shape(seq.frames.front().pixels) || !d.d.same_shape(f.pixels)) {
      throw Error(ErrorCode::DimensionMismatch,
                  "size mismatch at index " + std::to_string(i) + " (" +
                      frame_paths[i].string() + " vs " + disp_paths[i].string() + ")");
    }
  }
  return seq;
}

inline std::vector<BinaryMask> load_masks(const fs::path& dir) {
  std::vector<BinaryMask> masks;
  for (const auto& p : list_numbered_files(dir)) masks.push_back(read_mask(p));
  return masks;
}

}  // namespace stereocut
