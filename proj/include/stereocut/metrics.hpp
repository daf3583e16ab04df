#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "error.hpp"
#include "image.hpp"

namespace stereocut {

struct FrameScore {
  double j = 0.0;  // region similarity (IoU)
  double f = 0.0;  // contour F-measure
};

struct SequenceReport {
  double j_mean = 0.0, j_recall = 0.0, j_decay = 0.0;
  double f_mean = 0.0, f_recall = 0.0, f_decay = 0.0;
};

inline void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.width()) + "x" + std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

// |pred & gt| / |pred | gt|; 1 when both are empty.
inline double region_similarity(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt);
  std::size_t inter = 0, uni = 0;
  auto p = pred.pixels();
  auto g = gt.pixels();
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += p[i] && g[i];
    uni += p[i] || g[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Foreground pixels with a 4-neighbour that is background or off-image.
inline BinaryMask boundary_pixels(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height(), 0);
  const int w = mask.width(), h = mask.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      out(x, y) = x == 0 || y == 0 || x == w - 1 || y == h - 1 || !mask(x - 1, y) ||
                  !mask(x + 1, y) || !mask(x, y - 1) || !mask(x, y + 1);
    }
  }
  return out;
}

namespace detail {
// Boundary pixels of `from` that have a boundary pixel of `to` within
// Chebyshev distance tol.
inline std::size_t matched_boundary(const BinaryMask& from, const BinaryMask& to, int tol) {
  const int w = from.width(), h = from.height();
  // Dilate `to` by a (2 tol + 1) square: row pass then column pass.
  BinaryMask rows(w, h, 0), dilated(w, h, 0);
  for (int y = 0; y < h; ++y) {
    int last = -1 - tol;  // most recent set column at or left of x + tol
    for (int x = 0, probe = 0; x < w; ++x) {
      for (; probe <= std::min(w - 1, x + tol); ++probe) {
        if (to(probe, y)) last = probe;
      }
      rows(x, y) = last >= x - tol;
    }
  }
  for (int x = 0; x < w; ++x) {
    int last = -1 - tol;
    for (int y = 0, probe = 0; y < h; ++y) {
      for (; probe <= std::min(h - 1, y + tol); ++probe) {
        if (rows(x, probe)) last = probe;
      }
      dilated(x, y) = last >= y - tol;
    }
  }
  std::size_t matched = 0;
  auto f = from.pixels();
  auto d = dilated.pixels();
  for (std::size_t i = 0; i < f.size(); ++i) matched += f[i] && d[i];
  return matched;
}
}  // namespace detail

inline double contour_f_measure(const BinaryMask& pred, const BinaryMask& gt, int tol = 2) {
  require_same_shape(pred, gt);
  const BinaryMask pb = boundary_pixels(pred);
  const BinaryMask gb = boundary_pixels(gt);
  const std::size_t np = count_foreground(pb), ng = count_foreground(gb);
  if (np == 0 && ng == 0) return 1.0;
  if (np == 0 || ng == 0) return 0.0;
  const double precision = static_cast<double>(detail::matched_boundary(pb, gb, tol)) / np;
  const double recall = static_cast<double>(detail::matched_boundary(gb, pb, tol)) / ng;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

inline FrameScore score_frame(const BinaryMask& pred, const BinaryMask& gt, int tol = 2) {
  return {region_similarity(pred, gt), contour_f_measure(pred, gt, tol)};
}

namespace detail {
struct Stats {
  double mean, recall, decay;
};

// Decay compares the first and last floor(n/4) values; zero below 4 values.
inline Stats summarize(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  const double recall =
      static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x > 0.5; })) /
      n;
  double decay = 0.0;
  const std::size_t q = v.size() / 4;
  if (q > 0) {
    const double head = std::accumulate(v.begin(), v.begin() + q, 0.0) / q;
    const double tail = std::accumulate(v.end() - q, v.end(), 0.0) / q;
    decay = head - tail;
  }
  return {mean, recall, decay};
}
}  // namespace detail

inline SequenceReport aggregate(std::span<const FrameScore> scores) {
  if (scores.empty()) throw Error(ErrorCode::EmptyInput, "no frame scores to aggregate");
  std::vector<double> j, f;
  for (const auto& s : scores) {
    j.push_back(s.j);
    f.push_back(s.f);
  }
  const auto js = detail::summarize(j);
  const auto fs = detail::summarize(f);
  return {js.mean, js.recall, js.decay, fs.mean, fs.recall, fs.decay};
}

inline std::vector<FrameScore> score_sequence(std::span<const BinaryMask> pred,
                                              std::span<const BinaryMask> gt, int tol = 2) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::CountMismatch, std::to_string(pred.size()) + " predictions vs " +
                                              std::to_string(gt.size()) + " ground-truth masks");
  }
  std::vector<FrameScore> out;
  out.reserve(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) out.push_back(score_frame(pred[i], gt[i], tol));
  return out;
}

}  // namespace stereocut
