#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "image.hpp"

namespace stereocut {

// Count of valid pixels per integer disparity (rounded half up).
struct DisparityHistogram {
  std::vector<std::size_t> bins;
  std::size_t total = 0;

  int d_max_bin() const noexcept { return static_cast<int>(bins.size()) - 1; }

  // Frequency of bin d; zero outside the populated range.
  std::size_t f(long d) const noexcept {
    return (d < 0 || d >= static_cast<long>(bins.size())) ? 0 : bins[static_cast<std::size_t>(d)];
  }
};

struct PriorThresholds {
  std::size_t n_th1 = 0;
  std::size_t n_th2 = 0;

  static PriorThresholds from_total(std::size_t total, std::size_t nth1_divisor = 100,
                                    std::size_t nth2_divisor = 10) {
    return {total / nth1_divisor, total / nth2_divisor};
  }
};

struct DisparityInterval {
  int d_lo = 0;
  int d_hi = 0;
  int d_th = 0;

  bool contains(long bin) const noexcept { return bin >= d_lo && bin <= d_hi; }
  friend bool operator==(const DisparityInterval&, const DisparityInterval&) = default;
};

// Inclusive pixel rectangle.
struct RoiRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  int width() const noexcept { return x1 - x0 + 1; }
  int height() const noexcept { return y1 - y0 + 1; }
  bool contains(int x, int y) const noexcept { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  static RoiRect full(int width, int height) { return {0, 0, width - 1, height - 1}; }
  RoiRect united(const RoiRect& o) const {
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
  }
  friend bool operator==(const RoiRect&, const RoiRect&) = default;
};

enum class PeakRule { Nearest, MostFrequent };

inline long disparity_bin(double d) { return static_cast<long>(std::floor(d + 0.5)); }

inline DisparityHistogram disparity_histogram(const DisparityMap& dm) {
  DisparityHistogram h;
  auto d = dm.d.pixels();
  auto valid = dm.valid.pixels();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!valid[i]) continue;
    const auto bin = static_cast<std::size_t>(std::max(0L, disparity_bin(d[i])));
    if (bin >= h.bins.size()) h.bins.resize(bin + 1, 0);
    ++h.bins[bin];
    ++h.total;
  }
  if (h.total == 0) throw Error(ErrorCode::NoValidDisparity, "disparity map has no valid pixel");
  return h;
}

// A bin qualifies when it is a strict local maximum of the histogram and holds
// more than n_th1 pixels. `Nearest` returns the qualifying bin with the largest
// disparity; `MostFrequent` the one with the highest count (ties to larger d).
inline int find_foreground_peak(const DisparityHistogram& h, PeakRule rule = PeakRule::Nearest,
                                std::size_t nth1_divisor = 100) {
  const auto th = PriorThresholds::from_total(h.total, nth1_divisor);
  std::optional<int> best;
  for (int d = h.d_max_bin(); d >= 0; --d) {
    const std::size_t fd = h.f(d);
    if (!(fd > h.f(d - 1) && fd > h.f(d + 1) && fd > th.n_th1)) continue;
    if (rule == PeakRule::Nearest) return d;
    if (!best || fd > h.f(*best)) best = d;
  }
  if (!best) {
    throw Error(ErrorCode::NoForegroundPeak,
                "no histogram bin is a local maximum above " + std::to_string(th.n_th1));
  }
  return *best;
}

// Greedy region growing from the peak until the covered count exceeds n_th2.
// Each step adds the boundary neighbour with the larger count (ties go to the
// larger disparity); growth crosses empty bins while populated bins remain on
// that side and stops once every populated bin is covered.
inline DisparityInterval grow_interval(const DisparityHistogram& h, int d_th,
                                       std::size_t nth2_divisor = 10) {
  const auto th = PriorThresholds::from_total(h.total, 100, nth2_divisor);
  int first_populated = 0;
  while (first_populated < h.d_max_bin() && h.f(first_populated) == 0) ++first_populated;
  int last_populated = h.d_max_bin();
  while (last_populated > 0 && h.f(last_populated) == 0) --last_populated;

  DisparityInterval g{d_th, d_th, d_th};
  std::size_t sum = h.f(d_th);
  while (sum <= th.n_th2) {
    const bool can_down = g.d_lo > first_populated;
    const bool can_up = g.d_hi < last_populated;
    if (!can_down && !can_up) break;
    const bool up = can_up && (!can_down || h.f(g.d_hi + 1) >= h.f(g.d_lo - 1));
    if (up) {
      sum += h.f(++g.d_hi);
    } else {
      sum += h.f(--g.d_lo);
    }
  }
  return g;
}

inline BinaryMask build_prior_mask(const DisparityMap& dm, const DisparityInterval& interval) {
  BinaryMask mask(dm.width(), dm.height(), 0);
  auto d = dm.d.pixels();
  auto valid = dm.valid.pixels();
  auto out = mask.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = valid[i] && interval.contains(disparity_bin(d[i]));
  }
  return mask;
}

inline RoiRect bounding_rect(const BinaryMask& mask, int margin = 0) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground pixel");
  return {std::max(0, x0 - margin), std::max(0, y0 - margin),
          std::min(mask.width() - 1, x1 + margin), std::min(mask.height() - 1, y1 + margin)};
}

struct PriorOptions {
  PeakRule peak_rule = PeakRule::Nearest;
  std::size_t nth1_divisor = 100;
  std::size_t nth2_divisor = 10;
};

// Histogram, peak, and grown interval of one disparity map.
inline DisparityInterval compute_prior_interval(const DisparityMap& dm,
                                                const PriorOptions& opt = {}) {
  const auto h = disparity_histogram(dm);
  const int d_th = find_foreground_peak(h, opt.peak_rule, opt.nth1_divisor);
  return grow_interval(h, d_th, opt.nth2_divisor);
}

}  // namespace stereocut
