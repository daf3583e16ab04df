#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "disparity_prior.hpp"
#include "error.hpp"
#include "image.hpp"

namespace stereocut {

inline constexpr int kGridDims = 7;

// Axis order of the bilateral space.
namespace axis {
inline constexpr int Y = 0;
inline constexpr int U = 1;
inline constexpr int V = 2;
inline constexpr int X = 3;
inline constexpr int Row = 4;
inline constexpr int D = 5;
inline constexpr int T = 6;
}  // namespace axis

struct Range {
  double min = 0.0;
  double max = 0.0;
  bool degenerate() const noexcept { return !(max > min); }
  friend bool operator==(const Range&, const Range&) = default;
};

using BilateralCoord = std::array<double, kGridDims>;
using VertexKey = std::array<int, kGridDims>;
using PackedKey = std::uint64_t;

inline constexpr int kKeyBits = 9;
inline constexpr int kMaxGridSize = (1 << kKeyBits) - 1;

// Lexicographic in (Y, U, V, x, y, d, t): sorting packed keys sorts vertices.
inline PackedKey pack(const VertexKey& k) noexcept {
  PackedKey p = 0;
  for (int i = 0; i < kGridDims; ++i) p = (p << kKeyBits) | static_cast<PackedKey>(k[i]);
  return p;
}

inline VertexKey unpack(PackedKey p) noexcept {
  VertexKey k{};
  for (int i = kGridDims - 1; i >= 0; --i) {
    k[i] = static_cast<int>(p & kMaxGridSize);
    p >>= kKeyBits;
  }
  return k;
}

struct GridParams {
  // Vertices per axis run 0..dims[i] inclusive.
  std::array<int, kGridDims> dims{7, 9, 9, 13, 13, 2, 2};
  std::array<Range, kGridDims> ranges{};

  double rate(int i) const noexcept {
    return ranges[i].degenerate() ? 0.0 : dims[i] / (ranges[i].max - ranges[i].min);
  }

  void validate() const {
    for (int i = 0; i < kGridDims; ++i) {
      if (dims[i] < 1 || dims[i] > kMaxGridSize) {
        throw Error(ErrorCode::BadValue, "grid size " + std::to_string(dims[i]) +
                                             " outside [1, " + std::to_string(kMaxGridSize) + "]");
      }
      if (!std::isfinite(ranges[i].min) || !std::isfinite(ranges[i].max) ||
          ranges[i].max < ranges[i].min) {
        throw Error(ErrorCode::BadValue, "grid range on axis " + std::to_string(i) + " invalid");
      }
    }
  }

  // Grid sizes from the five group sizes (intensity, chroma, spatial, temporal, disparity).
  static std::array<int, kGridDims> from_groups(int intensity, int chroma, int spatial,
                                                int temporal, int disparity) {
    return {intensity, chroma, chroma, spatial, spatial, disparity, temporal};
  }
};

enum class InvalidDisparity { Zero, NearestValid };

// Values are clamped into range; degenerate ranges map to coordinate 0.
inline BilateralCoord lift(const std::array<double, kGridDims>& raw, const GridParams& params) {
  BilateralCoord b{};
  for (int i = 0; i < kGridDims; ++i) {
    const Range& r = params.ranges[i];
    if (r.degenerate()) continue;
    const double v = std::clamp(raw[i], r.min, r.max);
    b[i] = std::clamp(params.rate(i) * (v - r.min), 0.0, static_cast<double>(params.dims[i]));
  }
  return b;
}

inline VertexKey nearest_vertex(const BilateralCoord& b, const GridParams& params) {
  VertexKey k{};
  for (int i = 0; i < kGridDims; ++i) {
    k[i] = std::clamp(static_cast<int>(std::floor(b[i] + 0.5)), 0, params.dims[i]);
  }
  return k;
}

// Calls fn(key, weight) for the nearest vertex and each in-bounds axis
// neighbour, weight = prod_i max(0, 1 - |v_i - b_i|). Zero weights are skipped.
template <typename Fn>
inline void for_each_splat(const BilateralCoord& b, const GridParams& params, Fn&& fn) {
  const VertexKey n = nearest_vertex(b, params);
  auto weight_of = [&](const VertexKey& v) {
    double w = 1.0;
    for (int i = 0; i < kGridDims; ++i) {
      w *= std::max(0.0, 1.0 - std::abs(v[i] - b[i]));
      if (w == 0.0) break;
    }
    return w;
  };
  fn(n, weight_of(n));
  for (int i = 0; i < kGridDims; ++i) {
    for (int step : {-1, 1}) {
      VertexKey v = n;
      v[i] += step;
      if (v[i] < 0 || v[i] > params.dims[i]) continue;
      const double w = weight_of(v);
      if (w > 0.0) fn(v, w);
    }
  }
}

inline std::vector<std::pair<VertexKey, double>> splat_weights(const BilateralCoord& b,
                                                               const GridParams& params) {
  std::vector<std::pair<VertexKey, double>> out;
  for_each_splat(b, params, [&](const VertexKey& k, double w) { out.emplace_back(k, w); });
  return out;
}

struct GridVertex {
  double s = 0.0;     // total splat weight
  double a_fg = 0.0;  // disparity foreground affinity
  double a_bg = 0.0;  // disparity background affinity
  double m_fg = 0.0;  // propagated-mask foreground affinity
  double m_bg = 0.0;  // propagated-mask background affinity

  GridVertex& operator+=(const GridVertex& o) noexcept {
    s += o.s;
    a_fg += o.a_fg;
    a_bg += o.a_bg;
    m_fg += o.m_fg;
    m_bg += o.m_bg;
    return *this;
  }
};

// Occupied vertices (S > 0), sorted by packed key.
class SparseGrid {
 public:
  SparseGrid() = default;
  SparseGrid(GridParams params, std::vector<std::pair<PackedKey, GridVertex>> sorted,
             std::size_t pixel_count, bool has_mask)
      : params_(params), vertices_(std::move(sorted)), pixel_count_(pixel_count),
        has_mask_(has_mask) {
    index_.reserve(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      index_.emplace(vertices_[i].first, static_cast<std::uint32_t>(i));
    }
  }

  const GridParams& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  bool empty() const noexcept { return vertices_.empty(); }
  std::size_t pixel_count() const noexcept { return pixel_count_; }
  bool has_mask() const noexcept { return has_mask_; }

  PackedKey key(std::size_t i) const noexcept { return vertices_[i].first; }
  const GridVertex& vertex(std::size_t i) const noexcept { return vertices_[i].second; }

  std::optional<std::uint32_t> index_of(PackedKey key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const GridVertex* find(const VertexKey& key) const {
    auto i = index_of(pack(key));
    return i ? &vertices_[*i].second : nullptr;
  }

 private:
  GridParams params_;
  std::vector<std::pair<PackedKey, GridVertex>> vertices_;
  std::unordered_map<PackedKey, std::uint32_t> index_;
  std::size_t pixel_count_ = 0;
  bool has_mask_ = false;
};

// Ranges for a window: colour [0,255], spatial from the ROI, time from the
// frame indices, disparity from the observed valid min/max over the frames.
inline GridParams make_grid_params(const std::array<int, kGridDims>& dims,
                                   std::span<const Frame> frames,
                                   std::span<const DisparityMap> disparities,
                                   const RoiRect& roi) {
  GridParams p;
  p.dims = dims;
  p.ranges[axis::Y] = p.ranges[axis::U] = p.ranges[axis::V] = {0.0, 255.0};
  p.ranges[axis::X] = {static_cast<double>(roi.x0), static_cast<double>(roi.x1)};
  p.ranges[axis::Row] = {static_cast<double>(roi.y0), static_cast<double>(roi.y1)};
  if (!frames.empty()) {
    p.ranges[axis::T] = {static_cast<double>(frames.front().t),
                         static_cast<double>(frames.back().t)};
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& dm : disparities) {
    auto d = dm.d.pixels();
    auto valid = dm.valid.pixels();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!valid[i]) continue;
      lo = std::min(lo, d[i]);
      hi = std::max(hi, d[i]);
    }
  }
  p.ranges[axis::D] = lo <= hi ? Range{lo, hi} : Range{0.0, 0.0};
  p.validate();
  return p;
}

// Extra frame splatted only into the mask affinities (the previous window's
// last frame together with its solved mask).
struct PropagationFrame {
  const Frame* frame = nullptr;
  const DisparityMap* disparity = nullptr;
  const BinaryMask* mask = nullptr;
};

struct GridBuildOptions {
  InvalidDisparity invalid_d = InvalidDisparity::Zero;
  unsigned threads = 1;
};

namespace detail {

// Disparity used for lifting, or NaN for invalid pixels under the Zero policy.
inline std::vector<double> effective_row_disparity(const DisparityMap& dm, int y,
                                                   InvalidDisparity policy) {
  const int w = dm.width();
  std::vector<double> row(static_cast<std::size_t>(w), std::numeric_limits<double>::quiet_NaN());
  for (int x = 0; x < w; ++x) {
    if (dm.is_valid(x, y)) row[x] = dm.d(x, y);
  }
  if (policy == InvalidDisparity::NearestValid) {
    std::vector<double> filled = row;
    for (int x = 0; x < w; ++x) {
      if (!std::isnan(row[x])) continue;
      for (int r = 1; r < w; ++r) {
        if (x - r >= 0 && !std::isnan(row[x - r])) { filled[x] = row[x - r]; break; }
        if (x + r < w && !std::isnan(row[x + r])) { filled[x] = row[x + r]; break; }
        if (x - r < 0 && x + r >= w) break;
      }
    }
    row = std::move(filled);
  }
  return row;
}

inline BilateralCoord lift_pixel(const Yuv& c, int x, int y, double d, double t,
                                 const GridParams& params) {
  BilateralCoord b = lift({static_cast<double>(c.y), static_cast<double>(c.u),
                           static_cast<double>(c.v), static_cast<double>(x),
                           static_cast<double>(y), std::isnan(d) ? 0.0 : d, t},
                          params);
  if (std::isnan(d)) b[axis::D] = 0.0;
  return b;
}

// Visits every ROI pixel of one frame with its bilateral coordinate.
template <typename Fn>
inline void for_each_lifted_pixel(const Frame& frame, const DisparityMap& dm, double t,
                                  const RoiRect& roi, const GridParams& params,
                                  InvalidDisparity policy, Fn&& fn) {
  for (int y = roi.y0; y <= roi.y1; ++y) {
    const auto drow = effective_row_disparity(dm, y, policy);
    for (int x = roi.x0; x <= roi.x1; ++x) {
      fn(x, y, lift_pixel(frame.pixels(x, y), x, y, drow[x], t, params));
    }
  }
}

using PartialGrid = std::unordered_map<PackedKey, GridVertex>;

inline PartialGrid splat_frame(const Frame& frame, const DisparityMap& dm, double t,
                               const RoiRect& roi, const GridParams& params,
                               InvalidDisparity policy, const BinaryMask* mask,
                               bool affinities) {
  PartialGrid grid;
  grid.reserve(static_cast<std::size_t>(roi.width()) * roi.height() / 4 + 16);
  const double l_d = params.dims[axis::D];
  for_each_lifted_pixel(frame, dm, t, roi, params, policy,
                        [&](int x, int y, const BilateralCoord& b) {
    const double d_hat = b[axis::D] / l_d;
    const bool fg = mask && (*mask)(x, y);
    for_each_splat(b, params, [&](const VertexKey& k, double w) {
      GridVertex& v = grid[pack(k)];
      if (affinities) {
        v.s += w;
        v.a_fg += w * d_hat;
        v.a_bg += w * (1.0 - d_hat);
      }
      if (mask) {
        (fg ? v.m_fg : v.m_bg) += w;
      }
    });
  });
  return grid;
}

template <typename Fn>
inline void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace detail

// Splats every ROI pixel of `frames` into the sparse grid. Each pixel adds its
// splat weight w to S, w*d_hat to A_FG and w*(1-d_hat) to A_BG, where d_hat is
// the normalized disparity coordinate. With `masks`, in-window pixels also add
// w to M_FG or M_BG. A propagation frame contributes to M_FG/M_BG only, placed
// at the window's first time coordinate. Frames are splatted into private
// partial grids and merged in frame order, so the result does not depend on
// the thread count.
inline SparseGrid build_grid(std::span<const Frame> frames,
                             std::span<const DisparityMap> disparities, const RoiRect& roi,
                             const GridParams& params, const GridBuildOptions& opt = {},
                             std::span<const BinaryMask> masks = {},
                             const PropagationFrame* propagation = nullptr) {
  if (frames.size() != disparities.size() || (!masks.empty() && masks.size() != frames.size())) {
    throw Error(ErrorCode::CountMismatch, "build_grid inputs have different frame counts");
  }
  if (frames.empty() || roi.x1 < roi.x0 || roi.y1 < roi.y0) {
    throw Error(ErrorCode::EmptyRoi, "no pixels to splat");
  }
  const int w = frames.front().width(), h = frames.front().height();
  if (roi.x0 < 0 || roi.y0 < 0 || roi.x1 >= w || roi.y1 >= h) {
    throw Error(ErrorCode::EmptyRoi, "roi lies outside the image");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!frames[i].pixels.same_shape(w, h) || !disparities[i].d.same_shape(w, h) ||
        (!masks.empty() && !masks[i].same_shape(w, h))) {
      throw Error(ErrorCode::DimensionMismatch, "build_grid input sizes differ");
    }
  }
  const bool has_propagation = propagation && propagation->frame;
  if (has_propagation &&
      (!propagation->frame->pixels.same_shape(w, h) || !propagation->mask ||
       !propagation->mask->same_shape(w, h) || !propagation->disparity->d.same_shape(w, h))) {
    throw Error(ErrorCode::DimensionMismatch, "propagation frame does not match the window");
  }
  params.validate();

  const std::size_t jobs = frames.size() + (has_propagation ? 1 : 0);
  std::vector<detail::PartialGrid> partial(jobs);
  detail::parallel_for(jobs, opt.threads, [&](std::size_t job) {
    if (has_propagation && job == 0) {
      partial[0] = detail::splat_frame(*propagation->frame, *propagation->disparity,
                                       params.ranges[axis::T].min, roi, params, opt.invalid_d,
                                       propagation->mask, false);
      return;
    }
    const std::size_t i = job - (has_propagation ? 1 : 0);
    partial[job] = detail::splat_frame(frames[i], disparities[i], frames[i].t, roi, params,
                                       opt.invalid_d, masks.empty() ? nullptr : &masks[i], true);
  });

  detail::PartialGrid merged = std::move(partial.front());
  for (std::size_t j = 1; j < partial.size(); ++j) {
    for (const auto& [key, v] : partial[j]) merged[key] += v;
    detail::PartialGrid().swap(partial[j]);
  }
  std::vector<std::pair<PackedKey, GridVertex>> sorted;
  sorted.reserve(merged.size());
  for (const auto& [key, v] : merged) {
    if (v.s > 0.0) sorted.emplace_back(key, v);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t pixels = static_cast<std::size_t>(roi.width()) * roi.height() * frames.size();
  return SparseGrid(params, std::move(sorted), pixels, has_propagation || !masks.empty());
}

// Reads vertex labels back at pixel resolution: a ROI pixel is foreground when
// its splat-weighted label average reaches tau. Pixels outside the ROI are 0.
// `labels` is aligned with the grid's vertex order.
inline std::vector<BinaryMask> slice(const SparseGrid& grid, std::span<const std::uint8_t> labels,
                                     std::span<const Frame> frames,
                                     std::span<const DisparityMap> disparities,
                                     const RoiRect& roi, double tau = 0.5,
                                     InvalidDisparity policy = InvalidDisparity::Zero) {
  if (labels.size() != grid.size()) {
    throw Error(ErrorCode::CountMismatch, "labeling does not cover the grid");
  }
  std::vector<BinaryMask> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    BinaryMask mask(frames[i].width(), frames[i].height(), 0);
    detail::for_each_lifted_pixel(
        frames[i], disparities[i], frames[i].t, roi, grid.params(), policy,
        [&](int x, int y, const BilateralCoord& b) {
          double total = 0.0, fg = 0.0;
          for_each_splat(b, grid.params(), [&](const VertexKey& k, double w) {
            auto idx = grid.index_of(pack(k));
            if (!idx) return;
            total += w;
            if (labels[*idx]) fg += w;
          });
          mask(x, y) = total > 0.0 && fg / total >= tau;
        });
    out.push_back(std::move(mask));
  }
  return out;
}

// One line per occupied vertex: `kY kU kV kx ky kd kt S A_FG A_BG [M_FG M_BG]`.
inline void dump_grid(const SparseGrid& grid, std::ostream& os) {
  const auto old_precision = os.precision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = unpack(grid.key(i));
    const auto& v = grid.vertex(i);
    for (int a = 0; a < kGridDims; ++a) os << k[a] << ' ';
    os << v.s << ' ' << v.a_fg << ' ' << v.a_bg;
    if (grid.has_mask()) os << ' ' << v.m_fg << ' ' << v.m_bg;
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace stereocut
