#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bilateral_grid.hpp"
#include "disparity_prior.hpp"
#include "error.hpp"
#include "graph_cut.hpp"
#include "image.hpp"

namespace stereocut {

// Where the foreground interval comes from.
enum class PriorMode {
  Window,  // first frame of every window
  Frozen,  // first frame of the first window that yields one, reused afterwards
  Frame,   // every frame on its own (affects only the ROI)
};

struct SegmentationParams {
  std::size_t l = 10;
  std::array<int, kGridDims> grid_dims = GridParams::from_groups(7, 9, 13, 2, 2);
  GraphParams graph;
  double tau = 0.5;
  PriorOptions prior;
  int roi_margin = 0;
  PriorMode prior_mode = PriorMode::Window;
  InvalidDisparity invalid_d = InvalidDisparity::Zero;
  unsigned threads = 1;
};

struct SubsequenceWindow {
  std::size_t index = 1;  // 1-based
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::optional<std::size_t> overlap_frame;

  std::size_t size() const noexcept { return end - start; }
  friend bool operator==(const SubsequenceWindow&, const SubsequenceWindow&) = default;
};

struct StreamState {
  Frame prev_frame;
  DisparityMap prev_disparity;
  BinaryMask prev_mask;
};

// Called once per solved window, e.g. to dump the grid and graph.
using WindowInspector =
    std::function<void(const SubsequenceWindow&, const SparseGrid&, const EnergyGraph&)>;

struct WindowResult {
  std::vector<BinaryMask> masks;
  StreamState state;
  std::size_t vertices = 0;
  double energy = 0.0;
  std::size_t fg_pixels = 0;
  std::optional<DisparityInterval> interval;
  // Set when the window fell back to all-background.
  std::optional<std::string> warning;
};

inline std::vector<SubsequenceWindow> split_subsequences(std::size_t n_frames, std::size_t l) {
  if (n_frames == 0 || l == 0) {
    throw Error(ErrorCode::BadValue, "split_subsequences needs n_frames >= 1 and l >= 1");
  }
  std::vector<SubsequenceWindow> out;
  for (std::size_t start = 0, i = 1; start < n_frames; start += l, ++i) {
    SubsequenceWindow w{i, start, std::min(n_frames, start + l), std::nullopt};
    if (start > 0) w.overlap_frame = start - 1;
    out.push_back(w);
  }
  return out;
}

namespace detail {

inline RoiRect window_roi(std::span<const DisparityMap> disparities,
                          std::span<const DisparityInterval> intervals, int margin) {
  std::optional<RoiRect> roi;
  for (std::size_t i = 0; i < disparities.size(); ++i) {
    const auto mask = build_prior_mask(disparities[i], intervals[i]);
    if (count_foreground(mask) == 0) continue;
    const auto r = bounding_rect(mask, margin);
    roi = roi ? roi->united(r) : r;
  }
  if (!roi) throw Error(ErrorCode::EmptyMask, "prior mask is empty on every window frame");
  return *roi;
}

}  // namespace detail

// Segments one window. Without `state` the energy uses the disparity prior
// alone; with it, the previous window's last frame is splatted with its mask
// and the propagated energy is minimized. A missing prior yields all-background
// masks and a warning rather than an error.
inline WindowResult segment_window(const SubsequenceWindow& window, const StereoSequence& seq,
                                   const StreamState* state, const SegmentationParams& params,
                                   const std::optional<DisparityInterval>& frozen = std::nullopt,
                                   const WindowInspector& inspect = {}) {
  if (window.start >= window.end || window.end > seq.length()) {
    throw Error(ErrorCode::BadValue, "window outside the sequence");
  }
  const std::span<const Frame> frames(seq.frames.data() + window.start, window.size());
  const std::span<const DisparityMap> disps(seq.disparities.data() + window.start,
                                            window.size());
  const int w = seq.width(), h = seq.height();

  WindowResult result;
  auto fallback = [&](const Error& e) {
    result.masks.assign(window.size(), BinaryMask(w, h, 0));
    result.warning = "window " + std::to_string(window.index) +
                     " emits all-background masks: " + e.what();
  };

  try {
    std::vector<DisparityInterval> intervals;
    if (params.prior_mode == PriorMode::Frame) {
      for (const auto& dm : disps) intervals.push_back(compute_prior_interval(dm, params.prior));
    } else {
      const auto iv = params.prior_mode == PriorMode::Frozen && frozen
                          ? *frozen
                          : compute_prior_interval(disps.front(), params.prior);
      intervals.assign(disps.size(), iv);
    }
    result.interval = intervals.front();
    const RoiRect roi = detail::window_roi(disps, intervals, params.roi_margin);
    const GridParams gp = make_grid_params(params.grid_dims, frames, disps, roi);
    const GridBuildOptions opt{params.invalid_d, params.threads};

    std::optional<PropagationFrame> propagation;
    if (state) propagation = PropagationFrame{&state->prev_frame, &state->prev_disparity,
                                              &state->prev_mask};
    const SparseGrid grid =
        build_grid(frames, disps, roi, gp, opt, {}, propagation ? &*propagation : nullptr);
    const EnergyGraph graph = build_graph(
        grid, params.graph, state ? EnergyMode::Propagated : EnergyMode::FirstWindow);
    const Labeling labels = min_cut(graph);
    if (inspect) inspect(window, grid, graph);
    result.vertices = grid.size();
    result.energy = energy(graph, labels).total;
    result.masks = slice(grid, labels, frames, disps, roi, params.tau, params.invalid_d);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::NoValidDisparity:
      case ErrorCode::NoForegroundPeak:
      case ErrorCode::EmptyMask:
        fallback(e);
        break;
      default:
        throw;
    }
  }

  for (const auto& m : result.masks) result.fg_pixels += count_foreground(m);
  result.state = {frames.back(), disps.back(), result.masks.back()};
  return result;
}

// `window=<i> frames=<a>..<b> vertices=<n> energy=<E> fg_pixels=<k>`
inline void report_window(std::ostream& os, const SubsequenceWindow& window,
                          const WindowResult& r) {
  if (r.warning) os << "warning: " << *r.warning << '\n';
  os << "window=" << window.index << " frames=" << window.start << ".." << window.end - 1
     << " vertices=" << r.vertices << " energy=" << r.energy << " fg_pixels=" << r.fg_pixels
     << '\n';
}

// Folds segment_window over the windows in order; one mask per input frame.
inline std::vector<BinaryMask> segment_stream(const StereoSequence& seq,
                                              const SegmentationParams& params,
                                              std::ostream* progress = nullptr,
                                              const WindowInspector& inspect = {}) {
  if (seq.length() == 0) throw Error(ErrorCode::EmptyInput, "empty sequence");
  seq.validate();
  std::vector<BinaryMask> out;
  out.reserve(seq.length());
  std::optional<StreamState> state;
  std::optional<DisparityInterval> frozen;
  for (const auto& window : split_subsequences(seq.length(), params.l)) {
    WindowResult r = segment_window(window, seq, state ? &*state : nullptr, params, frozen, inspect);
    if (progress) report_window(*progress, window, r);
    if (!frozen && r.interval && !r.warning) frozen = r.interval;
    for (auto& m : r.masks) out.push_back(std::move(m));
    state = std::move(r.state);
  }
  return out;
}

}  // namespace stereocut
