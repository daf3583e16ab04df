#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "color.hpp"
#include "error.hpp"
#include "graph_cut.hpp"
#include "image.hpp"
#include "media_io.hpp"

namespace stereocut {

enum class ShapeKind { Ellipse, Rectangle };

// Synthetic stereo scene: one moving shape in front of a flat background.
// Radii are half-extents; the centre moves by (velocity_x, velocity_y) per frame.
struct SceneSpec {
  int width = 160;
  int height = 120;
  int n_frames = 20;
  ShapeKind shape = ShapeKind::Ellipse;
  double center_x = 45.0;
  double center_y = 50.0;
  double radius_x = 30.0;
  double radius_y = 24.0;
  double velocity_x = 2.5;
  double velocity_y = 0.75;
  double fg_disparity = 40.0;
  double fg_jitter = 2.0;
  double bg_disparity = 5.0;
  double bg_jitter = 2.0;
  Rgb fg_color{200, 60, 50};
  Rgb bg_color{60, 110, 180};
  int fg_noise = 10;
  int bg_noise = 10;
  double invalid_fraction = 0.05;
  std::uint64_t seed = 7;
};

inline constexpr const char* kSynthRng = "mt19937_64";

struct SynthScene {
  StereoSequence sequence;
  std::vector<RgbImage> rgb_frames;
  std::vector<BinaryMask> gt_masks;
};

namespace detail {

inline bool inside_shape(const SceneSpec& s, double cx, double cy, int x, int y) {
  const double dx = (x - cx) / s.radius_x;
  const double dy = (y - cy) / s.radius_y;
  if (s.shape == ShapeKind::Ellipse) return dx * dx + dy * dy <= 1.0;
  return std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
}

// Pixels with a differently labeled pixel within Chebyshev distance `radius`.
inline BinaryMask near_boundary(const BinaryMask& gt, int radius) {
  BinaryMask out(gt.width(), gt.height(), 0);
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      bool mixed = false;
      for (int dy = -radius; dy <= radius && !mixed; ++dy) {
        for (int dx = -radius; dx <= radius && !mixed; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= gt.width() || yy >= gt.height()) continue;
          mixed = gt(xx, yy) != gt(x, y);
        }
      }
      out(x, y) = mixed;
    }
  }
  return out;
}

class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, 1) from the top 53 bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  int offset(int amplitude) {
    const std::uint64_t r = engine_();
    return amplitude <= 0 ? 0
                          : static_cast<int>(r % static_cast<std::uint64_t>(2 * amplitude + 1)) -
                                amplitude;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint8_t add_clamped(std::uint8_t c, int delta) {
  return static_cast<std::uint8_t>(std::clamp(static_cast<int>(c) + delta, 0, 255));
}

}  // namespace detail

inline void validate(const SceneSpec& s) {
  if (s.width <= 0 || s.height <= 0 || s.n_frames <= 0) {
    throw Error(ErrorCode::BadValue, "scene width, height and n_frames must be positive");
  }
  if (!(s.radius_x > 0 && s.radius_y > 0)) {
    throw Error(ErrorCode::BadValue, "shape radii must be positive");
  }
  if (!(s.fg_disparity > s.bg_disparity) || s.bg_disparity - s.bg_jitter < 0 ||
      s.fg_jitter < 0 || s.bg_jitter < 0) {
    throw Error(ErrorCode::BadValue,
                "need fg_disparity > bg_disparity, non-negative jitter and disparities");
  }
  if (!(s.invalid_fraction >= 0.0 && s.invalid_fraction <= 1.0)) {
    throw Error(ErrorCode::BadValue, "invalid_fraction must lie in [0, 1]");
  }
  if (s.fg_noise < 0 || s.bg_noise < 0) throw Error(ErrorCode::BadValue, "noise must be >= 0");
  for (int t = 0; t < s.n_frames; ++t) {
    const double cx = s.center_x + s.velocity_x * t;
    const double cy = s.center_y + s.velocity_y * t;
    if (cx - s.radius_x < 0 || cy - s.radius_y < 0 || cx + s.radius_x > s.width - 1 ||
        cy + s.radius_y > s.height - 1) {
      throw Error(ErrorCode::ShapeOutOfBounds,
                  "shape leaves the image at frame " + std::to_string(t));
    }
  }
}

// Deterministic for a given spec. Disparities are quantized to the 1/16 pixel
// file precision so a scene reloaded from disk equals the in-memory one.
inline SynthScene generate_scene(const SceneSpec& s) {
  validate(s);
  detail::SceneRng rng(s.seed);
  SynthScene scene;
  for (int t = 0; t < s.n_frames; ++t) {
    const double cx = s.center_x + s.velocity_x * t;
    const double cy = s.center_y + s.velocity_y * t;
    BinaryMask gt(s.width, s.height, 0);
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) gt(x, y) = detail::inside_shape(s, cx, cy, x, y);
    }
    const BinaryMask protected_band = detail::near_boundary(gt, 2);

    RgbImage rgb(s.width, s.height);
    DisparityMap dm(s.width, s.height);
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) {
        const bool fg = gt(x, y);
        const Rgb base = fg ? s.fg_color : s.bg_color;
        const int noise = fg ? s.fg_noise : s.bg_noise;
        const int dr = rng.offset(noise), dg = rng.offset(noise), db = rng.offset(noise);
        rgb(x, y) = {detail::add_clamped(base.r, dr), detail::add_clamped(base.g, dg),
                     detail::add_clamped(base.b, db)};
        const double mean = fg ? s.fg_disparity : s.bg_disparity;
        const double jitter = fg ? s.fg_jitter : s.bg_jitter;
        const double d = mean + jitter * (2.0 * rng.unit() - 1.0);
        const double raw = std::max(1.0, std::floor(d * kDisparityScale + 0.5));
        dm.d(x, y) = raw / kDisparityScale;
        const bool invalid = rng.unit() < s.invalid_fraction && !protected_band(x, y);
        dm.valid(x, y) = !invalid;
        if (invalid) dm.d(x, y) = 0.0;
      }
    }
    scene.sequence.frames.push_back(to_frame(rgb, t));
    scene.sequence.disparities.push_back(std::move(dm));
    scene.rgb_frames.push_back(std::move(rgb));
    scene.gt_masks.push_back(std::move(gt));
  }
  return scene;
}

// Exhaustive minimizer used as an oracle for min_cut. Returns the first
// labeling of minimal energy when labelings are enumerated in lexicographic
// order of the node sequence.
inline std::pair<Labeling, double> brute_force_mincut(const EnergyGraph& g) {
  constexpr std::size_t kMaxNodes = 20;
  if (g.size() > kMaxNodes) {
    throw Error(ErrorCode::TooLarge, std::to_string(g.size()) + " nodes exceeds " +
                                         std::to_string(kMaxNodes));
  }
  const std::size_t n = g.size();
  Labeling best(n, 0), labels(n, 0);
  double best_energy = std::numeric_limits<double>::infinity();
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    for (std::size_t i = 0; i < n; ++i) labels[i] = (bits >> (n - 1 - i)) & 1u;
    const double e = energy(g, labels).total;
    if (e < best_energy) {
      best_energy = e;
      best = labels;
    }
  }
  return {best, best_energy};
}

}  // namespace stereocut
