#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "media_io.hpp"
#include "metrics.hpp"
#include "streaming.hpp"
#include "synth.hpp"

namespace stereocut {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitPipeline = 3 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownKey:
    case ErrorCode::BadValue:
    case ErrorCode::ShapeOutOfBounds:
      return kExitUsage;
    case ErrorCode::MissingFile:
    case ErrorCode::IoFailure:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::CountMismatch:
    case ErrorCode::DimensionMismatch:
      return kExitIo;
    default:
      return kExitPipeline;
  }
}

namespace detail {

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoFailure, "cannot create directory " + dir.string());
  }
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

template <typename Fn>
inline int run_reporting_errors(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
}

}  // namespace detail

// Writes masks (and optional overlays / per-window dumps) for one sequence.
inline int cmd_segment(const Config& cfg, std::ostream& err) {
  return detail::run_reporting_errors(err, [&] {
    err << "# resolved configuration\n" << echo_config(cfg);
    const StereoSequence seq = load_sequence(cfg.frames, cfg.disparity);

    WindowInspector inspect;
    if (!cfg.dump_dir.empty()) {
      detail::ensure_directory(cfg.dump_dir);
      inspect = [&](const SubsequenceWindow& w, const SparseGrid& grid, const EnergyGraph& g) {
        std::ofstream gs(fs::path(cfg.dump_dir) / ("grid_" + std::to_string(w.index) + ".txt"));
        dump_grid(grid, gs);
        std::ofstream es(fs::path(cfg.dump_dir) / ("graph_" + std::to_string(w.index) + ".txt"));
        dump_graph(g, es);
        if (!gs || !es) throw Error(ErrorCode::IoFailure, "cannot write dumps to " + cfg.dump_dir);
      };
    }
    const auto masks = segment_stream(seq, cfg.seg, &err, inspect);

    detail::ensure_directory(cfg.output);
    if (!cfg.overlay.empty()) detail::ensure_directory(cfg.overlay);
    for (std::size_t i = 0; i < masks.size(); ++i) {
      write_mask(masks[i], fs::path(cfg.output) / numbered_filename(i));
      if (!cfg.overlay.empty()) {
        write_overlay(seq.frames[i], masks[i], fs::path(cfg.overlay) / numbered_filename(i));
      }
    }
    return static_cast<int>(kExitOk);
  });
}

inline std::string format_report(const std::vector<FrameScore>& scores,
                                 const SequenceReport& r, int tol) {
  std::string out = "# stereocut evaluation report\n";
  char buf[128];
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.6f\n", key, v);
    out += buf;
  };
  out += "frames = " + std::to_string(scores.size()) + "\n";
  out += "boundary_tol = " + std::to_string(tol) + "\n";
  kv("j_mean", r.j_mean);
  kv("j_recall", r.j_recall);
  kv("j_decay", r.j_decay);
  kv("f_mean", r.f_mean);
  kv("f_recall", r.f_recall);
  kv("f_decay", r.f_decay);
  out += "# frame j f\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%06zu %.4f %.4f\n", i, scores[i].j, scores[i].f);
    out += buf;
  }
  return out;
}

inline int cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir, int tol, std::ostream& out,
                    std::ostream& err) {
  return detail::run_reporting_errors(err, [&] {
    const auto pred = load_masks(pred_dir);
    const auto gt = load_masks(gt_dir);
    const auto scores = score_sequence(pred, gt, tol);
    out << format_report(scores, aggregate(scores), tol);
    return static_cast<int>(kExitOk);
  });
}

// Layout: frames/, disparity/, gt/ with NNNNNN.png files, plus meta.txt.
inline void write_scene(const SynthScene& scene, const SceneSpec& spec, const fs::path& out) {
  for (const char* sub : {"frames", "disparity", "gt"}) detail::ensure_directory(out / sub);
  for (std::size_t i = 0; i < scene.rgb_frames.size(); ++i) {
    write_rgb(scene.rgb_frames[i], out / "frames" / numbered_filename(i));
    write_disparity(scene.sequence.disparities[i], out / "disparity" / numbered_filename(i));
    write_mask(scene.gt_masks[i], out / "gt" / numbered_filename(i));
  }
  detail::write_text(out / "meta.txt",
                     echo_scene_spec(spec) + "rng = " + std::string(kSynthRng) + "\n");
}

inline int cmd_synth(const SceneSpec& spec, const fs::path& out_dir, std::ostream& err) {
  return detail::run_reporting_errors(err, [&] {
    err << "# scene spec\n" << echo_scene_spec(spec) << "rng = " << kSynthRng << '\n';
    write_scene(generate_scene(spec), spec, out_dir);
    return static_cast<int>(kExitOk);
  });
}

}  // namespace stereocut
