#include <gtest/gtest.h>

#include <sstream>

#include "stereocut/metrics.hpp"
#include "stereocut/streaming.hpp"
#include "stereocut/synth.hpp"

using namespace stereocut;

namespace {

const SynthScene& default_scene() {
  static const SynthScene scene = generate_scene(SceneSpec{});
  return scene;
}

double mean_j(const std::vector<BinaryMask>& pred, const std::vector<BinaryMask>& gt) {
  return aggregate(score_sequence(pred, gt)).j_mean;
}

}  // namespace

TEST(SplitSubsequences, Examples) {
  using W = SubsequenceWindow;
  EXPECT_EQ(split_subsequences(25, 10),
            (std::vector<W>{{1, 0, 10, std::nullopt}, {2, 10, 20, 9}, {3, 20, 25, 19}}));
  EXPECT_EQ(split_subsequences(7, 10), (std::vector<W>{{1, 0, 7, std::nullopt}}));
  EXPECT_EQ(split_subsequences(7, 3),
            (std::vector<W>{{1, 0, 3, std::nullopt}, {2, 3, 6, 2}, {3, 6, 7, 5}}));
  EXPECT_THROW(split_subsequences(0, 3), Error);
  EXPECT_THROW(split_subsequences(5, 0), Error);
}

TEST(SplitSubsequences, PartitionProperty) {
  for (std::size_t n = 1; n <= 40; ++n) {
    for (std::size_t l = 1; l <= 12; ++l) {
      const auto ws = split_subsequences(n, l);
      std::size_t next = 0;
      for (const auto& w : ws) {
        ASSERT_EQ(w.start, next);
        ASSERT_LE(w.size(), l);
        ASSERT_GE(w.size(), 1u);
        if (w.start > 0) {
          ASSERT_EQ(w.overlap_frame, w.start - 1);
        }
        next = w.end;
      }
      ASSERT_EQ(next, n);
    }
  }
}

TEST(SegmentStream, MaskCountEqualsFrameCount) {
  const auto& scene = default_scene();
  for (std::size_t l : {1u, 3u, 10u, 20u, 25u}) {
    SegmentationParams p;
    p.l = l;
    const auto masks = segment_stream(scene.sequence, p);
    ASSERT_EQ(masks.size(), scene.sequence.length()) << "l = " << l;
    for (const auto& m : masks) ASSERT_TRUE(m.same_shape(160, 120));
  }
}

TEST(SegmentStream, SingleFrameSequence) {
  StereoSequence one;
  one.frames.push_back(default_scene().sequence.frames[0]);
  one.disparities.push_back(default_scene().sequence.disparities[0]);
  EXPECT_EQ(segment_stream(one, SegmentationParams{}).size(), 1u);
}

TEST(SegmentStream, SingleWindowMatchesDirectRun) {
  const auto& scene = default_scene();
  SegmentationParams p;
  p.l = 20;
  const auto streamed = segment_stream(scene.sequence, p);
  const auto direct = segment_window({1, 0, 20, std::nullopt}, scene.sequence, nullptr, p).masks;
  EXPECT_EQ(streamed, direct);
}

TEST(SegmentStream, ZeroPropagationWeightMakesWindowsIndependent) {
  const auto& scene = default_scene();
  SegmentationParams p;
  p.l = 3;
  p.graph.lambda_i = 0.0;
  p.graph.lambda_d = 0.7;
  const auto streamed = segment_stream(scene.sequence, p);

  SegmentationParams independent = p;
  independent.graph.lambda = p.graph.lambda_d;
  std::vector<BinaryMask> expected;
  for (const auto& w : split_subsequences(scene.sequence.length(), p.l)) {
    for (auto& m : segment_window(w, scene.sequence, nullptr, independent).masks) {
      expected.push_back(std::move(m));
    }
  }
  ASSERT_EQ(streamed.size(), expected.size());
  for (std::size_t i = 0; i < streamed.size(); ++i) EXPECT_EQ(streamed[i], expected[i]) << i;
}

TEST(SegmentStream, WindowLengthBarelyChangesQuality) {
  const auto& scene = default_scene();
  SegmentationParams p10, p20;
  p10.l = 10;
  p20.l = 20;
  const double j10 = mean_j(segment_stream(scene.sequence, p10), scene.gt_masks);
  const double j20 = mean_j(segment_stream(scene.sequence, p20), scene.gt_masks);
  EXPECT_LT(std::abs(j10 - j20), 0.1);
}

TEST(SegmentStream, StaticSceneIsStableAcrossWindows) {
  SceneSpec s;
  s.velocity_x = s.velocity_y = 0;
  const auto scene = generate_scene(s);
  SegmentationParams p;
  p.l = 5;
  const auto masks = segment_stream(scene.sequence, p);
  const auto scores = score_sequence(masks, scene.gt_masks);
  for (std::size_t i = 5; i < scores.size(); i += 5) {
    EXPECT_LT(std::abs(scores[i].j - scores[i - 1].j), 0.05) << "window boundary at " << i;
  }
}

TEST(SegmentStream, DeterministicAcrossThreadCounts) {
  const auto& scene = default_scene();
  SegmentationParams p;
  p.l = 7;
  const auto reference = segment_stream(scene.sequence, p);
  for (unsigned threads : {2u, 4u}) {
    p.threads = threads;
    EXPECT_EQ(segment_stream(scene.sequence, p), reference) << threads;
  }
}

TEST(SegmentStream, MissingPriorFallsBackToBackground) {
  const auto& scene = default_scene();
  StereoSequence seq = scene.sequence;
  seq.frames.resize(6);
  seq.disparities.resize(6);
  for (int i = 3; i < 6; ++i) {
    for (auto& v : seq.disparities[i].valid.pixels()) v = 0;
    for (auto& d : seq.disparities[i].d.pixels()) d = 0.0;
  }
  SegmentationParams p;
  p.l = 3;
  std::ostringstream progress;
  const auto masks = segment_stream(seq, p, &progress);
  ASSERT_EQ(masks.size(), 6u);
  EXPECT_GT(count_foreground(masks[0]), 0u);
  for (int i = 3; i < 6; ++i) EXPECT_EQ(count_foreground(masks[i]), 0u);
  EXPECT_NE(progress.str().find("warning: window 2 emits all-background masks"),
            std::string::npos)
      << progress.str();
}

TEST(SegmentStream, ProgressLinesPerWindow) {
  const auto& scene = default_scene();
  SegmentationParams p;
  p.l = 8;
  std::ostringstream progress;
  segment_stream(scene.sequence, p, &progress);
  std::istringstream lines(progress.str());
  std::string line;
  std::vector<std::string> got;
  while (std::getline(lines, line)) got.push_back(line);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].rfind("window=1 frames=0..7 vertices=", 0), 0u) << got[0];
  EXPECT_EQ(got[2].rfind("window=3 frames=16..19 vertices=", 0), 0u) << got[2];
  EXPECT_NE(got[1].find(" energy="), std::string::npos);
  EXPECT_NE(got[1].find(" fg_pixels="), std::string::npos);
}

TEST(SegmentStream, PriorModesAllSegmentTheScene) {
  const auto& scene = default_scene();
  for (auto mode : {PriorMode::Window, PriorMode::Frozen, PriorMode::Frame}) {
    SegmentationParams p;
    p.prior_mode = mode;
    EXPECT_GT(mean_j(segment_stream(scene.sequence, p), scene.gt_masks), 0.9);
  }
}

TEST(SegmentStream, InspectorSeesEveryWindow) {
  const auto& scene = default_scene();
  SegmentationParams p;
  p.l = 6;
  std::vector<std::size_t> seen;
  segment_stream(scene.sequence, p, nullptr,
                 [&](const SubsequenceWindow& w, const SparseGrid& grid, const EnergyGraph& g) {
                   EXPECT_EQ(grid.size(), g.size());
                   EXPECT_EQ(grid.has_mask(), w.index > 1);
                   seen.push_back(w.index);
                 });
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3, 4}));
}
