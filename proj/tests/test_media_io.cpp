#include <gtest/gtest.h>

#include <random>

#include <opencv2/imgcodecs.hpp>

#include "stereocut/media_io.hpp"
#include "test_util.hpp"

using namespace stereocut;
using stereocut::testing::TempDir;

TEST(RgbToYuv, Black) { EXPECT_EQ(rgb_to_yuv(0, 0, 0), (Yuv{0, 128, 128})); }

TEST(RgbToYuv, White) { EXPECT_EQ(rgb_to_yuv(255, 255, 255), (Yuv{255, 128, 128})); }

TEST(RgbToYuv, PureRedRoundsAndClamps) { EXPECT_EQ(rgb_to_yuv(255, 0, 0), (Yuv{76, 85, 255})); }

TEST(RgbToYuv, InverseWithinQuantization) {
  // Every 5th level per channel covers the cube corners and interior.
  for (int r = 0; r <= 255; r += 5) {
    for (int g = 0; g <= 255; g += 5) {
      for (int b = 0; b <= 255; b += 5) {
        const Rgb back = yuv_to_rgb(rgb_to_yuv(r, g, b));
        ASSERT_LE(std::abs(back.r - r), 2) << r << "," << g << "," << b;
        ASSERT_LE(std::abs(back.g - g), 2) << r << "," << g << "," << b;
        ASSERT_LE(std::abs(back.b - b), 2) << r << "," << g << "," << b;
      }
    }
  }
}

TEST(DecodeDisparity, FixedPointAndSentinel) {
  Image<std::uint16_t> raw(3, 1);
  raw(0, 0) = 160;
  raw(1, 0) = 0;
  raw(2, 0) = 65535;
  const auto dm = decode_disparity(raw);
  EXPECT_TRUE(dm.is_valid(0, 0));
  EXPECT_DOUBLE_EQ(dm.d(0, 0), 10.0);
  EXPECT_FALSE(dm.is_valid(1, 0));
  EXPECT_TRUE(dm.is_valid(2, 0));
  EXPECT_DOUBLE_EQ(dm.d(2, 0), 4095.9375);
}

TEST(DecodeDisparity, Monotone) {
  Image<std::uint16_t> raw(65535, 1);
  for (int i = 0; i < raw.width(); ++i) raw(i, 0) = static_cast<std::uint16_t>(i + 1);
  const auto dm = decode_disparity(raw);
  for (int i = 1; i < raw.width(); ++i) ASSERT_LT(dm.d(i - 1, 0), dm.d(i, 0));
}

TEST(DecodeDisparity, RejectsEightBitAndColor) {
  cv::Mat gray8(4, 4, CV_8UC1, cv::Scalar(3));
  cv::Mat color16(4, 4, CV_16UC3, cv::Scalar(3, 3, 3));
  try {
    decode_disparity(gray8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedFormat);
  }
  try {
    decode_disparity(color16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedFormat);
  }
}

TEST(WriteMask, ConstantMasksWriteZeroOr255) {
  TempDir dir("mask");
  write_mask(BinaryMask(5, 4, 0), dir / "zero.png");
  write_mask(BinaryMask(5, 4, 1), dir / "one.png");
  const cv::Mat zero = cv::imread((dir / "zero.png").string(), cv::IMREAD_UNCHANGED);
  const cv::Mat one = cv::imread((dir / "one.png").string(), cv::IMREAD_UNCHANGED);
  ASSERT_EQ(zero.type(), CV_8UC1);
  EXPECT_EQ(cv::countNonZero(zero), 0);
  EXPECT_EQ(cv::countNonZero(one != 255), 0);
}

TEST(WriteMask, RoundTripIsIdentity) {
  TempDir dir("mask_rt");
  std::mt19937 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    BinaryMask m(17 + trial, 9 + 2 * trial);
    for (auto& v : m.pixels()) v = rng() & 1u;
    write_mask(m, dir / "m.png");
    EXPECT_EQ(read_mask(dir / "m.png"), m);
  }
}

TEST(WriteMask, FailsOnUnwritablePath) {
  try {
    write_mask(BinaryMask(2, 2, 1), "/nonexistent_dir_for_stereocut/m.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoFailure);
  }
}

TEST(Disparity, WriteReadRoundTrip) {
  TempDir dir("disp");
  DisparityMap dm(6, 3);
  for (int i = 0; i < 18; ++i) {
    dm.d.pixels()[i] = i * 2.0625;
    dm.valid.pixels()[i] = i % 4 != 0;
  }
  for (int i = 0; i < 18; ++i) {
    if (!dm.valid.pixels()[i]) dm.d.pixels()[i] = 0.0;
  }
  write_disparity(dm, dir / "d.png");
  EXPECT_EQ(read_disparity(dir / "d.png"), dm);
}

TEST(Overlay, TintsForegroundOnly) {
  Frame f{Image<Yuv>(2, 1, rgb_to_yuv(0, 0, 0)), 0};
  BinaryMask m(2, 1, 0);
  m(1, 0) = 1;
  const auto out = make_overlay(f, m);
  EXPECT_EQ(out(0, 0), (Rgb{0, 0, 0}));
  EXPECT_EQ(out(1, 0), (Rgb{128, 0, 0}));
  EXPECT_THROW(make_overlay(f, BinaryMask(3, 1, 0)), Error);
}

namespace {
void write_fixture(const TempDir& dir, int n_frames, int n_disp, int skip = -1,
                   int odd_size_index = -1) {
  std::filesystem::create_directories(dir / "frames");
  std::filesystem::create_directories(dir / "disparity");
  for (int i = 0; i < n_frames; ++i) {
    if (i == skip) continue;
    const int w = i == odd_size_index ? 9 : 8;
    write_rgb(RgbImage(w, 6, Rgb{10, 20, 30}), dir / "frames" / numbered_filename(i));
  }
  for (int i = 0; i < n_disp; ++i) {
    write_disparity(stereocut::testing::constant_disparity(8, 6, 3.5),
                    dir / "disparity" / numbered_filename(i));
  }
}
}  // namespace

TEST(LoadSequence, CountContract) {
  TempDir dir("seq");
  write_fixture(dir, 10, 10);
  const auto seq = load_sequence(dir / "frames", dir / "disparity");
  ASSERT_EQ(seq.length(), 10u);
  EXPECT_EQ(seq.frames[7].t, 7);
  EXPECT_EQ(seq.frames[0].pixels(0, 0), rgb_to_yuv(10, 20, 30));
  EXPECT_DOUBLE_EQ(seq.disparities[3].d(2, 2), 3.5);
}

TEST(LoadSequence, CountMismatch) {
  TempDir dir("seq_count");
  write_fixture(dir, 10, 9);
  try {
    load_sequence(dir / "frames", dir / "disparity");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CountMismatch);
  }
}

TEST(LoadSequence, GapNamesMissingIndex) {
  TempDir dir("seq_gap");
  write_fixture(dir, 10, 10, 3);
  try {
    list_numbered_files(dir / "frames");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingFile);
    EXPECT_NE(std::string(e.what()).find("index 3"), std::string::npos) << e.what();
  }
}

TEST(LoadSequence, DimensionMismatch) {
  TempDir dir("seq_dim");
  write_fixture(dir, 4, 4, -1, 2);
  try {
    load_sequence(dir / "frames", dir / "disparity");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(LoadSequence, MissingDirectoryNamesPath) {
  TempDir dir("seq_missing");
  write_fixture(dir, 2, 0);
  try {
    load_sequence(dir / "frames", dir / "nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingFile);
    EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
  }
}
