#include "vvfc/fbc.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_util.h"
#include "vvfc/errors.h"
#include "vvfc/metrics.h"

namespace vvfc {
namespace {

using testing::random_image;
using testing::smooth_image;

FbcParams params_s(int s, int iterations = 10) {
  FbcParams p;
  p.small_size = s;
  p.decode_iterations = iterations;
  return p;
}

// The s x s block at (row, col) as reals.
std::vector<double> block_at(const PixelImage& img, int row, int col, int size) {
  std::vector<double> out;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) out.push_back(img.at(row + r, col + c));
  }
  return out;
}

// 2x2 means of the 2s x 2s block at (row, col).
std::vector<double> shrunk_large_at(const PixelImage& img, int row, int col, int s) {
  std::vector<double> out;
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) {
      out.push_back((img.at(row + 2 * r, col + 2 * c) + img.at(row + 2 * r, col + 2 * c + 1) +
                     img.at(row + 2 * r + 1, col + 2 * c) + img.at(row + 2 * r + 1, col + 2 * c + 1)) /
                    4.0);
    }
  }
  return out;
}

double direct_error(const std::vector<double>& sb, const std::vector<double>& l, double a, double b) {
  double e = 0.0;
  for (std::size_t i = 0; i < sb.size(); ++i) {
    const double d = sb[i] - (a * l[i] + b);
    e += d * d;
  }
  return e;
}

TEST(QuantizerTest, AlphaGrid) {
  EXPECT_EQ(dequantize_alpha(7), 0.0);
  EXPECT_DOUBLE_EQ(dequantize_alpha(0), -7.0 / 9.0);
  EXPECT_DOUBLE_EQ(dequantize_alpha(15), 8.0 / 9.0);
  EXPECT_EQ(quantize_alpha(0.0), 7);
  EXPECT_EQ(quantize_alpha(1.0), 15);
  EXPECT_EQ(quantize_alpha(-5.0), 0);
  EXPECT_EQ(quantize_alpha(0.5 / 9.0), 7);  // halfway: lower level wins
  EXPECT_EQ(quantize_alpha(0.6 / 9.0), 8);
  for (int q = 0; q < kFbcAlphaLevels; ++q) EXPECT_EQ(quantize_alpha(dequantize_alpha(q)), q);
  EXPECT_EQ(dequantize_beta(0), -255.0);
  EXPECT_EQ(dequantize_beta(510), 255.0);
}

TEST(GeometryTest, RejectsBadBlockSizes) {
  EXPECT_THROW(check_fbc_geometry(9, 7), InvalidArgument);
  EXPECT_THROW(check_fbc_geometry(9, 1), InvalidArgument);
  EXPECT_THROW(check_fbc_geometry(9, 512), InvalidArgument);
  EXPECT_THROW(check_fbc_geometry(4, 16), InvalidArgument);
  EXPECT_NO_THROW(check_fbc_geometry(4, 8));
  EXPECT_THROW(fbc_encode(PixelImage(5), params_s(3)), InvalidArgument);
}

TEST(PayloadTest, FullImageSizes) {
  FbcCode s16;
  s16.depth = 9;
  s16.small_size = 16;
  s16.entries.resize(s16.small_count());
  EXPECT_EQ(s16.small_count(), 1024u);
  EXPECT_EQ(s16.large_count(), 256u);
  EXPECT_EQ(fbc_payload_bytes(s16), 2688u);

  FbcCode s8;
  s8.depth = 9;
  s8.small_size = 8;
  s8.entries.resize(s8.small_count());
  EXPECT_EQ(s8.small_count(), 4096u);
  EXPECT_EQ(s8.large_count(), 1024u);
  EXPECT_EQ(fbc_payload_bytes(s8), 11776u);
}

TEST(PayloadTest, SingleLargeBlockNeedsNoIndexBits) {
  const FbcCode code = fbc_encode(random_image(2, 1), params_s(2));
  EXPECT_EQ(code.large_count(), 1u);
  EXPECT_EQ(code.entries.size(), 4u);
  EXPECT_EQ(fbc_payload_bits(code), 4u * 13u);
  EXPECT_EQ(fbc_serialize(code).size(), kFbcHeaderSize + 7);
}

TEST(FitTest, ConstantSmallBlock) {
  const std::vector<double> sb(16, 100.0);
  const FbcFit fit = fbc_fit(sb, block_at(random_image(2, 4), 0, 0, 4));
  EXPECT_EQ(fit.q_alpha, 7);
  EXPECT_EQ(dequantize_beta(fit.q_beta), 100.0);
  EXPECT_EQ(fit.error, 0.0);
}

TEST(FitTest, FlatLargeBlockGivesZeroAlpha) {
  std::vector<double> sb = {1, 2, 3, 4};
  const FbcFit fit = fbc_fit(sb, std::vector<double>(4, 50.0));
  EXPECT_EQ(fit.q_alpha, 7);
  EXPECT_EQ(dequantize_beta(fit.q_beta), 3.0);  // round(2.5) away from zero
  EXPECT_DOUBLE_EQ(fit.error, direct_error(sb, std::vector<double>(4, 50.0), 0.0, 3.0));
}

TEST(FitTest, ErrorMatchesDirectResidual) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> sb(16), l(16);
    for (auto& x : sb) x = rng() % 256;
    const double scale = (static_cast<int>(rng() % 21) - 10) / 9.0;
    for (std::size_t i = 0; i < 16; ++i) l[i] = std::clamp(scale * sb[i] + (rng() % 40), 0.0, 255.0);
    if (trial % 3 == 0) for (auto& x : l) x = rng() % 256;
    const FbcFit fit = fbc_fit(sb, l);
    ASSERT_NEAR(fit.error, direct_error(sb, l, dequantize_alpha(fit.q_alpha), dequantize_beta(fit.q_beta)), 1e-6);
  }
}

TEST(EncodeTest, ConstantImageIsExactAfterOneIteration) {
  const PixelImage img(6, 77);
  const FbcCode code = fbc_encode(img, params_s(8));
  for (const auto& e : code.entries) {
    EXPECT_EQ(e.q_alpha, 7);
    EXPECT_EQ(dequantize_beta(e.q_beta), 77.0);
  }
  for (std::uint8_t init : {0, 128, 255}) EXPECT_EQ(fbc_decode(code, params_s(8, 1), init), img);
}

TEST(DecodeTest, ZeroAlphaCodeGivesBetaTilingAfterOnePass) {
  FbcCode code;
  code.depth = 4;
  code.small_size = 4;
  std::mt19937 rng(8);
  for (std::size_t i = 0; i < code.small_count(); ++i) {
    code.entries.push_back({static_cast<std::uint32_t>(rng() % code.large_count()), 7,
                            static_cast<std::uint16_t>(rng() % 511)});
  }
  PixelImage expected(4);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      const double beta = dequantize_beta(code.entries[static_cast<std::size_t>((r / 4) * 4 + c / 4)].q_beta);
      expected.set(r, c, static_cast<std::uint8_t>(std::clamp(beta, 0.0, 255.0)));
    }
  }
  for (std::uint32_t seed = 0; seed < 3; ++seed) {
    EXPECT_EQ(fbc_decode(code, params_s(4, 1), random_image(4, seed)), expected);
  }
}

TEST(EncodeTest, ChoosesOptimalLargeBlockExhaustively) {
  for (std::uint32_t seed = 0; seed < 4; ++seed) {
    const int s = seed % 2 ? 2 : 4;
    const PixelImage img = seed < 2 ? random_image(5, seed) : smooth_image(5, seed);
    const FbcCode code = fbc_encode(img, params_s(s));
    const int side = img.side();
    const int per_row_small = side / s;
    const int per_row_large = side / (2 * s);
    for (std::size_t idx = 0; idx < code.entries.size(); ++idx) {
      const int row = static_cast<int>(idx) / per_row_small * s;
      const int col = static_cast<int>(idx) % per_row_small * s;
      const auto sb = block_at(img, row, col, s);
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_index = 0;
      for (std::size_t li = 0; li < code.large_count(); ++li) {
        const auto l = shrunk_large_at(img, static_cast<int>(li) / per_row_large * 2 * s,
                                       static_cast<int>(li) % per_row_large * 2 * s, s);
        const FbcFit fit = fbc_fit(sb, l);
        const double e = direct_error(sb, l, dequantize_alpha(fit.q_alpha), dequantize_beta(fit.q_beta));
        if (e < best - 1e-6) {
          best = e;
          best_index = li;
        }
      }
      const FbcEntry& chosen = code.entries[idx];
      const auto l = shrunk_large_at(img, static_cast<int>(chosen.large_index) / per_row_large * 2 * s,
                                     static_cast<int>(chosen.large_index) % per_row_large * 2 * s, s);
      const double chosen_error =
          direct_error(sb, l, dequantize_alpha(chosen.q_alpha), dequantize_beta(chosen.q_beta));
      ASSERT_LE(chosen_error, best + 1e-6) << "small block " << idx;
      // Ties (within rounding) resolve to the lowest index.
      ASSERT_LE(chosen.large_index, best_index) << "small block " << idx;
    }
  }
}

TEST(EncodeTest, SelfSimilarBlockIsMatchedWithinQuantizationBound) {
  // Copy the shrunk top-left large block into the bottom-right small block.
  PixelImage img = smooth_image(5, 21);
  const int s = 4;
  const auto l0 = shrunk_large_at(img, 0, 0, s);
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) img.set(28 + r, 28 + c, round_to_gray(l0[static_cast<std::size_t>(r) * s + c]));
  }
  const auto l = shrunk_large_at(img, 0, 0, s);
  const auto sb = block_at(img, 28, 28, s);
  // With alpha = 8/9 the residual at the best real beta is
  // (L - mean L) / 9 plus a copy-rounding term in [-1, 1]; rounding beta adds
  // at most n / 4.
  double mean_l = 0.0;
  for (double x : l) mean_l += x;
  mean_l /= static_cast<double>(l.size());
  double bound = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double d = std::abs(l[i] - mean_l) / 9.0 + 1.0;
    bound += d * d;
  }
  bound += static_cast<double>(l.size()) / 4.0;

  const FbcCode code = fbc_encode(img, params_s(s));
  const FbcEntry& e = code.entries.back();
  const int per_row_large = img.side() / (2 * s);
  const auto chosen = shrunk_large_at(img, static_cast<int>(e.large_index) / per_row_large * 2 * s,
                                      static_cast<int>(e.large_index) % per_row_large * 2 * s, s);
  EXPECT_LE(direct_error(sb, chosen, dequantize_alpha(e.q_alpha), dequantize_beta(e.q_beta)), bound);
  EXPECT_EQ(fbc_fit(sb, l).q_alpha, 15);
}

TEST(DecodeTest, StepChangesNeverIncrease) {
  for (std::uint32_t seed = 0; seed < 4; ++seed) {
    const PixelImage img = seed % 2 ? smooth_image(7, seed) : random_image(7, seed);
    const FbcCode code = fbc_encode(img, params_s(4));
    std::vector<double> steps;
    fbc_decode(code, params_s(4, 15), PixelImage(7, 0), &steps);
    ASSERT_EQ(steps.size(), 15u);
    for (std::size_t i = 1; i < steps.size(); ++i) ASSERT_LE(steps[i], steps[i - 1] + 1e-9);
  }
}

TEST(DecodeTest, ResultBarelyDependsOnStartImage) {
  const PixelImage img = smooth_image(7, 30);
  const FbcCode code = fbc_encode(img, params_s(4));
  const PixelImage from_black = fbc_decode(code, params_s(4, 40), 0);
  const PixelImage from_white = fbc_decode(code, params_s(4, 40), 255);
  for (std::size_t i = 0; i < img.size(); ++i) {
    ASSERT_LE(std::abs(from_black.pixels()[i] - from_white.pixels()[i]), 1);
  }
}

TEST(DecodeTest, ReconstructsSmoothImageReasonably) {
  const PixelImage img = smooth_image(7, 31);
  const FbcCode code = fbc_encode(img, params_s(4));
  EXPECT_GT(psnr(img, fbc_decode(code, params_s(4))).db(), 25.0);
}

TEST(DecodeTest, RejectsMismatchedInputs) {
  const FbcCode code = fbc_encode(PixelImage(4, 3), params_s(4));
  EXPECT_THROW(fbc_decode(code, params_s(4), PixelImage(5)), InvalidArgument);
  EXPECT_THROW(fbc_decode(code, params_s(4, 0)), InvalidArgument);
  EXPECT_THROW(fbc_apply(code, std::vector<double>(10)), InvalidArgument);
}

TEST(ContainerTest, RoundTrips) {
  for (std::uint32_t seed = 0; seed < 6; ++seed) {
    const int s = 2 << (seed % 3);
    const FbcCode code = fbc_encode(random_image(5, seed), params_s(s));
    const auto bytes = fbc_serialize(code);
    EXPECT_EQ(bytes.size(), kFbcHeaderSize + fbc_payload_bytes(code));
    EXPECT_EQ(fbc_deserialize(bytes), code);
  }
}

TEST(ContainerTest, RejectsMalformedInput) {
  const auto good = fbc_serialize(fbc_encode(random_image(4, 2), params_s(4)));
  auto bad_magic = good;
  bad_magic[1] = 'X';
  EXPECT_THROW(fbc_deserialize(bad_magic), FormatError);
  auto bad_version = good;
  bad_version[4] = 9;
  EXPECT_THROW(fbc_deserialize(bad_version), FormatError);
  auto bad_size = good;
  bad_size[6] = 3;
  EXPECT_THROW(fbc_deserialize(bad_size), FormatError);
  auto truncated = good;
  truncated.pop_back();
  EXPECT_THROW(fbc_deserialize(truncated), FormatError);
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(fbc_deserialize(trailing), FormatError);
}

TEST(ContainerTest, RejectsOutOfRangeBeta) {
  // depth 2, s 2: one large block, entries are alpha(4) beta(9) with no index.
  FbcCode code = fbc_encode(PixelImage(2, 1), params_s(2));
  auto bytes = fbc_serialize(code);
  // First entry's beta field: bits 4..12. Set it to 511.
  bytes[kFbcHeaderSize] |= 0x0F;
  bytes[kFbcHeaderSize + 1] |= 0xF8;
  EXPECT_THROW(fbc_deserialize(bytes), FormatError);
}

}  // namespace
}  // namespace vvfc
