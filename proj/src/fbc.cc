#include "vvfc/fbc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vvfc/bitstream.h"
#include "vvfc/errors.h"

namespace vvfc {

namespace {

constexpr std::uint8_t kFbcVersion = 1;
constexpr int kMaxContainerSmallSize = 128;  // s is stored in one byte

struct BlockSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

BlockSums sums_of(std::span<const double> v) {
  BlockSums s;
  for (double x : v) {
    s.sum += x;
    s.sum_sq += x * x;
  }
  return s;
}

FbcFit fit_from_sums(const BlockSums& small, const BlockSums& large, double cross, double n) {
  const double var = large.sum_sq - large.sum * large.sum / n;
  const double cov = cross - large.sum * small.sum / n;
  const double alpha_ls = var > 1e-9 * n ? cov / var : 0.0;
  const int q_alpha = quantize_alpha(alpha_ls);
  const double a = dequantize_alpha(q_alpha);
  const double beta = std::clamp(std::round((small.sum - a * large.sum) / n), -255.0, 255.0);
  const double error = small.sum_sq + a * a * large.sum_sq + n * beta * beta - 2.0 * a * cross -
                       2.0 * beta * small.sum + 2.0 * a * beta * large.sum;
  return {q_alpha, static_cast<int>(beta) + kFbcBetaOffset, std::max(0.0, error)};
}

// Copies the s x s block at (row, col) of a real image of the given side.
void copy_block(std::span<const double> image, int side, int row, int col, int size, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(size) * size);
  for (int r = 0; r < size; ++r) {
    const double* src = image.data() + static_cast<std::size_t>(row + r) * side + col;
    std::copy(src, src + size, out.begin() + static_cast<std::ptrdiff_t>(r) * size);
  }
}

// 2x2-mean downsampling of every 2s x 2s large block, in row-major order.
std::vector<std::vector<double>> downsampled_large_blocks(std::span<const double> image, int side, int s) {
  const int per_row = side / (2 * s);
  std::vector<std::vector<double>> blocks;
  blocks.reserve(static_cast<std::size_t>(per_row) * per_row);
  for (int br = 0; br < per_row; ++br) {
    for (int bc = 0; bc < per_row; ++bc) {
      std::vector<double> d(static_cast<std::size_t>(s) * s);
      for (int r = 0; r < s; ++r) {
        const double* top = image.data() + static_cast<std::size_t>(br * 2 * s + 2 * r) * side + bc * 2 * s;
        const double* bottom = top + side;
        for (int c = 0; c < s; ++c) {
          d[static_cast<std::size_t>(r) * s + c] =
              (top[2 * c] + top[2 * c + 1] + bottom[2 * c] + bottom[2 * c + 1]) / 4.0;
        }
      }
      blocks.push_back(std::move(d));
    }
  }
  return blocks;
}

std::vector<double> to_reals(const PixelImage& img) {
  return std::vector<double>(img.pixels().begin(), img.pixels().end());
}

}  // namespace

double dequantize_alpha(int q) { return (q - 7) / 9.0; }

int quantize_alpha(double alpha) {
  const double clamped = std::clamp(alpha, dequantize_alpha(0), dequantize_alpha(kFbcAlphaLevels - 1));
  int best = 0;
  for (int q = 1; q < kFbcAlphaLevels; ++q) {
    if (std::abs(dequantize_alpha(q) - clamped) < std::abs(dequantize_alpha(best) - clamped)) best = q;
  }
  return best;
}

double dequantize_beta(int q) { return q - kFbcBetaOffset; }

void check_fbc_geometry(int depth, int small_size) {
  if (depth < 1 || depth > kMaxDepth) throw InvalidArgument("image depth out of range for block coding");
  if (small_size < 2 || exact_log2(small_size) < 0) {
    throw InvalidArgument("small block size " + std::to_string(small_size) + " is not a power of two >= 2");
  }
  if (2 * small_size > (1 << depth)) {
    throw InvalidArgument("large block size " + std::to_string(2 * small_size) + " exceeds image side " +
                          std::to_string(1 << depth));
  }
}

std::size_t FbcCode::large_count() const {
  const std::size_t per_row = static_cast<std::size_t>(1 << depth) / (2 * static_cast<std::size_t>(small_size));
  return per_row * per_row;
}

std::size_t FbcCode::small_count() const {
  const std::size_t per_row = static_cast<std::size_t>(1 << depth) / static_cast<std::size_t>(small_size);
  return per_row * per_row;
}

void FbcCode::Validate() const {
  try {
    check_fbc_geometry(depth, small_size);
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  if (entries.size() != small_count()) throw FormatError("block code entry count does not match geometry");
  for (const FbcEntry& e : entries) {
    if (e.large_index >= large_count()) throw FormatError("large block index out of range");
    if (e.q_alpha >= kFbcAlphaLevels) throw FormatError("alpha code out of range");
    if (e.q_beta > 2 * kFbcBetaOffset) throw FormatError("beta code out of range");
  }
}

FbcFit fbc_fit(std::span<const double> small_block, std::span<const double> downsampled_large) {
  if (small_block.size() != downsampled_large.size() || small_block.empty()) {
    throw InvalidArgument("fbc_fit: block sizes differ");
  }
  double cross = 0.0;
  for (std::size_t i = 0; i < small_block.size(); ++i) cross += small_block[i] * downsampled_large[i];
  return fit_from_sums(sums_of(small_block), sums_of(downsampled_large), cross,
                       static_cast<double>(small_block.size()));
}

FbcCode fbc_encode(const PixelImage& img, const FbcParams& params) {
  check_fbc_geometry(img.depth(), params.small_size);
  const int side = img.side();
  const int s = params.small_size;
  const std::vector<double> pixels = to_reals(img);

  const auto large = downsampled_large_blocks(pixels, side, s);
  std::vector<BlockSums> large_sums;
  large_sums.reserve(large.size());
  for (const auto& l : large) large_sums.push_back(sums_of(l));

  FbcCode code;
  code.depth = img.depth();
  code.small_size = s;
  const double n = static_cast<double>(s) * s;
  std::vector<double> sb;
  const int per_row = side / s;
  for (int br = 0; br < per_row; ++br) {
    for (int bc = 0; bc < per_row; ++bc) {
      copy_block(pixels, side, br * s, bc * s, s, sb);
      const BlockSums small_sums = sums_of(sb);
      FbcEntry best_entry;
      double best_error = std::numeric_limits<double>::infinity();
      for (std::size_t li = 0; li < large.size(); ++li) {
        const double* l = large[li].data();
        double cross = 0.0;
        for (std::size_t i = 0; i < sb.size(); ++i) cross += sb[i] * l[i];
        const FbcFit fit = fit_from_sums(small_sums, large_sums[li], cross, n);
        if (fit.error < best_error) {
          best_error = fit.error;
          best_entry = {static_cast<std::uint32_t>(li), static_cast<std::uint8_t>(fit.q_alpha),
                        static_cast<std::uint16_t>(fit.q_beta)};
        }
      }
      code.entries.push_back(best_entry);
    }
  }
  return code;
}

std::vector<double> fbc_apply(const FbcCode& code, std::span<const double> current) {
  code.Validate();
  const int side = 1 << code.depth;
  if (current.size() != static_cast<std::size_t>(side) * side) {
    throw InvalidArgument("image size does not match the block code");
  }
  const int s = code.small_size;
  const auto large = downsampled_large_blocks(current, side, s);
  std::vector<double> next(current.size());
  const int per_row = side / s;
  for (std::size_t idx = 0; idx < code.entries.size(); ++idx) {
    const FbcEntry& e = code.entries[idx];
    const int row0 = static_cast<int>(idx / static_cast<std::size_t>(per_row)) * s;
    const int col0 = static_cast<int>(idx % static_cast<std::size_t>(per_row)) * s;
    const double a = dequantize_alpha(e.q_alpha);
    const double b = dequantize_beta(e.q_beta);
    const std::vector<double>& l = large[e.large_index];
    for (int r = 0; r < s; ++r) {
      double* dst = next.data() + static_cast<std::size_t>(row0 + r) * side + col0;
      for (int c = 0; c < s; ++c) dst[c] = std::clamp(a * l[static_cast<std::size_t>(r) * s + c] + b, 0.0, 255.0);
    }
  }
  return next;
}

PixelImage fbc_decode(const FbcCode& code, const FbcParams& params, const PixelImage& init,
                      std::vector<double>* step_changes) {
  code.Validate();
  if (init.depth() != code.depth) throw InvalidArgument("initial image depth does not match the block code");
  if (params.decode_iterations < 1) throw InvalidArgument("decode iterations must be >= 1");
  std::vector<double> current = to_reals(init);
  for (int it = 0; it < params.decode_iterations; ++it) {
    std::vector<double> next = fbc_apply(code, current);
    if (step_changes) {
      double change = 0.0;
      for (std::size_t i = 0; i < next.size(); ++i) change = std::max(change, std::abs(next[i] - current[i]));
      step_changes->push_back(change);
    }
    current = std::move(next);
  }
  PixelImage out(code.depth);
  std::transform(current.begin(), current.end(), out.mutable_pixels().begin(), round_to_gray);
  return out;
}

PixelImage fbc_decode(const FbcCode& code, const FbcParams& params, std::uint8_t init_value,
                      std::vector<double>* step_changes) {
  return fbc_decode(code, params, PixelImage(code.depth, init_value), step_changes);
}

std::size_t fbc_payload_bits(const FbcCode& code) {
  return code.entries.size() *
         static_cast<std::size_t>(kFbcAlphaBits + kFbcBetaBits + bits_for(code.large_count()));
}

std::size_t fbc_payload_bytes(const FbcCode& code) { return (fbc_payload_bits(code) + 7) / 8; }

std::vector<std::uint8_t> fbc_serialize(const FbcCode& code) {
  code.Validate();
  if (code.small_size > kMaxContainerSmallSize) {
    throw InvalidArgument("FBC1 stores the small block size in one byte; " + std::to_string(code.small_size) +
                          " is too large");
  }
  std::vector<std::uint8_t> out = {'F', 'B', 'C', '1', kFbcVersion, static_cast<std::uint8_t>(code.depth),
                                   static_cast<std::uint8_t>(code.small_size)};
  const int index_bits = bits_for(code.large_count());
  BitWriter writer(out);
  for (const FbcEntry& e : code.entries) {
    writer.Write(e.large_index, index_bits);
    writer.Write(e.q_alpha, kFbcAlphaBits);
    writer.Write(e.q_beta, kFbcBetaBits);
  }
  return out;
}

FbcCode fbc_deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFbcHeaderSize) throw FormatError("truncated FBC1 header");
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "FBC1")) throw FormatError("bad FBC1 magic");
  if (bytes[4] != kFbcVersion) throw FormatError("unsupported FBC1 version " + std::to_string(bytes[4]));
  FbcCode code;
  code.depth = bytes[5];
  code.small_size = bytes[6];
  try {
    check_fbc_geometry(code.depth, code.small_size);
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  const std::size_t count = code.small_count();
  code.entries.resize(count);
  const std::size_t expected = kFbcHeaderSize + (count * static_cast<std::size_t>(kFbcAlphaBits + kFbcBetaBits +
                                                                                   bits_for(code.large_count())) +
                                                 7) / 8;
  if (bytes.size() < expected) throw FormatError("truncated FBC1 payload");
  if (bytes.size() > expected) throw FormatError("trailing bytes after FBC1 payload");
  BitReader reader(bytes.subspan(kFbcHeaderSize));
  const int index_bits = bits_for(code.large_count());
  for (FbcEntry& e : code.entries) {
    e.large_index = reader.Read(index_bits);
    e.q_alpha = static_cast<std::uint8_t>(reader.Read(kFbcAlphaBits));
    e.q_beta = static_cast<std::uint16_t>(reader.Read(kFbcBetaBits));
  }
  code.Validate();
  return code;
}

}  // namespace vvfc
