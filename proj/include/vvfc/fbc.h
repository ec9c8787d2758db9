#ifndef VVFC_FBC_H_
#define VVFC_FBC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vvfc/imaging.h"

namespace vvfc {

// Baseline fractal block coding: every small (range) block is approximated
// by alpha * downsample(large block) + beta, large blocks being the
// non-overlapping 2s x 2s tiles. No block isometries.

inline constexpr int kFbcAlphaBits = 4;
inline constexpr int kFbcBetaBits = 9;
inline constexpr int kFbcAlphaLevels = 1 << kFbcAlphaBits;
inline constexpr int kFbcBetaOffset = 255;

struct FbcParams {
  int small_size = 8;
  int decode_iterations = 10;
};

struct FbcEntry {
  std::uint32_t large_index = 0;
  std::uint8_t q_alpha = 0;   // 0..15
  std::uint16_t q_beta = 0;   // 0..510, beta + 255

  bool operator==(const FbcEntry&) const = default;
};

struct FbcCode {
  int depth = kDefaultDepth;
  int small_size = 8;
  std::vector<FbcEntry> entries;  // small blocks in row-major scan order

  std::size_t large_count() const;
  std::size_t small_count() const;
  // Throws FormatError on inconsistent geometry or out-of-range entries.
  void Validate() const;

  bool operator==(const FbcCode&) const = default;
};

// alpha(q) = (q - 7) / 9, i.e. 16 uniform levels on [-7/9, 8/9] including 0.
double dequantize_alpha(int q);
// Nearest level to `alpha` after clamping; lower q on ties.
int quantize_alpha(double alpha);
double dequantize_beta(int q);

void check_fbc_geometry(int depth, int small_size);

FbcCode fbc_encode(const PixelImage& img, const FbcParams& params);

// Runs params.decode_iterations passes of the block transform starting from
// `init`, then rounds. `step_changes`, when given, receives the max-abs
// difference between successive iterates.
PixelImage fbc_decode(const FbcCode& code, const FbcParams& params, const PixelImage& init,
                      std::vector<double>* step_changes = nullptr);
PixelImage fbc_decode(const FbcCode& code, const FbcParams& params, std::uint8_t init_value = 128,
                      std::vector<double>* step_changes = nullptr);

// One pass of the block transform on a real-valued image (row-major,
// side = 2^depth); output clamped to [0, 255] but not rounded.
std::vector<double> fbc_apply(const FbcCode& code, std::span<const double> current);

// Squared error of SB against alpha_q * L + beta_q for one (small, large) pair
// under the encoder's quantization rules; exposed for exhaustive checks.
struct FbcFit {
  int q_alpha;
  int q_beta;
  double error;
};
FbcFit fbc_fit(std::span<const double> small_block, std::span<const double> downsampled_large);

std::size_t fbc_payload_bits(const FbcCode& code);
std::size_t fbc_payload_bytes(const FbcCode& code);

// FBC1 container: "FBC1", version, depth, s, then entries bit-packed
// (index, alpha, beta) MSB-first, zero-padded.
inline constexpr std::size_t kFbcHeaderSize = 7;
std::vector<std::uint8_t> fbc_serialize(const FbcCode& code);
FbcCode fbc_deserialize(std::span<const std::uint8_t> bytes);

}  // namespace vvfc

#endif  // VVFC_FBC_H_
