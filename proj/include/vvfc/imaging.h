#ifndef VVFC_IMAGING_H_
#define VVFC_IMAGING_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vvfc {

inline constexpr int kDefaultDepth = 9;  // 512 x 512
inline constexpr int kMaxDepth = 12;

// Square 2^depth x 2^depth grid of 8-bit gray values, row-major, row 0 at the
// top of the picture.
class PixelImage {
 public:
  PixelImage() : PixelImage(0) {}
  explicit PixelImage(int depth, std::uint8_t fill = 0);
  PixelImage(int depth, std::vector<std::uint8_t> pixels);

  int depth() const { return depth_; }
  int side() const { return 1 << depth_; }
  std::size_t size() const { return pixels_.size(); }

  std::uint8_t at(int row, int col) const {
    return pixels_[static_cast<std::size_t>(row) * side() + col];
  }
  void set(int row, int col, std::uint8_t value) {
    pixels_[static_cast<std::size_t>(row) * side() + col] = value;
  }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> mutable_pixels() { return pixels_; }

  bool operator==(const PixelImage&) const = default;

 private:
  int depth_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Real-valued square block; values are not clamped during arithmetic.
struct RealBlock {
  int side = 1;
  std::vector<double> values;

  RealBlock() : values(1, 0.0) {}
  RealBlock(int side, double fill = 0.0);
  RealBlock(int side, std::vector<double> values);

  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * side + col]; }
  double& at(int row, int col) { return values[static_cast<std::size_t>(row) * side + col]; }

  bool operator==(const RealBlock&) const = default;
};

// Quadtree address: digits in {1,2,3,4}, one per level, outermost first.
//
// Digit -> quadrant:
//   2 | 4        (top = small row indices)
//   --+--
//   1 | 3
// i.e. the unit-square maps with offsets (0,0), (0,1/2), (1/2,0), (1/2,1/2)
// with y pointing up.
class QuadAddress {
 public:
  QuadAddress() = default;
  explicit QuadAddress(std::vector<int> digits);
  // Parses a string of digits such as "322113414".
  static QuadAddress Parse(std::string_view text);
  // The address at 0-based position `index` in lexicographic order among all
  // addresses of length `length`.
  static QuadAddress FromIndex(std::size_t index, int length);

  std::size_t length() const { return digits_.size(); }
  int operator[](std::size_t i) const { return digits_[i]; }
  const std::vector<int>& digits() const { return digits_; }
  void push_back(int digit);
  std::string ToString() const;

  bool operator==(const QuadAddress&) const = default;

 private:
  std::vector<int> digits_;
};

// Row/column offsets of quadrant `digit` inside a block of side `side`.
struct QuadrantOffset {
  int row;
  int col;
};
QuadrantOffset quadrant_offset(int digit, int side);

// Top-left pixel of the block addressed by `addr` in an image of `depth`.
QuadrantOffset block_origin(const QuadAddress& addr, int depth);

// PGM (P5, maxval 255, square power-of-two side).
PixelImage load_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> save_pgm(const PixelImage& img);
PixelImage read_pgm_file(const std::filesystem::path& path);

RealBlock to_real_block(const PixelImage& img);
// Rounds to nearest and clamps to 0..255. Side must be a power of two.
PixelImage to_pixel_image(const RealBlock& block);
std::uint8_t round_to_gray(double value);

RealBlock extract_block(const PixelImage& img, const QuadAddress& addr);
// All 4^level blocks of the given level in lexicographic address order.
std::vector<RealBlock> extract_level_blocks(const PixelImage& img, int level);

// Children in digit order 1..4.
std::array<RealBlock, 4> split_quadrants(const RealBlock& block);
RealBlock tile_blocks(const std::array<RealBlock, 4>& children);

// 2x2 mean.
RealBlock downsample2x(const RealBlock& block);

// Integer log2 of a positive power of two, or -1 if `n` is not one.
int exact_log2(long long n);

// Whole-file helpers shared by the CLI and tests.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace vvfc

#endif  // VVFC_IMAGING_H_
