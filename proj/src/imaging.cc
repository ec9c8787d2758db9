#include "vvfc/imaging.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <system_error>

#include "vvfc/errors.h"

namespace vvfc {

namespace {

void check_depth(int depth) {
  if (depth < 0 || depth > kMaxDepth) {
    throw InvalidArgument("image depth " + std::to_string(depth) + " outside 0.." +
                          std::to_string(kMaxDepth));
  }
}

void check_side(int side) {
  if (side < 1 || exact_log2(side) < 0) {
    throw InvalidArgument("block side " + std::to_string(side) + " is not a power of two");
  }
}

// Minimal tokenizer for the PGM header: skips whitespace and '#' comments.
class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string NextToken() {
    SkipSpaceAndComments();
    std::string token;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      token.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (token.empty()) throw FormatError("truncated PGM header");
    return token;
  }

  long long NextNumber() {
    const std::string token = NextToken();
    if (token.size() > 9 || !std::all_of(token.begin(), token.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c)) != 0;
        })) {
      throw FormatError("bad PGM header field '" + token + "'");
    }
    return std::stoll(token);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t RasterStart() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("missing whitespace after PGM maxval");
    }
    return pos_ + 1;
  }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

int exact_log2(long long n) {
  if (n <= 0 || (n & (n - 1)) != 0) return -1;
  int log = 0;
  while ((1LL << log) < n) ++log;
  return log;
}

PixelImage::PixelImage(int depth, std::uint8_t fill) : depth_(depth) {
  check_depth(depth);
  pixels_.assign(std::size_t{1} << (2 * depth), fill);
}

PixelImage::PixelImage(int depth, std::vector<std::uint8_t> pixels)
    : depth_(depth), pixels_(std::move(pixels)) {
  check_depth(depth);
  if (pixels_.size() != (std::size_t{1} << (2 * depth))) {
    throw InvalidArgument("pixel count " + std::to_string(pixels_.size()) +
                          " does not match depth " + std::to_string(depth));
  }
}

RealBlock::RealBlock(int side, double fill) : side(side) {
  check_side(side);
  values.assign(static_cast<std::size_t>(side) * side, fill);
}

RealBlock::RealBlock(int side, std::vector<double> values) : side(side), values(std::move(values)) {
  check_side(side);
  if (this->values.size() != static_cast<std::size_t>(side) * side) {
    throw InvalidArgument("block value count does not match side");
  }
}

QuadAddress::QuadAddress(std::vector<int> digits) {
  digits_.reserve(digits.size());
  for (int d : digits) push_back(d);
}

QuadAddress QuadAddress::Parse(std::string_view text) {
  QuadAddress addr;
  for (char c : text) {
    if (c < '1' || c > '4') {
      throw InvalidArgument("quadtree address digit '" + std::string(1, c) + "' not in 1..4");
    }
    addr.push_back(c - '0');
  }
  return addr;
}

QuadAddress QuadAddress::FromIndex(std::size_t index, int length) {
  std::vector<int> digits(static_cast<std::size_t>(length));
  for (int k = length - 1; k >= 0; --k) {
    digits[static_cast<std::size_t>(k)] = static_cast<int>(index % 4) + 1;
    index /= 4;
  }
  if (index != 0) throw InvalidArgument("address index out of range");
  return QuadAddress(std::move(digits));
}

void QuadAddress::push_back(int digit) {
  if (digit < 1 || digit > 4) {
    throw InvalidArgument("quadtree address digit " + std::to_string(digit) + " not in 1..4");
  }
  digits_.push_back(digit);
}

std::string QuadAddress::ToString() const {
  std::string s;
  for (int d : digits_) s.push_back(static_cast<char>('0' + d));
  return s;
}

QuadrantOffset quadrant_offset(int digit, int side) {
  const int half = side / 2;
  switch (digit) {
    case 1: return {half, 0};
    case 2: return {0, 0};
    case 3: return {half, half};
    case 4: return {0, half};
    default: throw InvalidArgument("quadrant digit not in 1..4");
  }
}

QuadrantOffset block_origin(const QuadAddress& addr, int depth) {
  if (static_cast<int>(addr.length()) > depth) {
    throw InvalidArgument("address of length " + std::to_string(addr.length()) +
                          " exceeds image depth " + std::to_string(depth));
  }
  QuadrantOffset origin{0, 0};
  int side = 1 << depth;
  for (int d : addr.digits()) {
    const QuadrantOffset off = quadrant_offset(d, side);
    origin.row += off.row;
    origin.col += off.col;
    side /= 2;
  }
  return origin;
}

PixelImage load_pgm(std::span<const std::uint8_t> bytes) {
  PgmHeaderReader header(bytes);
  if (header.NextToken() != "P5") throw FormatError("not a binary PGM (P5) stream");
  const long long width = header.NextNumber();
  const long long height = header.NextNumber();
  const long long maxval = header.NextNumber();
  if (maxval != 255) throw FormatError("PGM maxval must be 255, got " + std::to_string(maxval));
  if (width != height) {
    throw FormatError("PGM image is not square (" + std::to_string(width) + "x" +
                      std::to_string(height) + ")");
  }
  const int depth = exact_log2(width);
  if (depth < 0) throw FormatError("PGM side " + std::to_string(width) + " is not a power of two");
  if (depth > kMaxDepth) throw FormatError("PGM side " + std::to_string(width) + " too large");
  const std::size_t start = header.RasterStart();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < start + count) throw FormatError("truncated PGM raster");
  return PixelImage(depth, std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                                     bytes.begin() + static_cast<std::ptrdiff_t>(start + count)));
}

std::vector<std::uint8_t> save_pgm(const PixelImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.side()) + " " + std::to_string(img.side()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

PixelImage read_pgm_file(const std::filesystem::path& path) { return load_pgm(read_file(path)); }

RealBlock to_real_block(const PixelImage& img) {
  RealBlock block(img.side());
  std::copy(img.pixels().begin(), img.pixels().end(), block.values.begin());
  return block;
}

std::uint8_t round_to_gray(double value) {
  return static_cast<std::uint8_t>(std::clamp(std::round(value), 0.0, 255.0));
}

PixelImage to_pixel_image(const RealBlock& block) {
  PixelImage img(exact_log2(block.side));
  std::transform(block.values.begin(), block.values.end(), img.mutable_pixels().begin(), round_to_gray);
  return img;
}

RealBlock extract_block(const PixelImage& img, const QuadAddress& addr) {
  const QuadrantOffset origin = block_origin(addr, img.depth());
  const int side = 1 << (img.depth() - static_cast<int>(addr.length()));
  RealBlock block(side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) block.at(r, c) = img.at(origin.row + r, origin.col + c);
  }
  return block;
}

std::vector<RealBlock> extract_level_blocks(const PixelImage& img, int level) {
  if (level < 0 || level > img.depth()) throw InvalidArgument("level outside 0..depth");
  const std::size_t count = std::size_t{1} << (2 * level);
  std::vector<RealBlock> blocks;
  blocks.reserve(count);
  for (std::size_t p = 0; p < count; ++p) {
    blocks.push_back(extract_block(img, QuadAddress::FromIndex(p, level)));
  }
  return blocks;
}

std::array<RealBlock, 4> split_quadrants(const RealBlock& block) {
  if (block.side < 2) throw InvalidArgument("cannot split a 1x1 block");
  const int half = block.side / 2;
  std::array<RealBlock, 4> children;
  for (int d = 1; d <= 4; ++d) {
    const QuadrantOffset off = quadrant_offset(d, block.side);
    RealBlock child(half);
    for (int r = 0; r < half; ++r) {
      for (int c = 0; c < half; ++c) child.at(r, c) = block.at(off.row + r, off.col + c);
    }
    children[static_cast<std::size_t>(d - 1)] = std::move(child);
  }
  return children;
}

RealBlock tile_blocks(const std::array<RealBlock, 4>& children) {
  const int half = children[0].side;
  for (const RealBlock& child : children) {
    if (child.side != half) throw InvalidArgument("tile_blocks: children differ in side");
  }
  RealBlock block(2 * half);
  for (int d = 1; d <= 4; ++d) {
    const QuadrantOffset off = quadrant_offset(d, block.side);
    const RealBlock& child = children[static_cast<std::size_t>(d - 1)];
    for (int r = 0; r < half; ++r) {
      for (int c = 0; c < half; ++c) block.at(off.row + r, off.col + c) = child.at(r, c);
    }
  }
  return block;
}

RealBlock downsample2x(const RealBlock& block) {
  if (block.side < 2) throw InvalidArgument("cannot downsample a 1x1 block");
  const int half = block.side / 2;
  RealBlock out(half);
  for (int r = 0; r < half; ++r) {
    for (int c = 0; c < half; ++c) {
      out.at(r, c) = (block.at(2 * r, 2 * c) + block.at(2 * r, 2 * c + 1) +
                      block.at(2 * r + 1, 2 * c) + block.at(2 * r + 1, 2 * c + 1)) /
                     4.0;
    }
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::random_device rd;
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("error writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace vvfc
