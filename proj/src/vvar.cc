#include "vvfc/vvar.h"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "vvfc/bitstream.h"
#include "vvfc/errors.h"

namespace vvfc {

namespace {

constexpr std::uint8_t kVvcVersion = 1;
constexpr int kMinCodeDepth = 2;

long long pow4(int e) { return 1LL << (2 * e); }

void check_code_depth(int depth) {
  if (depth < kMinCodeDepth || depth > kMaxDepth) {
    throw InvalidArgument("depth " + std::to_string(depth) + " outside " + std::to_string(kMinCodeDepth) +
                          ".." + std::to_string(kMaxDepth));
  }
}

VectorSet blocks_to_vectors(const std::vector<RealBlock>& blocks) {
  VectorSet set;
  for (const RealBlock& b : blocks) set.push_back(b.values);
  return set;
}

ClusterResult cluster_level(const VectorSet& points, int v, int level, const EncodeOptions& opts) {
  ClusterResult result;
  if (opts.initializer) {
    result = lloyd(points, opts.initializer(points, v), opts.cluster.max_iterations);
  } else {
    ClusterOptions per_level = opts.cluster;
    per_level.k = v;
    per_level.seed = opts.cluster.seed ^ (static_cast<std::uint64_t>(level) << 40);
    result = kmeans(points, per_level);
  }
  return canonicalize_labels(std::move(result));
}

// Quadrant children of every representative, ordered by (parent type, digit).
VectorSet split_representatives(const VectorSet& reps, int side) {
  VectorSet children;
  for (std::size_t t = 0; t < reps.size(); ++t) {
    const auto row = reps[t];
    const RealBlock parent(side, std::vector<double>(row.begin(), row.end()));
    for (const RealBlock& child : split_quadrants(parent)) children.push_back(child.values);
  }
  return children;
}

void check_labels(const std::vector<int>& labels, std::size_t expected, int v, const char* what) {
  if (labels.size() != expected) {
    throw FormatError(std::string(what) + " has " + std::to_string(labels.size()) + " entries, expected " +
                      std::to_string(expected));
  }
  for (int label : labels) {
    if (label < 1 || label > v) {
      throw FormatError(std::string(what) + " holds label " + std::to_string(label) + " outside 1.." +
                        std::to_string(v));
    }
  }
}

class Decoder {
 public:
  explicit Decoder(const VVarCode& code) : code_(code), n0_(code.n0()), img_(code.depth) {}

  PixelImage Run() && {
    const int level = n0_ + 1;
    const std::size_t count = static_cast<std::size_t>(pow4(level));
    const int side = 1 << (code_.depth - level);
    for (std::size_t p = 0; p < count; ++p) {
      const QuadrantOffset origin = block_origin(QuadAddress::FromIndex(p, level), code_.depth);
      Fill(origin.row, origin.col, side, level, code_.first_labels[p]);
    }
    return std::move(img_);
  }

 private:
  void Fill(int row, int col, int side, int level, int type) {
    const std::size_t base = 4 * static_cast<std::size_t>(type - 1);
    for (int digit = 1; digit <= 4; ++digit) {
      const QuadrantOffset off = quadrant_offset(digit, side);
      const std::size_t slot = base + static_cast<std::size_t>(digit - 1);
      if (level + 1 == code_.depth) {
        img_.set(row + off.row, col + off.col, code_.leaf_values[slot]);
      } else {
        const int child = code_.level_labels[static_cast<std::size_t>(level + 1 - n0_ - 2)][slot];
        Fill(row + off.row, col + off.col, side / 2, level + 1, child);
      }
    }
  }

  const VVarCode& code_;
  int n0_;
  PixelImage img_;
};

}  // namespace

void check_v_range(long long v, int depth) {
  check_code_depth(depth);
  if (v < 1 || v >= pow4(depth - 1)) {
    throw InvalidArgument("V = " + std::to_string(v) + " outside 1.." + std::to_string(pow4(depth - 1) - 1) +
                          " for depth " + std::to_string(depth));
  }
}

int compute_n0(int v, int depth) {
  check_v_range(v, depth);
  int n0 = 0;
  while (pow4(n0 + 1) <= v) ++n0;
  return n0;
}

int VVarCode::n0() const { return compute_n0(v, depth); }

void VVarCode::Validate() const {
  if (depth < kMinCodeDepth || depth > kMaxDepth) throw FormatError("code depth out of range");
  if (v < 1 || v >= pow4(depth - 1)) throw FormatError("code V out of range for its depth");
  const int n = n0();
  check_labels(first_labels, static_cast<std::size_t>(pow4(n + 1)), v, "first-level labels");
  const std::size_t levels = static_cast<std::size_t>(std::max(0, depth - 2 - n));
  if (level_labels.size() != levels) {
    throw FormatError("code has " + std::to_string(level_labels.size()) + " label levels, expected " +
                      std::to_string(levels));
  }
  for (const auto& labels : level_labels) check_labels(labels, 4 * static_cast<std::size_t>(v), v, "level labels");
  if (leaf_values.size() != 4 * static_cast<std::size_t>(v)) throw FormatError("leaf value count mismatch");
  if (v == 1 && std::adjacent_find(leaf_values.begin(), leaf_values.end(), std::not_equal_to<>()) !=
                    leaf_values.end()) {
    throw FormatError("a 1-variable code must have a single gray value");
  }
}

VectorSet first_distinct_points(const VectorSet& points, int k) {
  VectorSet init;
  for (std::size_t i = 0; i < points.size() && init.size() < static_cast<std::size_t>(k); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < init.size() && !seen; ++j) seen = std::ranges::equal(init[j], points[i]);
    if (!seen) init.push_back(points[i]);
  }
  while (init.size() < static_cast<std::size_t>(k)) init.push_back(points[0]);
  return init;
}

VVarCode encode(const PixelImage& img, int v, const EncodeOptions& opts) {
  check_code_depth(img.depth());
  const int depth = img.depth();
  const int n0 = compute_n0(v, depth);

  VVarCode code;
  code.depth = depth;
  code.v = v;

  int level = n0 + 1;
  ClusterResult clusters = cluster_level(blocks_to_vectors(extract_level_blocks(img, level)), v, level, opts);
  code.first_labels = std::move(clusters.labels);
  VectorSet reps = std::move(clusters.centroids);
  int side = 1 << (depth - level);

  for (++level; level <= depth - 1; ++level) {
    clusters = cluster_level(split_representatives(reps, side), v, level, opts);
    code.level_labels.push_back(std::move(clusters.labels));
    reps = std::move(clusters.centroids);
    side /= 2;
  }

  // side == 2: the 4V one-pixel children are clustered like any other level
  // and each takes its cluster's value, so the pixel level has at most V
  // distinct values too.
  clusters = cluster_level(split_representatives(reps, side), v, depth, opts);
  code.leaf_values.reserve(clusters.labels.size());
  for (int label : clusters.labels) {
    code.leaf_values.push_back(round_to_gray(clusters.centroids[static_cast<std::size_t>(label - 1)][0]));
  }
  return code;
}

PixelImage decode(const VVarCode& code) {
  code.Validate();
  return Decoder(code).Run();
}

std::uint8_t pixel_value(const VVarCode& code, const QuadAddress& addr) {
  if (static_cast<int>(addr.length()) != code.depth) {
    throw InvalidArgument("pixel address must have " + std::to_string(code.depth) + " digits");
  }
  const int n0 = code.n0();
  int label = 1;
  // Only the entries on the traced path are checked; decode() validates all.
  for (int k = 1; k <= code.depth; ++k) {
    const std::size_t row = 4 * static_cast<std::size_t>(label - 1) + static_cast<std::size_t>(addr[k - 1]);
    if (k <= n0) {
      label = static_cast<int>(row);
    } else if (k == n0 + 1) {
      label = code.first_labels.at(row - 1);
    } else if (k < code.depth) {
      label = code.level_labels.at(static_cast<std::size_t>(k - n0 - 2)).at(row - 1);
    } else {
      return code.leaf_values.at(row - 1);
    }
    if (label < 1 || label > code.v) throw FormatError("label outside 1..V on pixel trace");
  }
  // Unreachable: V < 4^(depth-1) keeps n0 + 1 < depth.
  throw FormatError("pixel trace did not reach a leaf");
}

std::size_t payload_size(int v, int depth) {
  const int n0 = compute_n0(v, depth);
  if (v == 1) return 1;
  const std::uint64_t labels = static_cast<std::uint64_t>(pow4(n0 + 1)) +
                               4ull * static_cast<std::uint64_t>(v) * static_cast<std::uint64_t>(depth - 2 - n0);
  const std::uint64_t bits = labels * static_cast<std::uint64_t>(bits_for(static_cast<std::uint64_t>(v)));
  return static_cast<std::size_t>((bits + 7) / 8 + 4ull * static_cast<std::uint64_t>(v));
}

std::vector<std::uint8_t> serialize(const VVarCode& code) {
  code.Validate();
  std::vector<std::uint8_t> out = {'V', 'V', 'C', '1', kVvcVersion, static_cast<std::uint8_t>(code.depth)};
  put_u32_be(out, static_cast<std::uint32_t>(code.v));
  if (code.v == 1) {
    out.push_back(code.leaf_values[0]);
    return out;
  }
  const int bits = bits_for(static_cast<std::uint64_t>(code.v));
  BitWriter writer(out);
  for (int label : code.first_labels) writer.Write(static_cast<std::uint32_t>(label - 1), bits);
  for (const auto& labels : code.level_labels) {
    for (int label : labels) writer.Write(static_cast<std::uint32_t>(label - 1), bits);
  }
  writer.AlignToByte();
  out.insert(out.end(), code.leaf_values.begin(), code.leaf_values.end());
  return out;
}

VVarCode deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kVvcHeaderSize) throw FormatError("truncated VVC1 header");
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "VVC1")) throw FormatError("bad VVC1 magic");
  if (bytes[4] != kVvcVersion) throw FormatError("unsupported VVC1 version " + std::to_string(bytes[4]));
  VVarCode code;
  code.depth = bytes[5];
  const std::uint32_t v = get_u32_be(bytes.subspan(6, 4));
  if (code.depth < kMinCodeDepth || code.depth > kMaxDepth) throw FormatError("VVC1 depth out of range");
  if (v < 1 || v >= static_cast<std::uint64_t>(pow4(code.depth - 1))) throw FormatError("VVC1 V out of range");
  code.v = static_cast<int>(v);

  const std::size_t expected = kVvcHeaderSize + payload_size(code.v, code.depth);
  if (bytes.size() < expected) throw FormatError("truncated VVC1 payload");
  if (bytes.size() > expected) throw FormatError("trailing bytes after VVC1 payload");
  const auto payload = bytes.subspan(kVvcHeaderSize);

  const int n0 = code.n0();
  const std::size_t per_level = 4 * static_cast<std::size_t>(code.v);
  if (code.v == 1) {
    code.first_labels.assign(4, 1);
    code.level_labels.assign(static_cast<std::size_t>(code.depth - 2), std::vector<int>(4, 1));
    code.leaf_values.assign(4, payload[0]);
    return code;
  }

  const int bits = bits_for(v);
  BitReader reader(payload);
  auto read_labels = [&](std::size_t count) {
    std::vector<int> labels(count);
    for (int& label : labels) {
      const std::uint32_t raw = reader.Read(bits);
      if (raw >= v) throw FormatError("VVC1 label " + std::to_string(raw + 1) + " exceeds V");
      label = static_cast<int>(raw) + 1;
    }
    return labels;
  };
  code.first_labels = read_labels(static_cast<std::size_t>(pow4(n0 + 1)));
  for (int level = n0 + 2; level <= code.depth - 1; ++level) code.level_labels.push_back(read_labels(per_level));
  reader.AlignToByte();
  const auto leaves = payload.subspan(reader.bit_position() / 8);
  code.leaf_values.assign(leaves.begin(), leaves.end());
  code.Validate();
  return code;
}

std::size_t distinct_block_count(const PixelImage& img, int level) {
  if (level < 0 || level > img.depth()) {
    throw InvalidArgument("level " + std::to_string(level) + " outside 0.." + std::to_string(img.depth()));
  }
  const int side = 1 << (img.depth() - level);
  const std::size_t count = std::size_t{1} << (2 * level);
  std::unordered_set<std::string> seen;
  std::string key(static_cast<std::size_t>(side) * side, '\0');
  for (std::size_t p = 0; p < count; ++p) {
    const QuadrantOffset origin = block_origin(QuadAddress::FromIndex(p, level), img.depth());
    std::size_t k = 0;
    for (int r = 0; r < side; ++r) {
      for (int c = 0; c < side; ++c) key[k++] = static_cast<char>(img.at(origin.row + r, origin.col + c));
    }
    seen.insert(key);
  }
  return seen.size();
}

VVarCode code_from_matrix(const std::vector<std::vector<int>>& matrix, int depth) {
  check_code_depth(depth);
  if (matrix.empty() || matrix.size() % 4 != 0) throw FormatError("code matrix needs 4V rows");
  const int v = static_cast<int>(matrix.size() / 4);
  const int n0 = compute_n0(v, depth);
  if (pow4(n0) != v) throw FormatError("the square code-matrix layout needs V to be a power of 4");
  const std::size_t columns = static_cast<std::size_t>(depth - n0);
  for (const auto& row : matrix) {
    if (row.size() != columns) {
      throw FormatError("code matrix needs " + std::to_string(columns) + " columns for depth " +
                        std::to_string(depth));
    }
  }
  auto column = [&](std::size_t c) {
    std::vector<int> values;
    for (const auto& row : matrix) values.push_back(row[c]);
    return values;
  };
  VVarCode code;
  code.depth = depth;
  code.v = v;
  code.first_labels = column(0);
  for (std::size_t c = 1; c + 1 < columns; ++c) code.level_labels.push_back(column(c));
  for (int value : column(columns - 1)) {
    if (value < 0 || value > 255) throw FormatError("gray value " + std::to_string(value) + " outside 0..255");
    code.leaf_values.push_back(static_cast<std::uint8_t>(value));
  }
  code.Validate();
  return code;
}

}  // namespace vvfc
