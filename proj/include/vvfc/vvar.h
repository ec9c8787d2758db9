#ifndef VVFC_VVAR_H_
#define VVFC_VVAR_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vvfc/clustering.h"
#include "vvfc/imaging.h"

namespace vvfc {

// V-variable code of a 2^depth x 2^depth image.
//
// Levels 0..n0 are coded trivially (every piece is its own type). The
// 4^(n0+1) pieces of level n0+1 get types from `first_labels`, listed in
// lexicographic address order. For each level n in n0+2..depth-1,
// level_labels[n - n0 - 2][4(L-1) + i - 1] is the type of child i of a
// type-L piece. Pixel i of a type-L piece at level depth-1 is
// leaf_values[4(L-1) + i - 1].
struct VVarCode {
  int depth = kDefaultDepth;
  int v = 1;
  std::vector<int> first_labels;
  std::vector<std::vector<int>> level_labels;
  std::vector<std::uint8_t> leaf_values;

  int n0() const;
  // Throws FormatError if the arrays do not match (depth, v).
  void Validate() const;

  bool operator==(const VVarCode&) const = default;
};

// The n0 with 4^n0 <= v < 4^(n0+1). Throws InvalidArgument unless
// 1 <= v < 4^(depth-1).
int compute_n0(int v, int depth = kDefaultDepth);

void check_v_range(long long v, int depth);

// Produces `k` starting centroids for one clustering step.
using CentroidInitializer = std::function<VectorSet(const VectorSet& points, int k)>;

struct EncodeOptions {
  ClusterOptions cluster;  // k is ignored; set per level to V
  // When set, each level runs a single Lloyd pass sequence from these
  // centroids instead of the seeded random restarts.
  CentroidInitializer initializer;
};

// The first k distinct points in input order, padded with repeats of the
// first point when fewer than k distinct points exist.
VectorSet first_distinct_points(const VectorSet& points, int k);

VVarCode encode(const PixelImage& img, int v, const EncodeOptions& opts = {});
PixelImage decode(const VVarCode& code);

// Traces one pixel from the root label down the extended code matrix.
std::uint8_t pixel_value(const VVarCode& code, const QuadAddress& addr);

// Code payload in bytes (labels bit-packed, leaves one byte each).
std::size_t payload_size(int v, int depth = kDefaultDepth);

// VVC1 container: "VVC1", version, depth, V (u32 big-endian), payload.
inline constexpr std::size_t kVvcHeaderSize = 10;
std::vector<std::uint8_t> serialize(const VVarCode& code);
VVarCode deserialize(std::span<const std::uint8_t> bytes);

// Number of pairwise different level-`level` pieces (exact pixel equality).
std::size_t distinct_block_count(const PixelImage& img, int level);

// Builds a code from the square-matrix layout used when V = 4^n0: 4V rows and
// depth - n0 columns, the last column holding gray values.
VVarCode code_from_matrix(const std::vector<std::vector<int>>& matrix, int depth = kDefaultDepth);

}  // namespace vvfc

#endif  // VVFC_VVAR_H_
