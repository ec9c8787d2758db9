#ifndef VVFC_FRACTALGEN_H_
#define VVFC_FRACTALGEN_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "vvfc/imaging.h"
#include "vvfc/vvar.h"

namespace vvfc {

// x -> a * x + b on the real line, |a| < 1.
struct Affine1D {
  double a = 0.0;
  double b = 0.0;

  Affine1D() = default;
  Affine1D(double a, double b);
  // Not a contraction; only used as the start of a composition chain.
  static Affine1D identity() {
    Affine1D f;
    f.a = 1.0;
    return f;
  }
  double operator()(double x) const { return a * x + b; }
  // (*this)(inner(x))
  Affine1D compose(const Affine1D& inner) const { return {a * inner.a, a * inner.b + b}; }
};

using Ifs = std::vector<Affine1D>;

// Indexed family of IFSs sharing the map count M; indices are 1-based.
class IfsFamily {
 public:
  explicit IfsFamily(std::vector<Ifs> systems);

  int map_count() const { return static_cast<int>(systems_.front().size()); }
  int size() const { return static_cast<int>(systems_.size()); }
  const Ifs& system(int label) const;

 private:
  std::vector<Ifs> systems_;
};

struct Interval {
  double lo;
  double hi;
  bool operator==(const Interval&) const = default;
};

// Sorted, disjoint closed intervals inside [0, 1].
using IntervalSet = std::vector<Interval>;

inline constexpr double kIntervalMergeTolerance = 1e-12;

// Sorts and merges overlapping or abutting (within tolerance) intervals.
IntervalSet merge_intervals(std::vector<Interval> intervals);
double total_length(const IntervalSet& set);
// True if every interval of `inner` lies inside some interval of `outer`.
bool contains(const IntervalSet& outer, const IntervalSet& inner, double tolerance = kIntervalMergeTolerance);

// Labels of an M-ary code tree, level k holding M^k labels in lexicographic
// address order.
struct CodeTreeLevels {
  int map_count = 2;
  std::vector<std::vector<int>> levels;

  int depth() const { return static_cast<int>(levels.size()); }
};

// (V*M) x n matrix of types; column k (1-based), row (L-1)*M + i gives the
// type of child i of a type-L node at level k-1. The root has type 1. Unused
// entries hold 0.
class SkeletonMatrix {
 public:
  SkeletonMatrix(int v, int map_count, int depth);
  // `rows` is the (V*M) x n grid as printed, 0 for unused entries.
  static SkeletonMatrix FromRows(const std::vector<std::vector<int>>& rows, int map_count);

  int v() const { return v_; }
  int map_count() const { return m_; }
  int depth() const { return depth_; }

  int at(int row, int column) const;  // 1-based
  void set(int row, int column, int type);
  // Throws if the entry is unused (0).
  int child_type(int column, int parent_type, int digit) const;

  // Types of the nodes on levels 0..depth(); level k has M^k entries.
  std::vector<std::vector<int>> propagate(int levels) const;

  std::vector<std::vector<int>> rows() const;

 private:
  int v_, m_, depth_;
  std::vector<int> entries_;  // row-major
};

// Row k (0-based) maps types 1..V to IFS labels (Q_k). Unused entries are 0.
class LabelMatrix {
 public:
  explicit LabelMatrix(std::vector<std::vector<int>> rows);

  int depth() const { return static_cast<int>(rows_.size()) - 1; }
  int types() const { return static_cast<int>(rows_.front().size()); }
  int label(int level, int type) const;

 private:
  std::vector<std::vector<int>> rows_;
};

IntervalSet attractor_intervals(const Ifs& ifs, int n);
IntervalSet code_tree_intervals(const IfsFamily& family, const CodeTreeLevels& tree, int n);
CodeTreeLevels expand_skeleton(const SkeletonMatrix& skeleton, const LabelMatrix& labels);
SkeletonMatrix random_skeleton(int v, int map_count, int depth, std::uint64_t seed);

// Colours each pixel of a 2^depth square by the gray value of its type at
// level `depth` (M must be 4).
PixelImage render_vvariable_square(const SkeletonMatrix& skeleton, std::span<const std::uint8_t> values,
                                   int depth);
// The V-variable code that decodes to render_vvariable_square's output.
VVarCode skeleton_to_code(const SkeletonMatrix& skeleton, std::span<const std::uint8_t> values, int depth);

// Number of distinct subtrees (truncated at the tree's last level) rooted at
// level k.
std::size_t distinct_subtrees(const CodeTreeLevels& tree, int level);

// The IFS of the middle-third Cantor set and the three-system family used in
// the code-tree demo.
Ifs cantor_ifs();
IfsFamily demo_family();
SkeletonMatrix demo_skeleton();
LabelMatrix demo_labels();

// Plain-text integer grids: whitespace-separated, one row per line.
std::vector<std::vector<int>> parse_int_grid(std::string_view text);
void write_int_grid(std::ostream& out, const std::vector<std::vector<int>>& grid);
// "lo,hi" per line with 17 significant digits.
void write_intervals_csv(std::ostream& out, const IntervalSet& set);

}  // namespace vvfc

#endif  // VVFC_FRACTALGEN_H_
