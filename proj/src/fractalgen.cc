#include "vvfc/fractalgen.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "vvfc/clustering.h"
#include "vvfc/errors.h"

namespace vvfc {

namespace {

constexpr std::size_t kMaxEnumeratedPieces = std::size_t{1} << 24;

void check_keeps_unit_interval(const Affine1D& f) {
  const double lo = std::min(f(0.0), f(1.0));
  const double hi = std::max(f(0.0), f(1.0));
  if (lo < -kIntervalMergeTolerance || hi > 1.0 + kIntervalMergeTolerance) {
    throw InvalidArgument("map does not keep [0,1] inside [0,1]");
  }
}

std::size_t checked_power(std::size_t base, int exponent) {
  std::size_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > kMaxEnumeratedPieces / base) throw InvalidArgument("too many pieces to enumerate");
    result *= base;
  }
  return result;
}

Interval image_of_unit(const Affine1D& g) {
  const double x0 = g(0.0);
  const double x1 = g(1.0);
  return {std::min(x0, x1), std::max(x0, x1)};
}

}  // namespace

Affine1D::Affine1D(double a, double b) : a(a), b(b) {
  if (!(std::abs(a) < 1.0)) throw InvalidArgument("affine map is not a strict contraction");
}

IfsFamily::IfsFamily(std::vector<Ifs> systems) : systems_(std::move(systems)) {
  if (systems_.empty()) throw InvalidArgument("IFS family is empty");
  const std::size_t m = systems_.front().size();
  if (m < 2) throw InvalidArgument("an IFS needs at least two maps");
  for (const Ifs& ifs : systems_) {
    if (ifs.size() != m) throw InvalidArgument("IFSs in a family must share the map count");
  }
}

const Ifs& IfsFamily::system(int label) const {
  if (label < 1 || label > size()) throw InvalidArgument("IFS label " + std::to_string(label) + " out of range");
  return systems_[static_cast<std::size_t>(label - 1)];
}

IntervalSet merge_intervals(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi); });
  IntervalSet merged;
  for (const Interval& iv : intervals) {
    if (!merged.empty() && iv.lo <= merged.back().hi + kIntervalMergeTolerance) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

double total_length(const IntervalSet& set) {
  double sum = 0.0;
  for (const Interval& iv : set) sum += iv.hi - iv.lo;
  return sum;
}

bool contains(const IntervalSet& outer, const IntervalSet& inner, double tolerance) {
  return std::all_of(inner.begin(), inner.end(), [&](const Interval& iv) {
    return std::any_of(outer.begin(), outer.end(), [&](const Interval& o) {
      return o.lo <= iv.lo + tolerance && iv.hi <= o.hi + tolerance;
    });
  });
}

IntervalSet attractor_intervals(const Ifs& ifs, int n) {
  if (ifs.empty()) throw InvalidArgument("IFS has no maps");
  if (n < 0) throw InvalidArgument("level must be >= 0");
  for (const Affine1D& f : ifs) check_keeps_unit_interval(f);
  checked_power(ifs.size(), n);
  std::vector<Affine1D> maps = {Affine1D::identity()};
  for (int level = 0; level < n; ++level) {
    std::vector<Affine1D> next;
    next.reserve(maps.size() * ifs.size());
    for (const Affine1D& g : maps) {
      for (const Affine1D& f : ifs) next.push_back(g.compose(f));
    }
    maps = std::move(next);
  }
  std::vector<Interval> pieces;
  pieces.reserve(maps.size());
  for (const Affine1D& g : maps) pieces.push_back(image_of_unit(g));
  return merge_intervals(std::move(pieces));
}

IntervalSet code_tree_intervals(const IfsFamily& family, const CodeTreeLevels& tree, int n) {
  if (n < 0) throw InvalidArgument("level must be >= 0");
  if (n > tree.depth()) {
    throw InvalidArgument("code tree has " + std::to_string(tree.depth()) + " levels, " + std::to_string(n) +
                          " needed");
  }
  if (tree.map_count != family.map_count()) throw InvalidArgument("code tree arity differs from the IFS map count");
  for (int label = 1; label <= family.size(); ++label) {
    for (const Affine1D& f : family.system(label)) check_keeps_unit_interval(f);
  }
  const std::size_t m = static_cast<std::size_t>(family.map_count());
  checked_power(m, n);
  for (int k = 0; k < n; ++k) {
    if (tree.levels[static_cast<std::size_t>(k)].size() != checked_power(m, k)) {
      throw InvalidArgument("code tree level " + std::to_string(k) + " has the wrong node count");
    }
  }

  std::vector<Affine1D> maps = {Affine1D::identity()};
  for (int k = 0; k < n; ++k) {
    const auto& labels = tree.levels[static_cast<std::size_t>(k)];
    std::vector<Affine1D> next;
    next.reserve(maps.size() * m);
    for (std::size_t node = 0; node < maps.size(); ++node) {
      for (const Affine1D& f : family.system(labels[node])) next.push_back(maps[node].compose(f));
    }
    maps = std::move(next);
  }
  std::vector<Interval> pieces;
  pieces.reserve(maps.size());
  for (const Affine1D& g : maps) pieces.push_back(image_of_unit(g));
  return merge_intervals(std::move(pieces));
}

SkeletonMatrix::SkeletonMatrix(int v, int map_count, int depth) : v_(v), m_(map_count), depth_(depth) {
  if (v < 1 || map_count < 1 || depth < 1) throw InvalidArgument("skeleton needs V, M, depth >= 1");
  entries_.assign(static_cast<std::size_t>(v) * static_cast<std::size_t>(map_count) * static_cast<std::size_t>(depth),
                  0);
}

SkeletonMatrix SkeletonMatrix::FromRows(const std::vector<std::vector<int>>& rows, int map_count) {
  if (map_count < 1 || rows.empty() || rows.size() % static_cast<std::size_t>(map_count) != 0) {
    throw FormatError("skeleton matrix needs V*M rows");
  }
  const std::size_t columns = rows.front().size();
  if (columns == 0) throw FormatError("skeleton matrix has no columns");
  SkeletonMatrix s(static_cast<int>(rows.size()) / map_count, map_count, static_cast<int>(columns));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != columns) throw FormatError("skeleton matrix rows differ in length");
    for (std::size_t c = 0; c < columns; ++c) {
      const int type = rows[r][c];
      if (type < 0 || type > s.v()) {
        throw FormatError("skeleton entry " + std::to_string(type) + " outside 0.." + std::to_string(s.v()));
      }
      s.set(static_cast<int>(r) + 1, static_cast<int>(c) + 1, type);
    }
  }
  return s;
}

int SkeletonMatrix::at(int row, int column) const {
  if (row < 1 || row > v_ * m_ || column < 1 || column > depth_) throw InvalidArgument("skeleton index out of range");
  return entries_[static_cast<std::size_t>(row - 1) * static_cast<std::size_t>(depth_) +
                  static_cast<std::size_t>(column - 1)];
}

void SkeletonMatrix::set(int row, int column, int type) {
  if (row < 1 || row > v_ * m_ || column < 1 || column > depth_) throw InvalidArgument("skeleton index out of range");
  if (type < 0 || type > v_) throw InvalidArgument("skeleton type out of range");
  entries_[static_cast<std::size_t>(row - 1) * static_cast<std::size_t>(depth_) + static_cast<std::size_t>(column - 1)] =
      type;
}

int SkeletonMatrix::child_type(int column, int parent_type, int digit) const {
  const int type = at((parent_type - 1) * m_ + digit, column);
  if (type == 0) {
    throw FormatError("skeleton entry (row " + std::to_string((parent_type - 1) * m_ + digit) + ", column " +
                      std::to_string(column) + ") is unused but was reached");
  }
  return type;
}

std::vector<std::vector<int>> SkeletonMatrix::propagate(int levels) const {
  if (levels < 0 || levels > depth_) throw InvalidArgument("skeleton has too few columns");
  std::vector<std::vector<int>> types = {{1}};
  for (int k = 1; k <= levels; ++k) {
    std::vector<int> next;
    next.reserve(types.back().size() * static_cast<std::size_t>(m_));
    for (int parent : types.back()) {
      for (int i = 1; i <= m_; ++i) next.push_back(child_type(k, parent, i));
    }
    types.push_back(std::move(next));
  }
  return types;
}

std::vector<std::vector<int>> SkeletonMatrix::rows() const {
  std::vector<std::vector<int>> grid(static_cast<std::size_t>(v_ * m_));
  for (int r = 1; r <= v_ * m_; ++r) {
    for (int c = 1; c <= depth_; ++c) grid[static_cast<std::size_t>(r - 1)].push_back(at(r, c));
  }
  return grid;
}

LabelMatrix::LabelMatrix(std::vector<std::vector<int>> rows) : rows_(std::move(rows)) {
  if (rows_.empty() || rows_.front().empty()) throw InvalidArgument("label matrix is empty");
  for (const auto& row : rows_) {
    if (row.size() != rows_.front().size()) throw InvalidArgument("label matrix rows differ in length");
    for (int label : row) {
      if (label < 0) throw InvalidArgument("negative IFS label");
    }
  }
}

int LabelMatrix::label(int level, int type) const {
  if (level < 0 || level > depth() || type < 1 || type > types()) throw InvalidArgument("label index out of range");
  const int value = rows_[static_cast<std::size_t>(level)][static_cast<std::size_t>(type - 1)];
  if (value == 0) throw FormatError("unused label entry was reached");
  return value;
}

CodeTreeLevels expand_skeleton(const SkeletonMatrix& skeleton, const LabelMatrix& labels) {
  if (labels.depth() < skeleton.depth()) throw InvalidArgument("label matrix has fewer levels than the skeleton");
  if (labels.types() != skeleton.v()) throw InvalidArgument("label matrix width differs from V");
  CodeTreeLevels tree;
  tree.map_count = skeleton.map_count();
  const auto types = skeleton.propagate(skeleton.depth());
  for (std::size_t k = 0; k < types.size(); ++k) {
    std::vector<int> level;
    level.reserve(types[k].size());
    for (int t : types[k]) level.push_back(labels.label(static_cast<int>(k), t));
    tree.levels.push_back(std::move(level));
  }
  return tree;
}

SkeletonMatrix random_skeleton(int v, int map_count, int depth, std::uint64_t seed) {
  SkeletonMatrix s(v, map_count, depth);
  ClusterRng rng(seed);
  // Column-major draw order: one level at a time.
  for (int c = 1; c <= depth; ++c) {
    for (int r = 1; r <= v * map_count; ++r) s.set(r, c, static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(v))) + 1);
  }
  return s;
}

namespace {

class SquareRenderer {
 public:
  SquareRenderer(const SkeletonMatrix& s, std::span<const std::uint8_t> values, int depth)
      : s_(s), values_(values), depth_(depth), img_(depth) {}

  PixelImage Run() && {
    Fill(0, 0, 1 << depth_, 0, 1);
    return std::move(img_);
  }

 private:
  void Fill(int row, int col, int side, int level, int type) {
    if (level == depth_) {
      img_.set(row, col, values_[static_cast<std::size_t>(type - 1)]);
      return;
    }
    for (int digit = 1; digit <= 4; ++digit) {
      const QuadrantOffset off = quadrant_offset(digit, side);
      Fill(row + off.row, col + off.col, side / 2, level + 1, s_.child_type(level + 1, type, digit));
    }
  }

  const SkeletonMatrix& s_;
  std::span<const std::uint8_t> values_;
  int depth_;
  PixelImage img_;
};

void check_square_skeleton(const SkeletonMatrix& s, std::span<const std::uint8_t> values, int depth) {
  if (s.map_count() != 4) throw InvalidArgument("square rendering needs a 4-map skeleton");
  if (depth < 0 || depth > kMaxDepth) throw InvalidArgument("render depth out of range");
  if (s.depth() < depth) {
    throw InvalidArgument("skeleton has " + std::to_string(s.depth()) + " columns, " + std::to_string(depth) +
                          " needed");
  }
  if (values.size() != static_cast<std::size_t>(s.v())) throw InvalidArgument("need one gray value per type");
}

}  // namespace

PixelImage render_vvariable_square(const SkeletonMatrix& skeleton, std::span<const std::uint8_t> values, int depth) {
  check_square_skeleton(skeleton, values, depth);
  return SquareRenderer(skeleton, values, depth).Run();
}

VVarCode skeleton_to_code(const SkeletonMatrix& skeleton, std::span<const std::uint8_t> values, int depth) {
  check_square_skeleton(skeleton, values, depth);
  VVarCode code;
  code.depth = depth;
  code.v = skeleton.v();
  const int n0 = compute_n0(code.v, depth);
  code.first_labels = skeleton.propagate(n0 + 1).back();
  const int rows = 4 * code.v;
  for (int k = n0 + 2; k <= depth - 1; ++k) {
    std::vector<int> labels;
    for (int r = 1; r <= rows; ++r) labels.push_back(std::max(1, skeleton.at(r, k)));  // unused -> any valid type
    code.level_labels.push_back(std::move(labels));
  }
  for (int r = 1; r <= rows; ++r) {
    const int type = skeleton.at(r, depth);
    code.leaf_values.push_back(type == 0 ? 0 : values[static_cast<std::size_t>(type - 1)]);
  }
  return code;
}

std::size_t distinct_subtrees(const CodeTreeLevels& tree, int level) {
  if (level < 0 || level >= tree.depth()) throw InvalidArgument("level outside the code tree");
  const std::size_t m = static_cast<std::size_t>(tree.map_count);
  std::set<std::vector<int>> seen;
  const std::size_t nodes = tree.levels[static_cast<std::size_t>(level)].size();
  for (std::size_t node = 0; node < nodes; ++node) {
    std::vector<int> signature;
    std::size_t first = node, count = 1;
    for (std::size_t k = static_cast<std::size_t>(level); k < tree.levels.size(); ++k) {
      const auto& labels = tree.levels[k];
      signature.insert(signature.end(), labels.begin() + static_cast<std::ptrdiff_t>(first),
                       labels.begin() + static_cast<std::ptrdiff_t>(first + count));
      first *= m;
      count *= m;
    }
    seen.insert(std::move(signature));
  }
  return seen.size();
}

Ifs cantor_ifs() { return {Affine1D(1.0 / 3.0, 0.0), Affine1D(1.0 / 3.0, 2.0 / 3.0)}; }

IfsFamily demo_family() {
  return IfsFamily({{Affine1D(10.0 / 21.0, 0.0), Affine1D(10.0 / 21.0, 11.0 / 21.0)},
                    cantor_ifs(),
                    {Affine1D(0.1, 0.0), Affine1D(0.1, 0.9)}});
}

SkeletonMatrix demo_skeleton() { return SkeletonMatrix::FromRows({{1, 1, 1}, {2, 1, 2}, {0, 1, 1}, {0, 2, 2}}, 2); }

LabelMatrix demo_labels() { return LabelMatrix({{1, 0}, {2, 1}, {1, 3}, {2, 3}}); }

std::vector<std::vector<int>> parse_int_grid(std::string_view text) {
  std::vector<std::vector<int>> grid;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::vector<int> row;
    std::string token;
    while (tokens >> token) {
      int value = 0;
      const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || end != token.data() + token.size()) {
        throw FormatError("bad integer '" + token + "' in matrix text");
      }
      row.push_back(value);
    }
    if (row.empty()) continue;
    if (!grid.empty() && row.size() != grid.front().size()) throw FormatError("matrix rows differ in length");
    grid.push_back(std::move(row));
  }
  if (grid.empty()) throw FormatError("matrix text holds no rows");
  return grid;
}

void write_int_grid(std::ostream& out, const std::vector<std::vector<int>>& grid) {
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? " " : "") << row[c];
    out << '\n';
  }
}

void write_intervals_csv(std::ostream& out, const IntervalSet& set) {
  const auto old_precision = out.precision(17);
  for (const Interval& iv : set) out << iv.lo << ',' << iv.hi << '\n';
  out.precision(old_precision);
}

}  // namespace vvfc
