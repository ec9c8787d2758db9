#ifndef VVFC_TESTS_TEST_UTIL_H_
#define VVFC_TESTS_TEST_UTIL_H_

// Shared fixtures and independent oracles for the test binaries.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "vvfc/clustering.h"
#include "vvfc/fractalgen.h"
#include "vvfc/imaging.h"
#include "vvfc/vvar.h"

namespace vvfc::testing {

inline std::string data_path(const std::string& name) { return std::string(VVFC_TEST_DATA_DIR) + "/" + name; }

inline PixelImage random_image(int depth, std::uint32_t seed) {
  std::mt19937 rng(seed);
  PixelImage img(depth);
  for (auto& p : img.mutable_pixels()) p = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

// Low-frequency random image: sum of a few random cosines plus mild noise.
inline PixelImage smooth_image(int depth, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double fx[3], fy[3], ph[3];
  for (int i = 0; i < 3; ++i) {
    fx[i] = 0.5 + 3.0 * u(rng);
    fy[i] = 0.5 + 3.0 * u(rng);
    ph[i] = 6.283185307179586 * u(rng);
  }
  PixelImage img(depth);
  const int side = img.side();
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      double v = 128.0;
      for (int i = 0; i < 3; ++i) {
        v += 35.0 * std::cos(6.283185307179586 * (fx[i] * c + fy[i] * r) / side + ph[i]);
      }
      v += 10.0 * (u(rng) - 0.5);
      img.set(r, c, round_to_gray(v));
    }
  }
  return img;
}

// The 4-variable 512 x 512 example: 16 x 8 code matrix, V = 4, n0 = 1.
inline const std::vector<std::vector<int>>& four_var_matrix() {
  static const std::vector<std::vector<int>> m = {
      {1, 1, 4, 3, 3, 3, 2, 138}, {3, 2, 1, 2, 3, 3, 4, 138}, {1, 1, 4, 3, 3, 3, 2, 138},
      {3, 2, 1, 2, 3, 3, 4, 138}, {2, 2, 2, 4, 1, 4, 3, 33},  {2, 2, 3, 4, 1, 4, 3, 33},
      {2, 2, 2, 4, 1, 4, 3, 33},  {4, 2, 3, 4, 1, 4, 3, 33},  {1, 3, 1, 2, 1, 1, 1, 171},
      {3, 4, 1, 2, 1, 1, 1, 171}, {3, 3, 1, 2, 1, 1, 1, 171}, {2, 4, 1, 2, 1, 1, 1, 171},
      {2, 4, 3, 1, 2, 2, 3, 37},  {4, 2, 2, 1, 4, 2, 3, 37},  {4, 3, 3, 1, 2, 2, 3, 37},
      {4, 3, 2, 1, 4, 2, 3, 37},
  };
  return m;
}

inline const std::vector<std::uint8_t>& four_var_values() {
  static const std::vector<std::uint8_t> v = {138, 33, 171, 37};
  return v;
}

// Full 9-column skeleton of the example: a trivial first level, the seven
// label columns, then a leaf column giving every pixel its parent's type.
inline std::vector<std::vector<int>> four_var_skeleton_rows() {
  std::vector<std::vector<int>> rows;
  const auto& m = four_var_matrix();
  for (int r = 0; r < 16; ++r) {
    std::vector<int> row;
    row.push_back(r < 4 ? r + 1 : 0);
    for (int c = 0; c < 7; ++c) row.push_back(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    row.push_back(r / 4 + 1);
    rows.push_back(std::move(row));
  }
  return rows;
}

// Pixel (row, col) reached by applying the unit-square maps
// f_i(x, y) = (x, y) / 2 + offset_i with offsets (0,0), (0,1/2), (1/2,0),
// (1/2,1/2) along `addr`, y measured upward and row 0 at y = 1.
inline std::pair<int, int> unit_square_pixel(const QuadAddress& addr, int depth) {
  static const double kOffsets[4][2] = {{0.0, 0.0}, {0.0, 0.5}, {0.5, 0.0}, {0.5, 0.5}};
  // Compose the maps, innermost last: point = f_{i1}(f_{i2}(...(centre))).
  double x = 0.5, y = 0.5;
  for (std::size_t k = addr.length(); k-- > 0;) {
    const auto& off = kOffsets[addr[k] - 1];
    x = x / 2.0 + off[0];
    y = y / 2.0 + off[1];
  }
  const int side = 1 << depth;
  // Point is the centre of the addressed square; scale to the full grid.
  const double scale = static_cast<double>(side);
  const int col = static_cast<int>(std::floor(x * scale));
  const int row = side - 1 - static_cast<int>(std::floor(y * scale));
  return {row, col};
}

// Minimum SSE over all partitions of `points` into exactly k non-empty
// clusters, by enumeration of k^n labelings.
inline double brute_force_min_sse(const VectorSet& points, int k) {
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  std::vector<int> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[static_cast<std::size_t>(labels[i])];
      for (std::size_t d = 0; d < dim; ++d) sums[static_cast<std::size_t>(labels[i])][d] += points[i][d];
    }
    bool all_used = true;
    for (int c : counts) all_used = all_used && c > 0;
    if (all_used) {
      double sse = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = sums[static_cast<std::size_t>(labels[i])];
        const double cnt = counts[static_cast<std::size_t>(labels[i])];
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = points[i][d] - s[d] / cnt;
          sse += diff * diff;
        }
      }
      best = std::min(best, sse);
    }
    std::size_t pos = 0;
    while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

// A valid random code; labels uniform in 1..V.
inline VVarCode random_code(int v, int depth, std::uint32_t seed) {
  std::mt19937 rng(seed);
  VVarCode code;
  code.depth = depth;
  code.v = v;
  const int n0 = compute_n0(v, depth);
  auto label = [&] { return static_cast<int>(rng() % static_cast<std::uint32_t>(v)) + 1; };
  code.first_labels.resize(std::size_t{1} << (2 * (n0 + 1)));
  for (int& l : code.first_labels) l = label();
  for (int level = n0 + 2; level <= depth - 1; ++level) {
    std::vector<int> labels(4 * static_cast<std::size_t>(v));
    for (int& l : labels) l = label();
    code.level_labels.push_back(std::move(labels));
  }
  code.leaf_values.resize(4 * static_cast<std::size_t>(v));
  const auto gray = static_cast<std::uint8_t>(rng() & 0xFF);
  for (auto& g : code.leaf_values) g = v == 1 ? gray : static_cast<std::uint8_t>(rng() & 0xFF);
  return code;
}

}  // namespace vvfc::testing

#endif  // VVFC_TESTS_TEST_UTIL_H_
