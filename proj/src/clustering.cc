#include "vvfc/clustering.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vvfc/errors.h"

namespace vvfc {

VectorSet::VectorSet(std::size_t dim, std::vector<double> values) : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 ? !values_.empty() : values_.size() % dim_ != 0) {
    throw InvalidArgument("VectorSet: value count is not a multiple of the dimension");
  }
}

VectorSet VectorSet::FromRows(const std::vector<std::vector<double>>& rows) {
  VectorSet set;
  for (const auto& row : rows) set.push_back(row);
  return set;
}

void VectorSet::push_back(std::span<const double> row) {
  if (values_.empty() && dim_ == 0) {
    dim_ = row.size();
  } else if (row.size() != dim_) {
    throw InvalidArgument("vector of dimension " + std::to_string(row.size()) +
                          " added to a set of dimension " + std::to_string(dim_));
  }
  values_.insert(values_.end(), row.begin(), row.end());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return sum;
}

std::uint64_t uniform_below(ClusterRng& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_below: empty range");
  // Rejection sampling; the accepted range is a multiple of `bound`.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::vector<std::size_t> sample_without_replacement(ClusterRng& rng, std::size_t n, std::size_t count) {
  if (count > n) throw InvalidArgument("cannot sample more items than available");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Squared distance, abandoned once the running sum reaches `bound`. The
// returned value is then a lower bound of the true distance that is >= bound.
double partial_squared_distance(const double* a, const double* b, std::size_t dim, double bound) {
  double sum = 0.0;
  std::size_t d = 0;
  while (d < dim) {
    const std::size_t end = std::min(dim, d + 16);
    for (; d < end; ++d) {
      const double diff = a[d] - b[d];
      sum += diff * diff;
    }
    if (sum >= bound) break;
  }
  return sum;
}

// Lloyd's algorithm with Hamerly's distance bounds. The bounds only skip
// points whose current centroid is provably the unique nearest one, so the
// assignments (including lowest-index tie-breaking) are those of plain Lloyd.
class HamerlyLloyd {
 public:
  HamerlyLloyd(const VectorSet& points, VectorSet centroids)
      : points_(points),
        centroids_(std::move(centroids)),
        n_(points.size()),
        k_(centroids_.size()),
        dim_(points.dim()),
        assign_(n_, 0),
        upper_(n_, 0.0),
        lower_(n_, 0.0),
        counts_(k_, 0),
        half_gap_(k_, 0.0) {}

  ClusterResult Run(int max_iterations, std::vector<double>* trace) {
    int iterations = 0;
    for (int it = 0; it < max_iterations; ++it) {
      bool changed = it == 0 ? FullAssign() : BoundedAssign();
      changed = RepairEmpty() || changed;
      if (!changed) break;
      UpdateCentroids();
      ++iterations;
      if (trace) trace->push_back(compute_sse_internal());
    }
    ClusterResult result;
    result.labels.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) result.labels[i] = static_cast<int>(assign_[i]) + 1;
    result.centroids = std::move(centroids_);
    result.sse = compute_sse(points_, result.labels, result.centroids);
    result.iterations = iterations;
    return result;
  }

 private:
  static constexpr double kSlack = 1e-9;

  double compute_sse_internal() const {
    double sse = 0.0;
    for (std::size_t i = 0; i < n_; ++i) sse += squared_distance(points_[i], centroids_[assign_[i]]);
    return sse;
  }

  // Exact nearest centroid (lowest index on ties) plus a lower bound on the
  // distance to every other centroid. Returns true if the assignment moved.
  bool ScanPoint(std::size_t i) {
    const double* x = points_[i].data();
    double best = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < k_; ++j) {
      const double d = partial_squared_distance(x, centroids_[j].data(), dim_, second);
      if (d >= second) continue;
      if (d < best) {
        second = best;
        best = d;
        best_j = j;
      } else {
        second = d;
      }
    }
    const bool moved = assign_[i] != best_j;
    assign_[i] = best_j;
    upper_[i] = std::sqrt(best);
    lower_[i] = std::sqrt(second);
    return moved;
  }

  bool FullAssign() {
    for (std::size_t i = 0; i < n_; ++i) ScanPoint(i);
    return true;
  }

  bool BoundedAssign() {
    ComputeHalfGaps();
    bool changed = false;
    for (std::size_t i = 0; i < n_; ++i) {
      const double threshold = std::max(half_gap_[assign_[i]], lower_[i]);
      if (upper_[i] * (1.0 + kSlack) + kSlack < threshold) continue;
      upper_[i] = std::sqrt(squared_distance(points_[i], centroids_[assign_[i]]));
      if (upper_[i] * (1.0 + kSlack) + kSlack < threshold) continue;
      changed = ScanPoint(i) || changed;
    }
    return changed;
  }

  void ComputeHalfGaps() {
    std::fill(half_gap_.begin(), half_gap_.end(), std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < k_; ++a) {
      for (std::size_t b = a + 1; b < k_; ++b) {
        const double d = std::sqrt(squared_distance(centroids_[a], centroids_[b]));
        half_gap_[a] = std::min(half_gap_[a], d);
        half_gap_[b] = std::min(half_gap_[b], d);
      }
    }
    for (double& g : half_gap_) g *= 0.5;
  }

  // Gives every empty cluster the point farthest from its current centroid,
  // taken from clusters that keep at least one other member.
  bool RepairEmpty() {
    std::fill(counts_.begin(), counts_.end(), 0);
    for (std::size_t a : assign_) ++counts_[a];
    if (std::find(counts_.begin(), counts_.end(), 0) == counts_.end()) return false;

    std::vector<double> dist(n_);
    for (std::size_t i = 0; i < n_; ++i) dist[i] = squared_distance(points_[i], centroids_[assign_[i]]);
    for (std::size_t j = 0; j < k_; ++j) {
      if (counts_[j] != 0) continue;
      std::size_t pick = n_;
      for (std::size_t i = 0; i < n_; ++i) {
        if (counts_[assign_[i]] < 2) continue;
        if (pick == n_ || dist[i] > dist[pick]) pick = i;
      }
      --counts_[assign_[pick]];
      assign_[pick] = j;
      counts_[j] = 1;
      dist[pick] = 0.0;
      repaired_.push_back(pick);
    }
    return true;
  }

  void UpdateCentroids() {
    VectorSet sums(k_, dim_);
    std::fill(counts_.begin(), counts_.end(), 0);
    for (std::size_t i = 0; i < n_; ++i) {
      auto row = sums[assign_[i]];
      const auto x = points_[i];
      for (std::size_t d = 0; d < dim_; ++d) row[d] += x[d];
      ++counts_[assign_[i]];
    }
    std::vector<double> moved(k_, 0.0);
    for (std::size_t j = 0; j < k_; ++j) {
      auto row = sums[j];
      const double inv = 1.0 / static_cast<double>(counts_[j]);
      for (std::size_t d = 0; d < dim_; ++d) row[d] *= inv;
      moved[j] = std::sqrt(squared_distance(row, centroids_[j]));
    }
    centroids_ = std::move(sums);

    std::size_t far = 0;
    for (std::size_t j = 1; j < k_; ++j) {
      if (moved[j] > moved[far]) far = j;
    }
    double second_far = 0.0;
    for (std::size_t j = 0; j < k_; ++j) {
      if (j != far) second_far = std::max(second_far, moved[j]);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      upper_[i] += moved[assign_[i]];
      lower_[i] -= assign_[i] == far ? second_far : moved[far];
    }
    for (std::size_t i : repaired_) {
      upper_[i] = 0.0;
      lower_[i] = 0.0;
    }
    repaired_.clear();
  }

  const VectorSet& points_;
  VectorSet centroids_;
  std::size_t n_, k_, dim_;
  std::vector<std::size_t> assign_;
  std::vector<double> upper_, lower_;
  std::vector<std::size_t> counts_;
  std::vector<double> half_gap_;
  std::vector<std::size_t> repaired_;
};

}  // namespace

double compute_sse(const VectorSet& points, std::span<const int> labels, const VectorSet& centroids) {
  if (labels.size() != points.size()) throw InvalidArgument("label count differs from point count");
  double sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int label = labels[i];
    if (label < 1 || static_cast<std::size_t>(label) > centroids.size()) {
      throw InvalidArgument("label out of range");
    }
    sse += squared_distance(points[i], centroids[static_cast<std::size_t>(label - 1)]);
  }
  return sse;
}

ClusterResult lloyd(const VectorSet& points, VectorSet initial_centroids, int max_iterations,
                    std::vector<double>* sse_trace) {
  if (points.empty()) throw InvalidArgument("k-means needs at least one point");
  if (initial_centroids.empty() || initial_centroids.size() > points.size()) {
    throw InvalidArgument("k-means needs 1 <= k <= number of points");
  }
  if (initial_centroids.dim() != points.dim()) {
    throw InvalidArgument("centroid dimension differs from point dimension");
  }
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  return HamerlyLloyd(points, std::move(initial_centroids)).Run(max_iterations, sse_trace);
}

ClusterResult kmeans(const VectorSet& points, const ClusterOptions& opts) {
  if (opts.k < 1) throw InvalidArgument("k must be >= 1");
  if (opts.restarts < 1) throw InvalidArgument("restarts must be >= 1");
  if (points.empty()) throw InvalidArgument("k-means needs at least one point");
  if (static_cast<std::size_t>(opts.k) > points.size()) {
    throw InvalidArgument("k = " + std::to_string(opts.k) + " exceeds the number of points (" +
                          std::to_string(points.size()) + ")");
  }
  ClusterResult best;
  bool have_best = false;
  for (int r = 0; r < opts.restarts; ++r) {
    ClusterRng rng(splitmix64(opts.seed + static_cast<std::uint64_t>(r)));
    const auto picks = sample_without_replacement(rng, points.size(), static_cast<std::size_t>(opts.k));
    VectorSet init;
    for (std::size_t idx : picks) init.push_back(points[idx]);
    ClusterResult run = lloyd(points, std::move(init), opts.max_iterations);
    if (!have_best || run.sse < best.sse) {
      best = std::move(run);
      have_best = true;
    }
  }
  return best;
}

ClusterResult canonicalize_labels(ClusterResult result) {
  const std::size_t k = result.centroids.size();
  std::vector<int> new_of_old(k, 0);
  std::vector<std::size_t> order;
  order.reserve(k);
  for (int label : result.labels) {
    auto& slot = new_of_old[static_cast<std::size_t>(label - 1)];
    if (slot == 0) {
      order.push_back(static_cast<std::size_t>(label - 1));
      slot = static_cast<int>(order.size());
    }
  }
  for (std::size_t old = 0; old < k; ++old) {
    if (new_of_old[old] == 0) {
      order.push_back(old);
      new_of_old[old] = static_cast<int>(order.size());
    }
  }
  for (int& label : result.labels) label = new_of_old[static_cast<std::size_t>(label - 1)];
  VectorSet centroids;
  for (std::size_t old : order) centroids.push_back(result.centroids[old]);
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace vvfc
