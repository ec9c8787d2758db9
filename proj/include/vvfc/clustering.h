#ifndef VVFC_CLUSTERING_H_
#define VVFC_CLUSTERING_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace vvfc {

// A list of equal-length real vectors stored row-major.
class VectorSet {
 public:
  VectorSet() = default;
  VectorSet(std::size_t count, std::size_t dim) : dim_(dim), values_(count * dim, 0.0) {}
  VectorSet(std::size_t dim, std::vector<double> values);
  // Throws InvalidArgument if the rows differ in length.
  static VectorSet FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return values_.empty(); }

  std::span<const double> operator[](std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {values_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> row);
  const std::vector<double>& values() const { return values_; }

  bool operator==(const VectorSet&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

struct ClusterOptions {
  int k = 1;
  int max_iterations = 100;
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct ClusterResult {
  std::vector<int> labels;  // 1..k, one per input vector
  VectorSet centroids;      // row j-1 is the centroid of label j
  double sse = 0.0;
  int iterations = 0;
};

// Seeded generator for initialization. std::mt19937_64 is fully specified by
// the standard; draws are mapped to ranges with uniform_below, not with the
// implementation-defined std distributions.
using ClusterRng = std::mt19937_64;
std::uint64_t uniform_below(ClusterRng& rng, std::uint64_t bound);
// `count` distinct indices from 0..n-1, uniformly without replacement.
std::vector<std::size_t> sample_without_replacement(ClusterRng& rng, std::size_t n, std::size_t count);

// Best of opts.restarts Lloyd runs, each started from k distinct input points
// chosen at random. Deterministic in (points, opts).
ClusterResult kmeans(const VectorSet& points, const ClusterOptions& opts);

// One Lloyd run from the given centroids. Runs until an assignment pass
// changes nothing or max_iterations passes have been made. When `sse_trace`
// is given it receives the objective after every pass.
ClusterResult lloyd(const VectorSet& points, VectorSet initial_centroids, int max_iterations,
                    std::vector<double>* sse_trace = nullptr);

// Renumbers clusters by first appearance in `labels`; clusters that own no
// point keep their relative order after the used ones.
ClusterResult canonicalize_labels(ClusterResult result);

double compute_sse(const VectorSet& points, std::span<const int> labels, const VectorSet& centroids);

}  // namespace vvfc

#endif  // VVFC_CLUSTERING_H_
