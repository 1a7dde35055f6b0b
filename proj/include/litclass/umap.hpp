#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "litclass/embedding.hpp"
#include "litclass/matrix.hpp"

namespace litclass {

struct UmapConfig {
  std::size_t n_neighbors = 8;  // neighbors per point, the point itself excluded
  std::size_t n_components = 8;
  double min_dist = 0.1;
  double spread = 1.0;
  Metric metric = Metric::kManhattan;
  int epochs = 500;
  int negative_sample_rate = 5;
  double learning_rate = 1.0;
  std::uint64_t seed = 0;

  // Throws InvalidArgument; pass the point count to check n_neighbors < n.
  void validate(std::size_t n_points = 0) const;
};

// Exact k nearest neighbors by brute force, self excluded, sorted by
// (distance, index).
struct KnnGraph {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<int> indices;       // n x k
  std::vector<double> distances;  // n x k

  int index(std::size_t i, std::size_t j) const { return indices[i * k + j]; }
  double dist(std::size_t i, std::size_t j) const { return distances[i * k + j]; }
  std::span<const double> row(std::size_t i) const { return {distances.data() + i * k, k}; }
};

KnnGraph knn(const Matrix& points, std::size_t k, Metric metric);

struct SmoothKnn {
  double rho = 0.0;    // smallest positive neighbor distance
  double sigma = 1.0;  // bandwidth
  double residual = 0.0;  // |sum_j exp(-max(0, d_j - rho) / sigma) - log2(k)|
  bool degenerate = false;  // the target sum is unreachable
};

inline constexpr int kSmoothKnnIterations = 64;
inline constexpr double kSmoothKnnTolerance = 1e-5;
inline constexpr double kMinSigmaScale = 1e-3;

// Bandwidth calibration over ascending neighbor distances (k = size). Sigma is
// binary-searched so the membership sum equals log2(k), then floored at 1e-3
// times the mean distance (or `fallback_mean` when every distance is zero).
SmoothKnn smooth_knn(std::span<const double> distances, double fallback_mean = 1.0);

struct WeightedEdge {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

// Symmetric fuzzy graph stored as undirected edges (from < to), weights in (0, 1].
struct FuzzyGraph {
  std::size_t n = 0;
  std::vector<double> rho;
  std::vector<double> sigma;
  std::vector<bool> degenerate;
  std::vector<WeightedEdge> edges;  // sorted by (from, to)

  double weight(int i, int j) const;
};

// Probabilistic t-conorm a_ij = w_ij + w_ji - w_ij w_ji over directed edges.
// Zero-weight results are dropped.
FuzzyGraph fuzzy_union(std::size_t n, const std::vector<WeightedEdge>& directed);

// Directed memberships exp(-max(0, d_ij - rho_i) / sigma_i) followed by the union.
FuzzyGraph fuzzy_simplicial_set(const KnnGraph& knn);

struct CurveParams {
  double a = 0.0;
  double b = 0.0;
  double rmse = 0.0;
};

// Least-squares fit of 1 / (1 + a d^(2b)) to the target curve that is 1 below
// min_dist and exp(-(d - min_dist) / spread) beyond, sampled at 300 points on
// [0, 3 spread]. Throws Error with the residual when the fit does not converge.
CurveParams fit_ab(double min_dist, double spread);

// Stochastic gradient layout of the graph in n_components dimensions.
Matrix optimize_layout(const FuzzyGraph& graph, const UmapConfig& cfg, const CurveParams& curve);

// knn -> fuzzy_simplicial_set -> fit_ab -> optimize_layout.
Matrix umap_reduce(const Matrix& points, const UmapConfig& cfg);

}  // namespace litclass
