#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "litclass/embedding.hpp"
#include "litclass/matrix.hpp"

namespace litclass {

struct HdbscanConfig {
  std::size_t min_cluster_size = 15;
  std::optional<std::size_t> min_samples;  // defaults to min_cluster_size
  Metric metric = Metric::kEuclidean;

  std::size_t effective_min_samples() const { return min_samples.value_or(min_cluster_size); }
  void validate() const;
};

inline constexpr int kOutlier = -1;

// Per-point labels in {-1, 0..C-1}. Clusters are numbered by the first point
// (lowest index) that belongs to them.
struct ClusterLabels {
  std::vector<int> labels;
  int n_clusters = 0;
  std::vector<std::vector<int>> members;
  std::vector<bool> reassigned;  // label came from reassign_outliers

  static ClusterLabels from_labels(std::vector<int> labels);
  bool operator==(const ClusterLabels&) const = default;
};

struct CondensedCluster {
  int parent = -1;  // -1 for the root
  double lambda_birth = 0.0;
  double lambda_death = 0.0;
  std::size_t size = 0;
  double stability = 0.0;
  bool selected = false;
  int label = kOutlier;
  std::vector<int> children;
};

// Cluster tree after condensing by min_cluster_size; index 0 is the root.
// Each point records the cluster it leaves and the lambda (1 / distance) at
// which it leaves.
struct CondensedTree {
  std::vector<CondensedCluster> clusters;
  std::vector<int> point_cluster;
  std::vector<double> point_lambda;

  std::string to_json() const;
};

struct MstEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

// Lambda used for zero distances.
inline constexpr double kMaxLambda = 1e300;

Matrix pairwise_distances(const Matrix& points, Metric metric);

// Distance to the min_samples-th nearest other point.
std::vector<double> core_distances(const Matrix& points, std::size_t min_samples, Metric metric);
std::vector<double> core_distances_from(const Matrix& dist, std::size_t min_samples);

// max(core_i, core_j, d_ij); the diagonal holds core_i.
Matrix mutual_reachability(const Matrix& dist, const std::vector<double>& core);

// Prim's algorithm on a dense symmetric weight matrix starting from vertex 0;
// ties go to the lower vertex index. Edges are returned in insertion order.
std::vector<MstEdge> minimum_spanning_tree(const Matrix& weights);

struct HdbscanResult {
  ClusterLabels labels;
  CondensedTree tree;
  std::vector<MstEdge> mst;
  std::vector<std::string> warnings;
};

// Mutual reachability MST -> single linkage -> condensed tree -> excess of
// mass selection (the root is never selected). Links of equal height merge in
// one step, so the result does not depend on which minimum spanning tree is
// found when weights tie.
HdbscanResult hdbscan_fit(const Matrix& points, const HdbscanConfig& cfg);

double outlier_ratio(const std::vector<int>& labels);

inline constexpr double kDefaultReassignQuantile = 0.9;

// An outlier joins the cluster with the nearest centroid if its distance is at
// most the given quantile of that cluster's member-to-centroid distances.
// Centroids and quantiles use only members that were not themselves
// reassigned, which makes the operation idempotent.
ClusterLabels reassign_outliers(const ClusterLabels& labels, const Matrix& points,
                                double quantile = kDefaultReassignQuantile,
                                Metric metric = Metric::kEuclidean);

struct LabelTable {
  std::vector<std::string> doc_ids;
  std::vector<int> labels;
};

// CSV with header docid,label.
void write_labels_csv(const LabelTable& table, const std::filesystem::path& path);
LabelTable read_labels_csv(const std::filesystem::path& path);

}  // namespace litclass
