#include "litclass/hdbscan.hpp"

#include <algorithm>
#include <fstream>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "litclass/csv.hpp"
#include "litclass/error.hpp"

namespace litclass {
namespace {

double to_lambda(double d) { return d > 0 ? std::min(1.0 / d, kMaxLambda) : kMaxLambda; }

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

// Single-linkage hierarchy whose internal nodes may have more than two
// children when several links share a height.
struct LinkageNode {
  double distance = 0.0;
  std::size_t size = 1;
  std::vector<int> children;  // empty for points
};

std::vector<LinkageNode> build_linkage(std::size_t n, std::vector<MstEdge> edges) {
  std::stable_sort(edges.begin(), edges.end(),
                   [](const MstEdge& a, const MstEdge& b) { return a.weight < b.weight; });
  std::vector<LinkageNode> nodes(n);
  DisjointSet sets(n);
  std::vector<int> node_of(n);
  std::iota(node_of.begin(), node_of.end(), 0);

  for (std::size_t start = 0; start < edges.size();) {
    std::size_t end = start;
    while (end < edges.size() && edges[end].weight == edges[start].weight) ++end;
    // Component roots before this height, grouped by their root after it.
    std::vector<int> old_roots;
    for (std::size_t e = start; e < end; ++e) {
      old_roots.push_back(sets.find(edges[e].u));
      old_roots.push_back(sets.find(edges[e].v));
    }
    std::sort(old_roots.begin(), old_roots.end());
    old_roots.erase(std::unique(old_roots.begin(), old_roots.end()), old_roots.end());
    std::vector<int> old_nodes;
    for (int r : old_roots) old_nodes.push_back(node_of[r]);
    for (std::size_t e = start; e < end; ++e) sets.unite(edges[e].u, edges[e].v);

    std::map<int, std::vector<int>> merged;
    for (std::size_t i = 0; i < old_roots.size(); ++i) {
      merged[sets.find(old_roots[i])].push_back(old_nodes[i]);
    }
    for (auto& [root, kids] : merged) {
      if (kids.size() < 2) continue;
      std::sort(kids.begin(), kids.end());
      LinkageNode node;
      node.distance = edges[start].weight;
      node.size = 0;
      for (int k : kids) node.size += nodes[k].size;
      node.children = std::move(kids);
      node_of[root] = static_cast<int>(nodes.size());
      nodes.push_back(std::move(node));
    }
    start = end;
  }
  return nodes;
}

void collect_points(const std::vector<LinkageNode>& nodes, int id, std::vector<int>& out) {
  std::vector<int> stack{id};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    if (nodes[cur].children.empty()) {
      out.push_back(cur);
    } else {
      for (int c : nodes[cur].children) stack.push_back(c);
    }
  }
}

CondensedTree condense(const std::vector<LinkageNode>& nodes, std::size_t n_points,
                       std::size_t min_cluster_size) {
  CondensedTree tree;
  tree.point_cluster.assign(n_points, 0);
  tree.point_lambda.assign(n_points, 0.0);
  CondensedCluster root;
  root.size = n_points;
  tree.clusters.push_back(root);

  const int top = static_cast<int>(nodes.size()) - 1;
  std::vector<std::pair<int, int>> stack{{top, 0}};  // (linkage node, condensed cluster)
  std::vector<int> pts;
  auto fall_out = [&](int node, int cluster, double lambda) {
    pts.clear();
    collect_points(nodes, node, pts);
    for (int p : pts) {
      tree.point_cluster[p] = cluster;
      tree.point_lambda[p] = lambda;
    }
  };

  while (!stack.empty()) {
    auto [node_id, cluster] = stack.back();
    stack.pop_back();
    const auto& node = nodes[node_id];
    if (node.children.empty()) {  // a lone point as the whole tree
      fall_out(node_id, cluster, tree.clusters[cluster].lambda_birth);
      continue;
    }
    const double lambda = to_lambda(node.distance);
    std::vector<int> big;
    for (int c : node.children) {
      if (nodes[c].size >= min_cluster_size) big.push_back(c);
    }
    for (int c : node.children) {
      if (nodes[c].size < min_cluster_size) fall_out(c, cluster, lambda);
    }
    if (big.size() >= 2) {
      // Push in reverse so the lowest child is processed (and numbered) first.
      std::vector<std::pair<int, int>> pending;
      for (int c : big) {
        CondensedCluster child;
        child.parent = cluster;
        child.lambda_birth = lambda;
        child.size = nodes[c].size;
        tree.clusters[cluster].children.push_back(static_cast<int>(tree.clusters.size()));
        pending.push_back({c, static_cast<int>(tree.clusters.size())});
        tree.clusters.push_back(child);
      }
      for (auto it = pending.rbegin(); it != pending.rend(); ++it) stack.push_back(*it);
      tree.clusters[cluster].lambda_death = lambda;
    } else if (big.size() == 1) {
      stack.push_back({big[0], cluster});
    } else {
      tree.clusters[cluster].lambda_death = lambda;
    }
  }

  // Stability: sum over members of (lambda at exit - lambda at birth).
  for (std::size_t p = 0; p < n_points; ++p) {
    auto& c = tree.clusters[tree.point_cluster[p]];
    c.stability += tree.point_lambda[p] - c.lambda_birth;
    c.lambda_death = std::max(c.lambda_death, tree.point_lambda[p]);
  }
  for (std::size_t i = 1; i < tree.clusters.size(); ++i) {
    auto& parent = tree.clusters[tree.clusters[i].parent];
    parent.stability +=
        static_cast<double>(tree.clusters[i].size) * (tree.clusters[i].lambda_birth - parent.lambda_birth);
  }
  return tree;
}

void select_clusters(CondensedTree& tree) {
  const std::size_t m = tree.clusters.size();
  std::vector<double> best(m);
  for (std::size_t i = 0; i < m; ++i) best[i] = tree.clusters[i].stability;
  for (std::size_t i = 1; i < m; ++i) tree.clusters[i].selected = true;

  // Children are created after their parent, so reverse order is bottom-up.
  for (std::size_t i = m; i-- > 1;) {
    auto& c = tree.clusters[i];
    if (c.children.empty()) continue;
    double subtree = 0.0;
    for (int ch : c.children) subtree += best[ch];
    if (subtree > c.stability) {
      c.selected = false;
      best[i] = subtree;
    } else {
      std::vector<int> stack(c.children.begin(), c.children.end());
      while (!stack.empty()) {
        int d = stack.back();
        stack.pop_back();
        tree.clusters[d].selected = false;
        for (int g : tree.clusters[d].children) stack.push_back(g);
      }
    }
  }
}

double quantile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string json_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void HdbscanConfig::validate() const {
  if (min_cluster_size < 2) throw InvalidArgument("hdbscan: min_cluster_size must be >= 2");
  if (min_samples && *min_samples < 1) throw InvalidArgument("hdbscan: min_samples must be >= 1");
}

ClusterLabels ClusterLabels::from_labels(std::vector<int> labels) {
  ClusterLabels out;
  int max_label = -1;
  for (int l : labels) {
    if (l < kOutlier) throw InvalidArgument("cluster labels must be >= -1");
    max_label = std::max(max_label, l);
  }
  out.n_clusters = max_label + 1;
  out.members.assign(static_cast<std::size_t>(out.n_clusters), {});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) out.members[labels[i]].push_back(static_cast<int>(i));
  }
  out.reassigned.assign(labels.size(), false);
  out.labels = std::move(labels);
  return out;
}

Matrix pairwise_distances(const Matrix& points, Metric metric) {
  const std::size_t n = points.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) d(i, j) = d(j, i) = distance(points.row(i), points.row(j), metric);
  }
  return d;
}

std::vector<double> core_distances_from(const Matrix& dist, std::size_t min_samples) {
  const std::size_t n = dist.rows();
  if (min_samples < 1 || min_samples >= n) throw InvalidArgument("core_distances: require 1 <= min_samples < n");
  std::vector<double> core(n);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(dist(i, j));
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(min_samples - 1), row.end());
    core[i] = row[min_samples - 1];
  }
  return core;
}

std::vector<double> core_distances(const Matrix& points, std::size_t min_samples, Metric metric) {
  return core_distances_from(pairwise_distances(points, metric), min_samples);
}

Matrix mutual_reachability(const Matrix& dist, const std::vector<double>& core) {
  const std::size_t n = dist.rows();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = core[i];
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = std::max({core[i], core[j], dist(i, j)});
  }
  return m;
}

std::vector<MstEdge> minimum_spanning_tree(const Matrix& w) {
  const std::size_t n = w.rows();
  std::vector<MstEdge> edges;
  if (n < 2) return edges;
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> from(n, 0);
  int current = 0;
  in_tree[0] = true;
  for (std::size_t added = 1; added < n; ++added) {
    int next = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_tree[j]) continue;
      if (w(current, j) < best[j]) {
        best[j] = w(current, j);
        from[j] = current;
      }
      if (next < 0 || best[j] < best[next]) next = static_cast<int>(j);
    }
    in_tree[next] = true;
    edges.push_back({from[next], next, best[next]});
    current = next;
  }
  return edges;
}

HdbscanResult hdbscan_fit(const Matrix& points, const HdbscanConfig& cfg) {
  cfg.validate();
  const std::size_t n = points.rows();
  HdbscanResult result;
  if (n < cfg.min_cluster_size || n < 2) {
    result.warnings.push_back("hdbscan: " + std::to_string(n) + " points is fewer than min_cluster_size " +
                              std::to_string(cfg.min_cluster_size) + "; every point is an outlier");
    result.labels = ClusterLabels::from_labels(std::vector<int>(n, kOutlier));
    return result;
  }
  std::size_t min_samples = cfg.effective_min_samples();
  if (min_samples >= n) {
    result.warnings.push_back("hdbscan: min_samples clamped to " + std::to_string(n - 1));
    min_samples = n - 1;
  }
  const Matrix dist = pairwise_distances(points, cfg.metric);
  const Matrix mreach = mutual_reachability(dist, core_distances_from(dist, min_samples));
  result.mst = minimum_spanning_tree(mreach);
  result.tree = condense(build_linkage(n, result.mst), n, cfg.min_cluster_size);
  select_clusters(result.tree);

  std::vector<int> raw(n, kOutlier);
  for (std::size_t p = 0; p < n; ++p) {
    for (int c = result.tree.point_cluster[p]; c > 0; c = result.tree.clusters[c].parent) {
      if (result.tree.clusters[c].selected) {
        raw[p] = c;
        break;
      }
    }
  }
  std::map<int, int> canonical;
  std::vector<int> labels(n, kOutlier);
  for (std::size_t p = 0; p < n; ++p) {
    if (raw[p] == kOutlier) continue;
    auto [it, inserted] = canonical.emplace(raw[p], static_cast<int>(canonical.size()));
    labels[p] = it->second;
  }
  for (const auto& [cluster, label] : canonical) result.tree.clusters[cluster].label = label;
  result.labels = ClusterLabels::from_labels(std::move(labels));
  return result;
}

double outlier_ratio(const std::vector<int>& labels) {
  if (labels.empty()) return 0.0;
  const auto outliers = std::count(labels.begin(), labels.end(), kOutlier);
  return static_cast<double>(outliers) / static_cast<double>(labels.size());
}

ClusterLabels reassign_outliers(const ClusterLabels& in, const Matrix& points, double quantile,
                                Metric metric) {
  if (!(quantile >= 0.0 && quantile <= 1.0)) throw InvalidArgument("reassign: quantile must be in [0, 1]");
  if (points.rows() != in.labels.size()) throw InvalidArgument("reassign: label/point count mismatch");
  ClusterLabels out = in;
  if (out.reassigned.size() != out.labels.size()) out.reassigned.assign(out.labels.size(), false);
  if (in.n_clusters == 0) return out;

  const std::size_t dim = points.cols();
  Matrix centroids(static_cast<std::size_t>(in.n_clusters), dim);
  std::vector<double> radius(static_cast<std::size_t>(in.n_clusters), -1.0);
  for (int c = 0; c < in.n_clusters; ++c) {
    std::vector<int> core;
    for (int p : in.members[c]) {
      if (!out.reassigned[p]) core.push_back(p);
    }
    if (core.empty()) continue;
    auto centroid = centroids.row(c);
    for (int p : core) {
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += points(p, d);
    }
    for (double& v : centroid) v /= static_cast<double>(core.size());
    std::vector<double> dists;
    for (int p : core) dists.push_back(distance(points.row(p), centroid, metric));
    radius[c] = quantile_of(std::move(dists), quantile);
  }

  for (std::size_t p = 0; p < in.labels.size(); ++p) {
    if (in.labels[p] != kOutlier) continue;
    int nearest = -1;
    double nearest_d = 0.0;
    for (int c = 0; c < in.n_clusters; ++c) {
      if (radius[c] < 0) continue;
      const double d = distance(points.row(p), centroids.row(c), metric);
      if (nearest < 0 || d < nearest_d) {
        nearest = c;
        nearest_d = d;
      }
    }
    if (nearest >= 0 && nearest_d <= radius[nearest]) {
      out.labels[p] = nearest;
      out.members[nearest].push_back(static_cast<int>(p));
      out.reassigned[p] = true;
    }
  }
  for (auto& m : out.members) std::sort(m.begin(), m.end());
  return out;
}

std::string CondensedTree::to_json() const {
  std::ostringstream os;
  os << "{\"clusters\":[";
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& c = clusters[i];
    if (i) os << ',';
    os << "{\"id\":" << i << ",\"parent\":" << c.parent << ",\"lambda_birth\":" << json_number(c.lambda_birth)
       << ",\"lambda_death\":" << json_number(c.lambda_death) << ",\"size\":" << c.size
       << ",\"stability\":" << json_number(c.stability) << ",\"selected\":" << (c.selected ? "true" : "false")
       << ",\"label\":" << c.label << ",\"children\":[";
    for (std::size_t j = 0; j < c.children.size(); ++j) os << (j ? "," : "") << c.children[j];
    os << "]}";
  }
  os << "],\"points\":[";
  for (std::size_t p = 0; p < point_cluster.size(); ++p) {
    if (p) os << ',';
    os << "{\"cluster\":" << point_cluster[p] << ",\"lambda\":" << json_number(point_lambda[p]) << '}';
  }
  os << "]}";
  return os.str();
}

void write_labels_csv(const LabelTable& table, const std::filesystem::path& path) {
  if (table.doc_ids.size() != table.labels.size()) throw InvalidArgument("labels: id/label count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  csv::write_row(out, {"docid", "label"});
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    csv::write_row(out, {table.doc_ids[i], std::to_string(table.labels[i])});
  }
}

LabelTable read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row != std::vector<std::string>{"docid", "label"}) {
    throw ParseError(path.string() + ":1: expected header docid,label");
  }
  LabelTable table;
  while (reader.next(row)) {
    const std::string where = path.string() + ":" + std::to_string(reader.line()) + ": ";
    if (row.size() != 2) throw ParseError(where + "expected 2 fields");
    std::size_t used = 0;
    int label = 0;
    try {
      label = std::stoi(row[1], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != row[1].size() || label < kOutlier) throw ParseError(where + "bad label '" + row[1] + "'");
    table.doc_ids.push_back(row[0]);
    table.labels.push_back(label);
  }
  return table;
}

}  // namespace litclass
