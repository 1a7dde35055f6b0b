#include "litclass/topics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "litclass/error.hpp"

namespace litclass {
namespace {

using Json = nlohmann::ordered_json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int count_classes(const std::vector<int>& labels) {
  int c = 0;
  for (int l : labels) c = std::max(c, l + 1);
  return c;
}

double kl_half(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double m = 0.5 * (p[i] + q[i]);
    s += p[i] * std::log2(p[i] / m);
  }
  return s;
}

}  // namespace

Matrix class_term_counts(const BowCorpus& docs, const std::vector<int>& labels, int n_classes) {
  if (labels.size() != docs.docs.size()) throw InvalidArgument("class_term_counts: label/document count mismatch");
  Matrix counts(static_cast<std::size_t>(n_classes), docs.vocab_size);
  for (std::size_t d = 0; d < labels.size(); ++d) {
    if (labels[d] < 0) continue;
    if (labels[d] >= n_classes) throw InvalidArgument("class_term_counts: label out of range");
    for (const auto& tc : docs.docs[d]) counts(labels[d], tc.id) += tc.count;
  }
  return counts;
}

CtfidfMatrix ctfidf(const Matrix& counts) {
  const std::size_t C = counts.rows(), T = counts.cols();
  CtfidfMatrix out;
  out.weights = Matrix(C, T);
  out.class_totals.assign(C, 0.0);
  out.empty.assign(C, false);
  std::vector<double> f(T, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t t = 0; t < T; ++t) {
      if (counts(c, t) < 0) throw InvalidArgument("ctfidf: negative count");
      out.class_totals[c] += counts(c, t);
      f[t] += counts(c, t);
    }
    out.empty[c] = out.class_totals[c] == 0.0;
  }
  if (C == 0) return out;
  out.avg_total = std::accumulate(out.class_totals.begin(), out.class_totals.end(), 0.0) / static_cast<double>(C);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t t = 0; t < T; ++t) {
      if (counts(c, t) > 0) out.weights(c, t) = counts(c, t) * std::log(1.0 + out.avg_total / f[t]);
    }
  }
  return out;
}

SimilarityMatrix topic_similarity(const Matrix& v) {
  const std::size_t C = v.rows();
  SimilarityMatrix out;
  out.values = Matrix(C, C);
  out.flagged.assign(C, false);
  std::vector<double> norm(C, 0.0);
  for (std::size_t i = 0; i < C; ++i) {
    for (double x : v.row(i)) norm[i] += x * x;
    norm[i] = std::sqrt(norm[i]);
    out.flagged[i] = norm[i] == 0.0;
  }
  for (std::size_t i = 0; i < C; ++i) {
    out.values(i, i) = 1.0;
    for (std::size_t j = i + 1; j < C; ++j) {
      double s = 0.0;
      if (!out.flagged[i] && !out.flagged[j]) {
        const auto a = v.row(i), b = v.row(j);
        for (std::size_t t = 0; t < v.cols(); ++t) s += a[t] * b[t];
        s = std::clamp(s / (norm[i] * norm[j]), -1.0, 1.0);
      }
      out.values(i, j) = out.values(j, i) = s;
    }
  }
  return out;
}

Matrix topic_centroids(const Matrix& points, const std::vector<int>& labels, int n_classes) {
  if (labels.size() != points.rows()) throw InvalidArgument("topic_centroids: label/point count mismatch");
  Matrix out(static_cast<std::size_t>(n_classes), points.cols());
  std::vector<std::size_t> size(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (labels[p] < 0) continue;
    ++size[labels[p]];
    for (std::size_t d = 0; d < points.cols(); ++d) out(labels[p], d) += points(p, d);
  }
  for (int c = 0; c < n_classes; ++c) {
    if (size[c] == 0) continue;
    for (double& x : out.row(c)) x /= static_cast<double>(size[c]);
  }
  return out;
}

MergeResult merge_similar(const std::vector<int>& labels, const BowCorpus& docs, double threshold) {
  MergeResult out;
  out.labels = labels;
  out.n_topics = count_classes(labels);
  while (out.n_topics >= 2) {
    const auto sim = topic_similarity(ctfidf(class_term_counts(docs, out.labels, out.n_topics)).weights);
    int bi = -1, bj = -1;
    double best = 0.0;
    for (int i = 0; i < out.n_topics; ++i) {
      for (int j = i + 1; j < out.n_topics; ++j) {
        const double s = sim.values(i, j);
        if (s >= threshold && (bi < 0 || s > best)) {
          bi = i;
          bj = j;
          best = s;
        }
      }
    }
    if (bi < 0) break;
    for (int& l : out.labels) {
      if (l == bj) {
        l = bi;
      } else if (l > bj) {
        --l;
      }
    }
    --out.n_topics;
    out.log.push_back({bi, bj, best});
  }
  return out;
}

Dendrogram dendrogram(const Matrix& vectors) {
  const std::size_t n = vectors.rows();
  if (n < 2) throw InvalidArgument("dendrogram: need at least 2 topics");
  const auto sim = topic_similarity(vectors).values;
  // Distances between active nodes, indexed by node id.
  const std::size_t total = 2 * n - 1;
  Matrix dist(total, total);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist(i, j) = 1.0 - sim(i, j);
  }
  std::vector<std::size_t> size(total, 1);
  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);
  Dendrogram out;
  out.n_leaves = static_cast<int>(n);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    int a = -1, b = -1;
    double best = 0.0;
    for (std::size_t x = 0; x < active.size(); ++x) {
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const double d = dist(active[x], active[y]);
        if (a < 0 || d < best) {
          a = active[x];
          b = active[y];
          best = d;
        }
      }
    }
    const int id = static_cast<int>(n + step);
    size[id] = size[a] + size[b];
    for (int k : active) {
      if (k == a || k == b) continue;
      const double d = (static_cast<double>(size[a]) * dist(a, k) + static_cast<double>(size[b]) * dist(b, k)) /
                       static_cast<double>(size[id]);
      dist(id, k) = dist(k, id) = d;
    }
    active.erase(std::remove_if(active.begin(), active.end(), [&](int k) { return k == a || k == b; }),
                 active.end());
    active.push_back(id);  // ids stay ascending
    out.merges.push_back({std::min(a, b), std::max(a, b), id, best, size[id]});
  }
  return out;
}

std::string Dendrogram::to_json() const {
  std::function<Json(int)> node = [&](int id) {
    Json j;
    j["id"] = id;
    if (id < n_leaves) return j;
    const auto& m = merges[static_cast<std::size_t>(id - n_leaves)];
    j["height"] = m.height;
    j["children"] = Json::array({node(m.left), node(m.right)});
    return j;
  };
  Json root = merges.empty() ? node(0) : node(merges.back().id);
  Json merge_list = Json::array();
  for (const auto& m : merges) {
    merge_list.push_back({{"id", m.id}, {"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  }
  return Json{{"tree", root}, {"merges", merge_list}}.dump(2) + "\n";
}

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("jsd: length mismatch");
  return std::clamp(0.5 * kl_half(p, q) + 0.5 * kl_half(q, p), 0.0, 1.0);
}

Matrix classical_mds(const Matrix& distances, int dims) {
  const auto n = static_cast<Eigen::Index>(distances.rows());
  Matrix out(distances.rows(), static_cast<std::size_t>(dims));
  if (n == 0) return out;
  Eigen::MatrixXd sq(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) sq(i, j) = distances(i, j) * distances(i, j);
  }
  const Eigen::MatrixXd centre =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd b = -0.5 * centre * sq * centre;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) throw Error("classical_mds: eigen decomposition failed");
  for (int d = 0; d < dims && d < n; ++d) {
    const Eigen::Index col = n - 1 - d;  // eigenvalues ascend
    const double scale = std::sqrt(std::max(solver.eigenvalues()(col), 0.0));
    Eigen::VectorXd v = solver.eigenvectors().col(col);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(v(i)) > std::abs(v(arg)) + 1e-12) arg = i;
    }
    if (v(arg) < 0) v = -v;
    for (Eigen::Index i = 0; i < n; ++i) out(static_cast<std::size_t>(i), d) = v(i) * scale;
  }
  return out;
}

IntertopicMap intertopic_map(const Matrix& phi, const Matrix& theta, const std::vector<int>& doc_lengths) {
  const std::size_t K = phi.rows();
  if (theta.cols() != K || theta.rows() != doc_lengths.size()) {
    throw InvalidArgument("intertopic_map: phi/theta/document length shapes disagree");
  }
  Matrix d(K, K);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = i + 1; j < K; ++j) d(i, j) = d(j, i) = jsd(phi.row(i), phi.row(j));
  }
  IntertopicMap map;
  map.coords = classical_mds(d, 2);
  map.degenerate = K < 3;
  map.prevalence.assign(K, 0.0);
  double total = 0.0;
  for (std::size_t doc = 0; doc < theta.rows(); ++doc) {
    total += doc_lengths[doc];
    for (std::size_t k = 0; k < K; ++k) map.prevalence[k] += theta(doc, k) * doc_lengths[doc];
  }
  if (total > 0) {
    double sum = 0.0;
    for (double p : map.prevalence) sum += p;
    for (double& p : map.prevalence) p /= sum;
  } else {
    std::fill(map.prevalence.begin(), map.prevalence.end(), K ? 1.0 / static_cast<double>(K) : 0.0);
  }
  return map;
}

IntertopicMap lda_intertopic_map(const LdaModel& model) {
  std::vector<int> lengths(model.num_docs());
  for (std::size_t d = 0; d < lengths.size(); ++d) lengths[d] = model.doc_length(d);
  return intertopic_map(phi(model), theta(model), lengths);
}

std::vector<TopicSummary> summarize_topics(const CtfidfMatrix& weights, const Vocabulary& terms,
                                           const std::vector<int>& labels, const Matrix& points,
                                           const std::vector<std::string>& doc_ids, std::size_t n_terms,
                                           std::size_t n_docs) {
  const std::size_t C = weights.weights.rows();
  if (labels.size() != points.rows() || labels.size() != doc_ids.size()) {
    throw InvalidArgument("summarize_topics: labels, points and ids must align");
  }
  const Matrix centroids = topic_centroids(points, labels, static_cast<int>(C));
  std::vector<TopicSummary> out(C);
  for (std::size_t c = 0; c < C; ++c) {
    auto& s = out[c];
    s.id = static_cast<int>(c);
    std::vector<std::size_t> order;
    for (std::size_t t = 0; t < weights.weights.cols(); ++t) {
      if (weights.weights(c, t) > 0) order.push_back(t);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights.weights(c, a) > weights.weights(c, b); });
    for (std::size_t i = 0; i < order.size() && i < n_terms; ++i) {
      s.top_terms.push_back({terms.token(static_cast<int>(order[i])), weights.weights(c, order[i])});
    }
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t p = 0; p < labels.size(); ++p) {
      if (labels[p] != static_cast<int>(c)) continue;
      double d2 = 0.0;
      for (std::size_t k = 0; k < points.cols(); ++k) {
        const double diff = points(p, k) - centroids(c, k);
        d2 += diff * diff;
      }
      near.push_back({d2, p});
    }
    s.size = near.size();
    std::sort(near.begin(), near.end());
    for (std::size_t i = 0; i < near.size() && i < n_docs; ++i) s.representative_docs.push_back(doc_ids[near[i].second]);
  }
  return out;
}

std::string summaries_json(const std::vector<TopicSummary>& topics) {
  Json arr = Json::array();
  for (const auto& t : topics) {
    Json terms = Json::array();
    for (const auto& ts : t.top_terms) terms.push_back({{"term", ts.term}, {"score", ts.score}});
    arr.push_back({{"id", t.id}, {"size", t.size}, {"top_terms", terms}, {"representative_docs", t.representative_docs}});
  }
  return arr.dump(2) + "\n";
}

std::string heatmap_csv(const Matrix& s) {
  std::ostringstream os;
  os << "topic";
  for (std::size_t j = 0; j < s.cols(); ++j) os << ',' << j;
  os << '\n';
  for (std::size_t i = 0; i < s.rows(); ++i) {
    os << i;
    for (std::size_t j = 0; j < s.cols(); ++j) os << ',' << full(s(i, j));
    os << '\n';
  }
  return os.str();
}

std::string heatmap_svg(const Matrix& s) {
  static const char* kRamp[] = {"#f7fbff", "#c6dbef", "#6baed6", "#2171b5", "#08306b"};
  constexpr int kCell = 40, kMargin = 30;
  const int n = static_cast<int>(s.rows());
  const int size = kMargin + n * kCell;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (int i = 0; i < n; ++i) {
    os << "<text x=\"" << kMargin + i * kCell + kCell / 2 << "\" y=\"20\" text-anchor=\"middle\">" << i << "</text>\n";
    os << "<text x=\"20\" y=\"" << kMargin + i * kCell + kCell / 2 + 4 << "\" text-anchor=\"end\">" << i << "</text>\n";
    for (int j = 0; j < n; ++j) {
      const double v = std::clamp(s(i, j), 0.0, 1.0);
      const int bin = std::min(4, static_cast<int>(v * 5.0));
      const int x = kMargin + j * kCell, y = kMargin + i * kCell;
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\""
         << kRamp[bin] << "\"/>";
      os << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4 << "\" text-anchor=\"middle\" fill=\""
         << (bin >= 3 ? "#ffffff" : "#000000") << "\">" << fixed(s(i, j), 2) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string dendrogram_svg(const Dendrogram& tree) {
  constexpr double kWidth = 600, kHeight = 400, kPad = 30;
  const int n = tree.n_leaves;
  // Leaf order from a left-first walk of the tree.
  std::vector<double> x(static_cast<std::size_t>(n) + tree.merges.size());
  std::vector<double> h(x.size(), 0.0);
  int next = 0;
  std::function<void(int)> place = [&](int id) {
    if (id < n) {
      x[id] = n > 1 ? kPad + (kWidth - 2 * kPad) * next++ / (n - 1) : kWidth / 2;
      return;
    }
    const auto& m = tree.merges[static_cast<std::size_t>(id - n)];
    place(m.left);
    place(m.right);
    x[id] = 0.5 * (x[m.left] + x[m.right]);
    h[id] = m.height;
  };
  if (tree.merges.empty()) {
    place(0);
  } else {
    place(tree.merges.back().id);
  }
  double top = 0.0;
  for (double v : h) top = std::max(top, v);
  if (top <= 0) top = 1.0;
  auto y = [&](double height) { return kHeight - kPad - (kHeight - 2 * kPad) * height / top; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (const auto& m : tree.merges) {
    os << "<path fill=\"none\" stroke=\"#333\" d=\"M" << fixed(x[m.left], 2) << ',' << fixed(y(h[m.left]), 2) << " V"
       << fixed(y(m.height), 2) << " H" << fixed(x[m.right], 2) << " V" << fixed(y(h[m.right]), 2) << "\"/>\n";
  }
  for (int i = 0; i < n; ++i) {
    os << "<text x=\"" << fixed(x[i], 2) << "\" y=\"" << fixed(kHeight - kPad + 14, 2)
       << "\" text-anchor=\"middle\">" << i << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string intertopic_csv(const IntertopicMap& map) {
  std::ostringstream os;
  os << "topic,x,y,prevalence\n";
  for (std::size_t k = 0; k < map.prevalence.size(); ++k) {
    os << k << ',' << full(map.coords(k, 0)) << ',' << full(map.coords(k, 1)) << ',' << full(map.prevalence[k]) << '\n';
  }
  return os.str();
}

}  // namespace litclass
