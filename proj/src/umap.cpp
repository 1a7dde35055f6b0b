#include "litclass/umap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "litclass/error.hpp"
#include "litclass/rng.hpp"

namespace litclass {
namespace {

constexpr int kCurveSamples = 300;
constexpr double kGradientClip = 4.0;

double membership_sum(std::span<const double> d, double rho, double sigma) {
  double s = 0.0;
  for (double x : d) {
    const double gap = x - rho;
    s += gap > 0 ? std::exp(-gap / sigma) : 1.0;
  }
  return s;
}

double clip(double v) { return std::clamp(v, -kGradientClip, kGradientClip); }

}  // namespace

void UmapConfig::validate(std::size_t n_points) const {
  if (n_neighbors < 2) throw InvalidArgument("umap: n_neighbors must be >= 2");
  if (n_points && n_neighbors >= n_points) {
    throw InvalidArgument("umap: n_neighbors must be < number of points (" +
                          std::to_string(n_points) + ")");
  }
  if (n_components < 2) throw InvalidArgument("umap: n_components must be >= 2");
  if (!(min_dist > 0)) throw InvalidArgument("umap: min_dist must be > 0");
  if (!(spread > 0)) throw InvalidArgument("umap: spread must be > 0");
  if (epochs < 1) throw InvalidArgument("umap: epochs must be >= 1");
  if (negative_sample_rate < 0) throw InvalidArgument("umap: negative_sample_rate must be >= 0");
  if (!(learning_rate > 0)) throw InvalidArgument("umap: learning_rate must be > 0");
}

KnnGraph knn(const Matrix& points, std::size_t k, Metric metric) {
  const std::size_t n = points.rows();
  if (k < 1 || k >= n) throw InvalidArgument("knn: require 1 <= k < n");
  KnnGraph g;
  g.n = n;
  g.k = k;
  g.indices.resize(n * k);
  g.distances.resize(n * k);

  Matrix dist(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = distance(points.row(i), points.row(j), metric);
    }
  }
  std::vector<int> order(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order[c++] = static_cast<int>(j);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](int a, int b) {
                        const double da = dist(i, a), db = dist(i, b);
                        return da != db ? da < db : a < b;
                      });
    for (std::size_t j = 0; j < k; ++j) {
      g.indices[i * k + j] = order[j];
      g.distances[i * k + j] = dist(i, order[j]);
    }
  }
  return g;
}

SmoothKnn smooth_knn(std::span<const double> d, double fallback_mean) {
  SmoothKnn out;
  const std::size_t k = d.size();
  if (k == 0) throw InvalidArgument("smooth_knn: no distances");
  const double target = std::log2(static_cast<double>(k));

  for (double x : d) {
    if (x > 0) {
      out.rho = x;
      break;
    }
  }

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double mid = 1.0;
  for (int it = 0; it < kSmoothKnnIterations; ++it) {
    const double psum = membership_sum(d, out.rho, mid);
    if (std::abs(psum - target) < kSmoothKnnTolerance) break;
    if (psum > target) {
      hi = mid;
      mid = (lo + hi) / 2.0;
    } else {
      lo = mid;
      mid = std::isinf(hi) ? mid * 2.0 : (lo + hi) / 2.0;
    }
  }
  out.sigma = mid;

  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(k);
  const double floor = kMinSigmaScale * (out.rho > 0 ? mean : fallback_mean);
  if (out.sigma < floor) out.sigma = floor;

  // As sigma -> 0 the sum tends to the number of neighbors at distance rho.
  const auto at_rho = std::count_if(d.begin(), d.end(), [&](double x) { return x <= out.rho; });
  out.degenerate = static_cast<double>(at_rho) >= target;
  out.residual = std::abs(membership_sum(d, out.rho, out.sigma) - target);
  return out;
}

double FuzzyGraph::weight(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{i, j},
                             [](const WeightedEdge& e, const std::pair<int, int>& key) {
                               return std::pair{e.from, e.to} < key;
                             });
  if (it != edges.end() && it->from == i && it->to == j) return it->weight;
  return 0.0;
}

FuzzyGraph fuzzy_union(std::size_t n, const std::vector<WeightedEdge>& directed) {
  std::map<std::pair<int, int>, std::pair<double, double>> pairs;  // (lo,hi) -> (w_lo_hi, w_hi_lo)
  for (const auto& e : directed) {
    if (e.from == e.to) continue;
    if (e.from < 0 || e.to < 0 || static_cast<std::size_t>(std::max(e.from, e.to)) >= n) {
      throw InvalidArgument("fuzzy_union: edge endpoint out of range");
    }
    if (e.from < e.to) {
      pairs[{e.from, e.to}].first = e.weight;
    } else {
      pairs[{e.to, e.from}].second = e.weight;
    }
  }
  FuzzyGraph g;
  g.n = n;
  g.edges.reserve(pairs.size());
  for (const auto& [key, w] : pairs) {
    const double a = w.first + w.second - w.first * w.second;
    if (a > 0) g.edges.push_back({key.first, key.second, std::min(a, 1.0)});
  }
  return g;
}

FuzzyGraph fuzzy_simplicial_set(const KnnGraph& knn) {
  double global_mean = 0.0;
  for (double x : knn.distances) global_mean += x;
  global_mean = knn.distances.empty() ? 1.0 : global_mean / static_cast<double>(knn.distances.size());
  if (!(global_mean > 0)) global_mean = 1.0;

  std::vector<WeightedEdge> directed;
  directed.reserve(knn.n * knn.k);
  std::vector<SmoothKnn> cal(knn.n);
  for (std::size_t i = 0; i < knn.n; ++i) {
    cal[i] = smooth_knn(knn.row(i), global_mean);
    for (std::size_t j = 0; j < knn.k; ++j) {
      const double gap = knn.dist(i, j) - cal[i].rho;
      const double w = gap > 0 ? std::exp(-gap / cal[i].sigma) : 1.0;
      directed.push_back({static_cast<int>(i), knn.index(i, j), w});
    }
  }
  FuzzyGraph g = fuzzy_union(knn.n, directed);
  g.rho.resize(knn.n);
  g.sigma.resize(knn.n);
  g.degenerate.resize(knn.n);
  for (std::size_t i = 0; i < knn.n; ++i) {
    g.rho[i] = cal[i].rho;
    g.sigma[i] = cal[i].sigma;
    g.degenerate[i] = cal[i].degenerate;
  }
  return g;
}

CurveParams fit_ab(double min_dist, double spread) {
  if (!(min_dist > 0) || !(spread > 0)) throw InvalidArgument("fit_ab: min_dist and spread must be > 0");
  std::vector<double> xs(kCurveSamples), ys(kCurveSamples);
  for (int i = 0; i < kCurveSamples; ++i) {
    xs[i] = 3.0 * spread * i / (kCurveSamples - 1);
    ys[i] = xs[i] < min_dist ? 1.0 : std::exp(-(xs[i] - min_dist) / spread);
  }
  auto sse = [&](double a, double b) {
    double s = 0.0;
    for (int i = 0; i < kCurveSamples; ++i) {
      const double r = 1.0 / (1.0 + a * std::pow(xs[i], 2.0 * b)) - ys[i];
      s += r * r;
    }
    return s;
  };

  // Levenberg-Marquardt on the two parameters.
  double a = 1.0, b = 1.0;
  double cost = sse(a, b);
  double lambda = 1e-3;
  bool converged = false;
  for (int iter = 0; iter < 1000 && !converged; ++iter) {
    double jtj[2][2] = {{0, 0}, {0, 0}};
    double jtr[2] = {0, 0};
    for (int i = 0; i < kCurveSamples; ++i) {
      const double x = xs[i];
      const double u = x > 0 ? std::pow(x, 2.0 * b) : 0.0;
      const double f = 1.0 / (1.0 + a * u);
      const double r = f - ys[i];
      const double da = -u * f * f;
      const double db = x > 0 ? -a * u * 2.0 * std::log(x) * f * f : 0.0;
      jtj[0][0] += da * da;
      jtj[0][1] += da * db;
      jtj[1][1] += db * db;
      jtr[0] += da * r;
      jtr[1] += db * r;
    }
    jtj[1][0] = jtj[0][1];
    for (;;) {
      const double m00 = jtj[0][0] * (1 + lambda), m11 = jtj[1][1] * (1 + lambda);
      const double det = m00 * m11 - jtj[0][1] * jtj[1][0];
      if (det == 0 || lambda > 1e16) {
        converged = lambda > 1e16;
        break;
      }
      const double step_a = -(m11 * jtr[0] - jtj[0][1] * jtr[1]) / det;
      const double step_b = -(m00 * jtr[1] - jtj[1][0] * jtr[0]) / det;
      const double na = a + step_a, nb = b + step_b;
      const double new_cost = (na > 0 && nb > 0) ? sse(na, nb) : std::numeric_limits<double>::infinity();
      if (new_cost < cost) {
        const double improvement = cost - new_cost;
        a = na;
        b = nb;
        cost = new_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        if (improvement <= 1e-14 * (1.0 + cost) ||
            (std::abs(step_a) < 1e-12 * (1 + a) && std::abs(step_b) < 1e-12 * (1 + b))) {
          converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
  }
  CurveParams out{a, b, std::sqrt(cost / kCurveSamples)};
  if (!converged || !std::isfinite(a) || !std::isfinite(b)) {
    std::ostringstream os;
    os << "fit_ab: least squares did not converge (a=" << a << ", b=" << b << ", rmse=" << out.rmse << ")";
    throw Error(os.str());
  }
  return out;
}

Matrix optimize_layout(const FuzzyGraph& graph, const UmapConfig& cfg, const CurveParams& curve) {
  cfg.validate();
  const std::size_t n = graph.n;
  const std::size_t dim = cfg.n_components;
  Rng rng(cfg.seed);
  Matrix emb(n, dim);
  for (double& v : emb.data()) v = rng.uniform(-10.0, 10.0);
  if (graph.edges.empty()) return emb;

  struct Sample {
    int head, tail;
    double epochs_per_sample, next_sample, epochs_per_negative, next_negative;
  };
  double max_w = 0.0;
  for (const auto& e : graph.edges) max_w = std::max(max_w, e.weight);
  const double n_epochs = cfg.epochs;
  std::vector<Sample> samples;
  samples.reserve(graph.edges.size() * 2);
  auto add = [&](int h, int t, double w) {
    // Edges below max_w / epochs would never be sampled.
    if (n_epochs * w / max_w < 1.0) return;
    const double eps = max_w / w;
    const double neg = cfg.negative_sample_rate > 0 ? eps / cfg.negative_sample_rate
                                                    : std::numeric_limits<double>::infinity();
    samples.push_back({h, t, eps, eps, neg, neg});
  };
  for (const auto& e : graph.edges) add(e.from, e.to, e.weight);
  for (const auto& e : graph.edges) add(e.to, e.from, e.weight);
  std::sort(samples.begin(), samples.end(), [](const Sample& x, const Sample& y) {
    return x.head != y.head ? x.head < y.head : x.tail < y.tail;
  });

  const double a = curve.a;
  const double b = curve.b;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double alpha = cfg.learning_rate * (1.0 - static_cast<double>(epoch) / n_epochs);
    for (auto& s : samples) {
      if (s.next_sample > epoch) continue;
      auto current = emb.row(static_cast<std::size_t>(s.head));
      auto other = emb.row(static_cast<std::size_t>(s.tail));

      double d2 = 0.0;
      for (std::size_t d = 0; d < dim; ++d) d2 += (current[d] - other[d]) * (current[d] - other[d]);
      double coeff = 0.0;
      if (d2 > 0.0) {
        coeff = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
      }
      for (std::size_t d = 0; d < dim; ++d) {
        const double g = clip(coeff * (current[d] - other[d]));
        current[d] += g * alpha;
        other[d] -= g * alpha;
      }
      s.next_sample += s.epochs_per_sample;

      const int n_neg = static_cast<int>((epoch - s.next_negative) / s.epochs_per_negative);
      for (int p = 0; p < n_neg; ++p) {
        const auto k = static_cast<std::size_t>(rng.below(n));
        if (static_cast<int>(k) == s.head) continue;
        auto neg = emb.row(k);
        double nd2 = 0.0;
        for (std::size_t d = 0; d < dim; ++d) nd2 += (current[d] - neg[d]) * (current[d] - neg[d]);
        if (nd2 <= 0.0) continue;
        const double rc = 2.0 * b / ((0.001 + nd2) * (a * std::pow(nd2, b) + 1.0));
        for (std::size_t d = 0; d < dim; ++d) current[d] += clip(rc * (current[d] - neg[d])) * alpha;
      }
      if (n_neg > 0) s.next_negative += n_neg * s.epochs_per_negative;
    }
  }
  return emb;
}

Matrix umap_reduce(const Matrix& points, const UmapConfig& cfg) {
  cfg.validate(points.rows());
  const auto graph = fuzzy_simplicial_set(knn(points, cfg.n_neighbors, cfg.metric));
  return optimize_layout(graph, cfg, fit_ab(cfg.min_dist, cfg.spread));
}

}  // namespace litclass
