// Test-side reference implementations. None of this calls into the library's
// algorithms; each oracle recomputes its answer from the definitions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// ---------------------------------------------------------------- HDBSCAN

inline std::vector<std::vector<double>> mutual_reachability(const Points& pts, std::size_t min_samples) {
  const std::size_t n = pts.size();
  std::vector<double> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) d.push_back(euclid(pts[i], pts[j]));
    }
    std::sort(d.begin(), d.end());
    core[i] = d[min_samples - 1];
  }
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = std::max({core[i], core[j], euclid(pts[i], pts[j])});
  }
  return m;
}

// Connected components of `set` using edges with weight strictly below `limit`.
inline std::vector<std::vector<int>> components_below(const std::vector<int>& set,
                                                      const std::vector<std::vector<double>>& w, double limit) {
  std::vector<std::vector<int>> comps;
  std::set<int> left(set.begin(), set.end());
  while (!left.empty()) {
    std::vector<int> comp{*left.begin()};
    left.erase(left.begin());
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (auto it = left.begin(); it != left.end();) {
        if (w[comp[head]][*it] < limit) {
          comp.push_back(*it);
          it = left.erase(it);
        } else {
          ++it;
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(comp);
  }
  std::sort(comps.begin(), comps.end());
  return comps;
}

// Smallest threshold at which `set` is connected (edges <= threshold).
inline double connect_level(const std::vector<int>& set, const std::vector<std::vector<double>>& w) {
  std::vector<double> levels;
  for (int a : set) {
    for (int b : set) {
      if (a < b) levels.push_back(w[a][b]);
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (double t : levels) {
    if (components_below(set, w, std::nextafter(t, std::numeric_limits<double>::infinity())).size() == 1) return t;
  }
  return 0.0;
}

struct RefCluster {
  int parent = -1;
  double birth = 0.0;
  double stability = 0.0;
  std::vector<int> children;
  std::vector<int> members;  // every point in the subtree
};

inline double lambda_of(double d) { return d > 0 ? std::min(1.0 / d, 1e300) : 1e300; }

// Labels from a direct top-down reading of the HDBSCAN definitions, with
// selection by enumerating every antichain of non-root clusters.
inline std::vector<int> hdbscan_labels(const Points& pts, std::size_t min_cluster_size, std::size_t min_samples) {
  const std::size_t n = pts.size();
  if (n < min_cluster_size || n < 2) return std::vector<int>(n, -1);
  min_samples = std::min(min_samples, n - 1);
  const auto w = mutual_reachability(pts, min_samples);
  std::vector<RefCluster> cl;
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);

  std::function<void(int, std::vector<int>)> grow = [&](int c, std::vector<int> set) {
    while (set.size() > 1) {
      const double level = connect_level(set, w);
      const double lam = lambda_of(level);
      const auto parts = components_below(set, w, level);
      std::vector<std::vector<int>> big;
      for (const auto& p : parts) {
        if (p.size() >= min_cluster_size) {
          big.push_back(p);
        } else {
          cl[c].stability += static_cast<double>(p.size()) * (lam - cl[c].birth);
        }
      }
      if (big.size() >= 2) {
        for (const auto& b : big) {
          cl[c].stability += static_cast<double>(b.size()) * (lam - cl[c].birth);
          RefCluster child;
          child.parent = c;
          child.birth = lam;
          child.members = b;
          cl.push_back(child);
          const int id = static_cast<int>(cl.size()) - 1;
          cl[c].children.push_back(id);
          grow(id, b);
        }
        return;
      }
      if (big.empty()) return;
      set = big[0];
    }
    if (set.size() == 1) cl[c].stability += lambda_of(0.0) - cl[c].birth;  // cannot happen for mcs >= 2
  };
  RefCluster root;
  root.members = all;
  cl.push_back(root);
  grow(0, all);

  // Enumerate antichains below the root.
  std::function<std::vector<std::vector<int>>(int)> options = [&](int c) {
    std::vector<std::vector<int>> combos{{}};
    for (int ch : cl[c].children) {
      std::vector<std::vector<int>> next;
      auto sub = options(ch);
      sub.push_back({ch});
      for (const auto& a : combos) {
        for (const auto& b : sub) {
          auto m = a;
          m.insert(m.end(), b.begin(), b.end());
          next.push_back(m);
        }
      }
      combos = next;
    }
    return combos;
  };
  auto choices = options(0);
  auto total = [&](const std::vector<int>& s) {
    double t = 0.0;
    for (int c : s) t += cl[c].stability;
    return t;
  };
  std::vector<int> best;
  double best_total = -1.0;
  for (auto s : choices) {
    std::sort(s.begin(), s.end());
    const double t = total(s);
    const double tol = 1e-9 * std::max(1.0, std::abs(best_total));
    if (t > best_total + tol || (std::abs(t - best_total) <= tol &&
                                 (s.size() < best.size() || (s.size() == best.size() && s < best)))) {
      best = s;
      best_total = t;
    }
  }
  std::vector<int> raw(n, -1);
  for (int c : best) {
    for (int p : cl[c].members) raw[p] = c;
  }
  std::map<int, int> canon;
  std::vector<int> labels(n, -1);
  for (std::size_t p = 0; p < n; ++p) {
    if (raw[p] < 0) continue;
    labels[p] = canon.emplace(raw[p], static_cast<int>(canon.size())).first->second;
  }
  return labels;
}

// Minimum spanning tree weight by enumerating every labelled tree through
// its Pruefer sequence. Practical for n <= 9.
inline double exhaustive_mst_weight(const std::vector<std::vector<double>>& w) {
  const int n = static_cast<int>(w.size());
  if (n < 2) return 0.0;
  if (n == 2) return w[0][1];
  std::vector<int> seq(n - 2, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<int> degree(n, 1);
    for (int s : seq) ++degree[s];
    double total = 0.0;
    std::vector<int> deg = degree;
    for (int s : seq) {
      int leaf = 0;
      while (deg[leaf] != 1) ++leaf;
      total += w[leaf][s];
      --deg[leaf];
      --deg[s];
    }
    int u = -1, v = -1;
    for (int i = 0; i < n; ++i) {
      if (deg[i] == 1) (u < 0 ? u : v) = i;
    }
    total += w[u][v];
    best = std::min(best, total);
    int pos = 0;
    while (pos < n - 2 && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == n - 2) break;
  }
  return best;
}

// ---------------------------------------------------------------- UMAP curve

// Least squares fit of 1 / (1 + a d^(2b)) by repeated grid refinement.
inline std::pair<double, double> fit_ab_grid(double min_dist, double spread) {
  std::vector<double> xs, ys;
  for (int i = 0; i < 300; ++i) {
    const double x = 3.0 * spread * i / 299.0;
    xs.push_back(x);
    ys.push_back(x < min_dist ? 1.0 : std::exp(-(x - min_dist) / spread));
  }
  auto sse = [&](double a, double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = 1.0 / (1.0 + a * std::pow(xs[i], 2 * b)) - ys[i];
      s += r * r;
    }
    return s;
  };
  double a0 = 0.01, a1 = 10.0, b0 = 0.1, b1 = 3.0;
  double ba = 1.0, bb = 1.0;
  for (int round = 0; round < 12; ++round) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const double a = a0 + (a1 - a0) * i / 40.0, b = b0 + (b1 - b0) * j / 40.0;
        const double s = sse(a, b);
        if (s < best) {
          best = s;
          ba = a;
          bb = b;
        }
      }
    }
    const double ra = (a1 - a0) / 10.0, rb = (b1 - b0) / 10.0;
    a0 = std::max(1e-6, ba - ra);
    a1 = ba + ra;
    b0 = std::max(1e-6, bb - rb);
    b1 = bb + rb;
  }
  return {ba, bb};
}

// ---------------------------------------------------------------- corpora

inline std::vector<double> dirichlet(std::mt19937_64& gen, std::size_t n, double conc) {
  std::gamma_distribution<double> g(conc, 1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) s += (x = g(gen));
  for (auto& x : v) x /= s;
  return v;
}

inline std::size_t draw(std::mt19937_64& gen, const std::vector<double>& p) {
  std::discrete_distribution<std::size_t> d(p.begin(), p.end());
  return d(gen);
}

struct PlantedCorpus {
  std::vector<std::vector<double>> phi;  // K x V
  std::vector<std::vector<int>> docs;    // token ids
};

// LDA generative process: theta_d ~ Dir(alpha), phi_k ~ Dir(eta).
inline PlantedCorpus planted_lda(std::size_t K, std::size_t V, std::size_t D, std::size_t len, double alpha,
                                 double eta, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  PlantedCorpus c;
  for (std::size_t k = 0; k < K; ++k) c.phi.push_back(dirichlet(gen, V, eta));
  for (std::size_t d = 0; d < D; ++d) {
    const auto theta = dirichlet(gen, K, alpha);
    std::vector<int> doc;
    for (std::size_t i = 0; i < len; ++i) doc.push_back(static_cast<int>(draw(gen, c.phi[draw(gen, theta)])));
    c.docs.push_back(doc);
  }
  return c;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// Mean TV distance under the best one-to-one matching (brute force).
inline double matched_tv(const std::vector<std::vector<double>>& learned,
                         const std::vector<std::vector<double>>& planted) {
  std::vector<int> perm(planted.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t k = 0; k < perm.size(); ++k) s += total_variation(learned[perm[k]], planted[k]);
    best = std::min(best, s / static_cast<double>(perm.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Two Gaussian blobs in `dim` dimensions separated by `gap` along axis 0.
inline Points two_blobs(std::size_t per_blob, std::size_t dim, double radius, double gap, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, radius);
  Points pts;
  for (int b = 0; b < 2; ++b) {
    for (std::size_t i = 0; i < per_blob; ++i) {
      std::vector<double> p(dim);
      for (auto& x : p) x = nd(gen);
      p[0] += b * gap;
      pts.push_back(p);
    }
  }
  return pts;
}

struct ClusterInstance {
  Points points;
  std::size_t min_cluster_size = 5;
  std::size_t min_samples = 5;
};

// Case i of a fixed suite: 1-4 Gaussian blobs of varied spread plus uniform
// noise in 2-d or 3-d, n <= 50.
inline ClusterInstance mixed_instance(std::uint64_t i) {
  std::mt19937_64 gen(1000 + i);
  std::uniform_int_distribution<int> nblobs(1, 4), dimd(2, 3), size(6, 12), noise(0, 8);
  std::uniform_real_distribution<double> centre(-20.0, 20.0), spread(0.3, 2.0), box(-25.0, 25.0);
  ClusterInstance c;
  const int dim = dimd(gen);
  const int blobs = nblobs(gen);
  for (int b = 0; b < blobs; ++b) {
    std::vector<double> mu(dim);
    for (auto& x : mu) x = centre(gen);
    std::normal_distribution<double> nd(0.0, spread(gen));
    const int m = size(gen);
    for (int k = 0; k < m; ++k) {
      std::vector<double> p(dim);
      for (int j = 0; j < dim; ++j) p[j] = mu[j] + nd(gen);
      c.points.push_back(p);
    }
  }
  const int extra = noise(gen);
  for (int k = 0; k < extra && c.points.size() < 50; ++k) {
    std::vector<double> p(dim);
    for (auto& x : p) x = box(gen);
    c.points.push_back(p);
  }
  std::shuffle(c.points.begin(), c.points.end(), gen);
  c.min_cluster_size = 3 + i % 4;
  c.min_samples = 2 + i % 5;
  return c;
}

}  // namespace oracle
