#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "litclass/error.hpp"
#include "litclass/topics.hpp"

using namespace litclass;

namespace {

Matrix rows(const std::vector<std::vector<double>>& r) {
  Matrix m(r.size(), r[0].size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = 0; j < r[i].size(); ++j) m(i, j) = r[i][j];
  }
  return m;
}

double cos_rows(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return d / std::sqrt(na * nb);
}

// Average linkage recomputed from the leaf distances at every step.
std::vector<DendrogramMerge> naive_average_linkage(const std::vector<std::vector<double>>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d[i][j] = 1.0 - cos_rows(v[i], v[j]);
  }
  std::map<int, std::vector<int>> active;
  for (int i = 0; i < n; ++i) active[i] = {i};
  std::vector<DendrogramMerge> out;
  for (int step = 0; step < n - 1; ++step) {
    double best = 1e300;
    int bi = -1, bj = -1;
    for (auto it = active.begin(); it != active.end(); ++it) {
      for (auto jt = std::next(it); jt != active.end(); ++jt) {
        double s = 0;
        for (int a : it->second) {
          for (int b : jt->second) s += d[a][b];
        }
        s /= static_cast<double>(it->second.size() * jt->second.size());
        if (s < best - 1e-12) {
          best = s;
          bi = it->first;
          bj = jt->first;
        }
      }
    }
    auto members = active[bi];
    members.insert(members.end(), active[bj].begin(), active[bj].end());
    active.erase(bi);
    active.erase(bj);
    active[n + step] = members;
    out.push_back({bi, bj, n + step, best, members.size()});
  }
  return out;
}

double js_base2(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) s += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0) s += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return s;
}

}  // namespace

TEST_SUITE("topics") {
  TEST_CASE("class tf-idf hand value") {
    // A: {apple: 4}, B: {banana: 2}
    auto w = ctfidf(rows({{4, 0}, {0, 2}}));
    CHECK(w.avg_total == 3.0);
    CHECK(std::abs(w.weights(0, 0) - 4.0 * std::log(1.0 + 3.0 / 4.0)) < 1e-12);
    CHECK(std::abs(w.weights(0, 0) - 2.2384) < 1e-4);
    CHECK(w.weights(0, 1) == 0.0);
    CHECK(w.weights(1, 0) == 0.0);
  }

  TEST_CASE("single class weights keep term order") {
    auto w = ctfidf(rows({{3, 7, 1, 5}}));
    for (int t = 0; t < 4; ++t) CHECK(w.weights(0, t) > 0);
    CHECK(w.weights(0, 1) > w.weights(0, 3));
    CHECK(w.weights(0, 3) > w.weights(0, 0));
    CHECK(w.weights(0, 0) > w.weights(0, 2));
  }

  TEST_CASE("scaling every class keeps each class's ranking") {
    std::mt19937_64 gen(2);
    std::uniform_int_distribution<int> c(0, 9);
    Matrix m(4, 12);
    for (auto& v : m.data()) v = c(gen);
    Matrix m3 = m;
    for (auto& v : m3.data()) v *= 3;
    auto a = ctfidf(m), b = ctfidf(m3);
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
          CHECK((a.weights(k, i) < a.weights(k, j)) == (b.weights(k, i) < b.weights(k, j)));
        }
      }
    }
  }

  TEST_CASE("class term counts skip outliers") {
    BowCorpus bow{{{{0, 1}}, {{1, 2}}, {{0, 3}, {1, 1}}}, 2};
    auto m = class_term_counts(bow, {0, -1, 0}, 1);
    CHECK(m(0, 0) == 4.0);
    CHECK(m(0, 1) == 1.0);
  }

  TEST_CASE("cosine similarity matrix") {
    auto s = topic_similarity(rows({{1, 2, 0}, {0, 0, 3}, {2, 4, 0}, {0, 0, 0}}));
    CHECK(s.values(0, 1) == 0.0);
    CHECK(s.values(0, 2) == doctest::Approx(1.0));
    CHECK(s.values(3, 3) == 1.0);
    CHECK(s.values(3, 0) == 0.0);
    CHECK(s.flagged[3]);
    CHECK_FALSE(s.flagged[0]);
    auto h = topic_similarity(rows({{1, 2, 3}, {3, 0, 1}}));
    CHECK(h.values(0, 1) == doctest::Approx(6.0 / std::sqrt(14.0 * 10.0)).epsilon(1e-12));
    CHECK(h.values(1, 0) == h.values(0, 1));
    CHECK(h.values(0, 0) == 1.0);
  }

  TEST_CASE("identical topics merge, distinct ones stay") {
    BowCorpus bow{{{{0, 2}}, {{0, 4}}, {{1, 3}}}, 2};
    auto r = merge_similar({0, 1, 2}, bow, 0.85);
    CHECK(r.n_topics == 2);
    CHECK(r.labels == std::vector<int>{0, 0, 1});
    REQUIRE(r.log.size() == 1);
    CHECK(r.log[0].kept == 0);
    CHECK(r.log[0].removed == 1);
    auto none = merge_similar({0, -1, 1}, bow, 0.85);
    CHECK(none.labels == std::vector<int>{0, -1, 1});
    CHECK(none.log.empty());
  }

  TEST_CASE("merging terminates and only shrinks") {
    std::mt19937_64 gen(8);
    std::uniform_int_distribution<int> cnt(0, 3), term(0, 5), lab(-1, 6);
    for (int trial = 0; trial < 30; ++trial) {
      BowCorpus bow;
      bow.vocab_size = 6;
      std::vector<int> labels;
      for (int d = 0; d < 40; ++d) {
        std::map<int, int> c;
        for (int i = 0; i < 4; ++i) c[term(gen)] += 1 + cnt(gen);
        SparseDoc doc;
        for (auto [id, n] : c) doc.push_back({id, n});
        bow.docs.push_back(doc);
        labels.push_back(d < 7 ? d : lab(gen));
      }
      auto r = merge_similar(labels, bow, 0.5);
      CHECK(r.log.size() <= 6);
      CHECK(r.n_topics == 7 - static_cast<int>(r.log.size()));
      for (const auto& s : r.log) CHECK(s.similarity >= 0.5);
      for (std::size_t d = 0; d < labels.size(); ++d) {
        CHECK((labels[d] == -1) == (r.labels[d] == -1));
        CHECK(r.labels[d] < r.n_topics);
      }
    }
  }

  TEST_CASE("dendrogram joins the closest pair first") {
    auto t = dendrogram(rows({{1, 0, 0}, {0, 0, 1}, {1, 0.05, 0}}));
    REQUIRE(t.merges.size() == 2);
    CHECK(t.merges[0].left == 0);
    CHECK(t.merges[0].right == 2);
    CHECK(t.merges[0].id == 3);
    CHECK(t.merges[1].size == 3);
    CHECK(t.to_json().find("\"children\"") != std::string::npos);
  }

  TEST_CASE("dendrogram matches the naive agglomeration") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<double>> v(5, std::vector<double>(6));
      for (auto& r : v) {
        for (auto& x : r) x = u(gen);
      }
      auto got = dendrogram(rows(v));
      auto want = naive_average_linkage(v);
      REQUIRE(got.merges.size() == want.size());
      double prev = -1;
      for (std::size_t s = 0; s < want.size(); ++s) {
        CHECK(got.merges[s].left == want[s].left);
        CHECK(got.merges[s].right == want[s].right);
        CHECK(got.merges[s].id == want[s].id);
        CHECK(got.merges[s].size == want[s].size);
        CHECK(got.merges[s].height == doctest::Approx(want[s].height).epsilon(1e-12));
        CHECK(got.merges[s].height >= prev - 1e-12);
        prev = got.merges[s].height;
      }
    }
  }

  TEST_CASE("jensen shannon divergence") {
    std::vector<double> p{0.2, 0.3, 0.5}, q{0.5, 0.5, 0.0}, a{1, 0}, b{0, 1};
    CHECK(std::abs(jsd(p, p)) < 1e-12);
    CHECK(std::abs(jsd(a, b) - 1.0) < 1e-12);
    CHECK(jsd(p, q) == doctest::Approx(js_base2(p, q)).epsilon(1e-12));
    CHECK(jsd(p, q) == jsd(q, p));
  }

  TEST_CASE("mds reproduces three topic distances") {
    auto phi = rows({{0.7, 0.2, 0.1, 0.0}, {0.1, 0.6, 0.2, 0.1}, {0.05, 0.05, 0.3, 0.6}});
    auto theta = rows({{0.8, 0.1, 0.1}, {0.2, 0.5, 0.3}});
    auto map = intertopic_map(phi, theta, {10, 30});
    CHECK_FALSE(map.degenerate);
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const double want = jsd(phi.row(i), phi.row(j));
        const double got = std::hypot(map.coords(i, 0) - map.coords(j, 0), map.coords(i, 1) - map.coords(j, 1));
        CHECK(std::abs(got - want) / want < 0.10);
      }
    }
    CHECK(map.prevalence[0] == doctest::Approx((0.8 * 10 + 0.2 * 30) / 40.0).epsilon(1e-12));
    double sum = 0;
    for (double v : map.prevalence) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-9);
    auto two = intertopic_map(rows({{0.5, 0.5}, {0.9, 0.1}}), rows({{0.5, 0.5}}), {4});
    CHECK(two.degenerate);
    CHECK(two.coords.rows() == 2);
  }

  TEST_CASE("summaries and exports") {
    auto w = ctfidf(rows({{4, 0, 1}, {0, 2, 1}}));
    Vocabulary terms({"apple", "banana", "cherry"}, {1, 1, 2}, 3);
    Matrix pts = rows({{0, 0}, {1, 0}, {5, 5}, {100, 100}});
    auto sums = summarize_topics(w, terms, {0, 0, 1, -1}, pts, {"a", "b", "c", "d"}, 2, 3);
    REQUIRE(sums.size() == 2);
    CHECK(sums[0].size == 2);
    CHECK(sums[0].top_terms[0].term == "apple");
    CHECK(sums[1].top_terms[0].term == "banana");
    CHECK(sums[1].representative_docs == std::vector<std::string>{"c"});
    CHECK(summaries_json(sums).find("\"apple\"") != std::string::npos);
    auto sim = topic_similarity(w.weights).values;
    auto csv = heatmap_csv(sim);
    CHECK(csv.rfind("topic,0,1\n0,1,", 0) == 0);
    CHECK(heatmap_svg(sim).rfind("<svg", 0) == 0);
    CHECK(dendrogram_svg(dendrogram(w.weights)).rfind("<svg", 0) == 0);
  }
}
