#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "litclass/embedding.hpp"
#include "litclass/error.hpp"

using namespace litclass;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return d / std::sqrt(na * nb);
}

}  // namespace

TEST_SUITE("embedding") {
  TEST_CASE("distances") {
    std::vector<double> a{1, 2}, b{4, 6};
    CHECK(distance(a, b, Metric::kManhattan) == 7.0);
    CHECK(distance(a, b, Metric::kEuclidean) == 5.0);
    std::vector<double> x{1, 0}, y{0, 3}, z{0, 0};
    CHECK(distance(x, y, Metric::kCosine) == doctest::Approx(1.0));
    CHECK(distance(x, x, Metric::kCosine) == doctest::Approx(0.0));
    CHECK(distance(x, z, Metric::kCosine) == doctest::Approx(1.0));
    CHECK(parse_metric("manhattan") == Metric::kManhattan);
    CHECK_THROWS_AS(parse_metric("chebyshev"), InvalidArgument);
  }

  TEST_CASE("embedding file loads and validates") {
    testing::TempDir dir("emb");
    write_text(dir / "ok.txt", "3 4\n1 2 3 4\n5 6 7 8\n0.5 -1 1e-3 2\n");
    auto m = load_embeddings(dir / "ok.txt", 3);
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 4);
    CHECK(m(2, 2) == 1e-3);
    CHECK_THROWS_AS(load_embeddings(dir / "ok.txt", 4), ParseError);
    write_text(dir / "short.txt", "2 3\n1 2 3\n4 5\n");
    CHECK_THROWS_AS(load_embeddings(dir / "short.txt"), ParseError);
    write_text(dir / "nan.txt", "1 2\nnan 1\n");
    CHECK_THROWS_AS(load_embeddings(dir / "nan.txt"), ParseError);
    CHECK_THROWS_AS(load_embeddings(dir / "missing.txt"), IoError);
  }

  TEST_CASE("save and load round trip, tab separated too") {
    Matrix m(2, 3);
    m(0, 0) = 0.1;
    m(1, 2) = -1.0 / 3.0;
    testing::TempDir dir("emb2");
    save_embeddings(m, dir / "a.txt");
    CHECK(load_embeddings(dir / "a.txt") == m);
    save_embeddings(m, dir / "b.tsv", 17, '\t');
    CHECK(load_embeddings(dir / "b.tsv") == m);
  }

  TEST_CASE("fallback embedder basics") {
    BowCorpus bow{{{{0, 2}, {3, 1}}, {{0, 2}, {3, 1}}, {}}, 5};
    auto e = fallback_embed(bow, 16, 0);
    CHECK(e.rows() == 3);
    CHECK(e.cols() == 16);
    for (std::size_t j = 0; j < 16; ++j) {
      CHECK(e(0, j) == e(1, j));
      CHECK(e(2, j) == 0.0);
    }
    double norm = 0;
    for (double v : e.row(0)) norm += v * v;
    CHECK(norm == doctest::Approx(1.0));
    CHECK(fallback_embed(bow, 16, 0) == e);
    CHECK_FALSE(fallback_embed(bow, 16, 1) == e);
  }

  TEST_CASE("fallback projection keeps tf-idf cosines") {
    std::mt19937_64 gen(3);
    const std::size_t V = 300, D = 60;
    std::uniform_int_distribution<int> word(0, 59);
    std::uniform_int_distribution<int> shift(0, 4);
    BowCorpus bow;
    bow.vocab_size = V;
    for (std::size_t d = 0; d < D; ++d) {
      std::map<int, int> c;
      const int base = shift(gen) * 60;
      for (int i = 0; i < 80; ++i) ++c[base + word(gen)];
      SparseDoc doc;
      for (auto [id, n] : c) doc.push_back({id, n});
      bow.docs.push_back(doc);
    }
    std::vector<double> df(V, 0.0);
    for (const auto& d : bow.docs) {
      for (auto t : d) df[t.id] += 1;
    }
    auto tfidf = [&](std::size_t d) {
      std::vector<double> v(V, 0.0);
      for (auto t : bow.docs[d]) v[t.id] = t.count * (std::log((1.0 + D) / (1.0 + df[t.id])) + 1.0);
      return v;
    };
    auto e = fallback_embed(bow, 256, 0);
    std::uniform_int_distribution<std::size_t> pick(0, D - 1);
    double worst = 0.0;
    for (int p = 0; p < 50; ++p) {
      std::size_t i = pick(gen), j = pick(gen);
      if (i == j) j = (j + 1) % D;
      std::vector<double> a(e.row(i).begin(), e.row(i).end()), b(e.row(j).begin(), e.row(j).end());
      worst = std::max(worst, std::abs(cosine(a, b) - cosine(tfidf(i), tfidf(j))));
    }
    CHECK(worst < 0.15);
  }
}
