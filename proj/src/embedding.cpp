#include "litclass/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "litclass/error.hpp"
#include "litclass/rng.hpp"

namespace litclass {

Metric parse_metric(std::string_view name) {
  if (name == "manhattan" || name == "l1") return Metric::kManhattan;
  if (name == "euclidean" || name == "l2") return Metric::kEuclidean;
  if (name == "cosine") return Metric::kCosine;
  throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kManhattan: return "manhattan";
    case Metric::kEuclidean: return "euclidean";
    case Metric::kCosine: return "cosine";
  }
  return "?";
}

double distance(std::span<const double> a, std::span<const double> b, Metric m) {
  const std::size_t n = a.size();
  switch (m) {
    case Metric::kManhattan: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
      return s;
    }
    case Metric::kEuclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case Metric::kCosine: {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
      }
      if (na == 0.0 || nb == 0.0) return 1.0;
      return std::max(0.0, 1.0 - dot / std::sqrt(na * nb));
    }
  }
  return 0.0;
}

Matrix load_embeddings(const std::filesystem::path& path, std::optional<std::size_t> expected_rows) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ":1: missing header");
  std::istringstream hs(line);
  std::size_t n = 0, dim = 0;
  if (!(hs >> n >> dim) || dim == 0) throw ParseError(path.string() + ":1: expected 'n dim'");
  if (expected_rows && *expected_rows != n) {
    throw ParseError(path.string() + ": embedding has " + std::to_string(n) +
                     " rows but the corpus has " + std::to_string(*expected_rows) + " documents");
  }
  Matrix m(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string where = path.string() + ":" + std::to_string(i + 2) + ": ";
    if (!std::getline(in, line)) throw ParseError(where + "missing row");
    const char* p = line.c_str();
    for (std::size_t j = 0; j < dim; ++j) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw ParseError(where + "expected " + std::to_string(dim) + " values");
      if (!std::isfinite(v)) throw ParseError(where + "non-finite value");
      m(i, j) = v;
      p = end;
    }
    while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
    if (*p != '\0') throw ParseError(where + "more than " + std::to_string(dim) + " values");
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError(path.string() + ": more rows than the header declares");
    }
  }
  return m;
}

void save_embeddings(const Matrix& m, const std::filesystem::path& path, int precision, char separator) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << m.rows() << separator << m.cols() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.*g", precision, m(i, j));
      if (j) out << separator;
      out << buf;
    }
    out << '\n';
  }
}

Matrix fallback_embed(const BowCorpus& bow, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("fallback_embed: dim must be positive");
  const std::size_t V = bow.vocab_size;
  const double n_docs = static_cast<double>(bow.docs.size());
  std::vector<double> df(V, 0.0);
  for (const auto& doc : bow.docs) {
    for (const auto& tc : doc) df[tc.id] += 1.0;
  }
  std::vector<double> idf(V);
  for (std::size_t t = 0; t < V; ++t) idf[t] = std::log((1.0 + n_docs) / (1.0 + df[t])) + 1.0;

  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix projection(V, dim);
  for (double& v : projection.data()) v = (rng.next() >> 63) ? scale : -scale;

  Matrix out(bow.docs.size(), dim);
  for (std::size_t d = 0; d < bow.docs.size(); ++d) {
    auto row = out.row(d);
    for (const auto& tc : bow.docs[d]) {
      const double w = tc.count * idf[tc.id];
      auto proj = projection.row(tc.id);
      for (std::size_t j = 0; j < dim; ++j) row[j] += w * proj[j];
    }
    double norm = 0.0;
    for (double v : row) norm += v * v;
    if (norm > 0) {
      norm = std::sqrt(norm);
      for (double& v : row) v /= norm;
    }
  }
  return out;
}

}  // namespace litclass
