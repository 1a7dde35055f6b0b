#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "litclass/matrix.hpp"
#include "litclass/textprep.hpp"

namespace litclass {

enum class Metric { kManhattan, kEuclidean, kCosine };

Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric m);

// Cosine distance is 1 - cos; a zero vector has cosine 0 with everything.
double distance(std::span<const double> a, std::span<const double> b, Metric m);

// Embedding file: first line "n dim", then n rows of dim space-separated
// reals, rows in corpus order. Throws ParseError on a short row, a
// non-finite value, or a row count that differs from `expected_rows`.
Matrix load_embeddings(const std::filesystem::path& path,
                       std::optional<std::size_t> expected_rows = std::nullopt);
// Tab-separated output (reduced.tsv) reads back the same way.
void save_embeddings(const Matrix& m, const std::filesystem::path& path, int precision = 17,
                     char separator = ' ');

// Offline stand-in for a sentence encoder: TF-IDF rows (count * idf with
// idf = ln((1 + N) / (1 + df)) + 1) projected through a seeded random
// +-1/sqrt(dim) matrix, then L2-normalized. Rows of empty documents are zero.
Matrix fallback_embed(const BowCorpus& bow, std::size_t dim, std::uint64_t seed);

}  // namespace litclass
