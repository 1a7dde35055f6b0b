#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace litclass {

enum class BoolOp { kAnd, kOr };

// A PubMed search: a keyword disjunction/conjunction limited to a span of
// publication years.
struct QuerySpec {
  std::vector<std::string> keywords;
  BoolOp boolean_op = BoolOp::kOr;
  int date_from = 2015;
  int date_to = 2025;
  std::string database = "pubmed";

  // Keyword list used for the childhood speech-disorder corpus.
  static QuerySpec speech_disorders();

  // Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

// One article's metadata. Optional fields are absent rather than empty.
struct DocumentRecord {
  std::string pmid;
  std::string title;
  std::vector<std::string> authors;
  std::optional<int> year;
  std::string journal;
  std::optional<std::string> abstract;
  std::optional<std::string> doi;
  std::optional<std::string> language;  // lowercase ISO-639-2, e.g. "eng"

  bool operator==(const DocumentRecord&) const = default;
};

inline constexpr int kMinYear = 1800;
inline constexpr int kMaxYear = 2100;

// Renders `("a" OR "b") AND ("2015"[pdat] : "2025"[pdat])`.
std::string build_query(const QuerySpec& spec);

// Corpus CSV with header pmid,title,authors,year,journal,abstract,doi,language.
// Authors are joined by "; ". Returns the number of data rows written.
std::size_t write_corpus_csv(const std::vector<DocumentRecord>& records,
                             const std::filesystem::path& path);
void write_corpus_csv(const std::vector<DocumentRecord>& records, std::ostream& out);

// Throws ParseError naming the offending line for malformed rows, bad years,
// non-numeric or duplicate PMIDs.
std::vector<DocumentRecord> read_corpus_csv(const std::filesystem::path& path);
std::vector<DocumentRecord> read_corpus_csv(std::istream& in);

}  // namespace litclass
