#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace litclass {

struct TokenizerConfig {
  bool lowercase = true;
  std::size_t min_token_len = 3;

  void validate() const;
};

// Splits on anything that is not an ASCII letter and keeps tokens of at least
// min_token_len characters, in text order.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg = {});

struct StopList {
  std::unordered_set<std::string> standard;
  std::unordered_set<std::string> domain;

  // Bundled English list plus the speech-pathology domain list.
  static StopList defaults();
  static const std::vector<std::string>& english_words();
  static const std::vector<std::string>& domain_words();
  static constexpr const char* kVersion = "en-2024.1";

  // One word per line; blank lines and lines starting with '#' are ignored.
  static std::unordered_set<std::string> read_word_list(const std::filesystem::path& path);

  bool contains(const std::string& token) const {
    return standard.count(token) > 0 || domain.count(token) > 0;
  }
  void validate() const;
};

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopList& stops);

using TokenDocs = std::vector<std::vector<std::string>>;

// Token <-> id mapping with per-token document frequency.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws InvalidArgument if tokens repeat or sizes disagree.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> doc_freq, std::size_t n_docs);

  std::optional<int> id(const std::string& token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t doc_freq(int id) const { return doc_freq_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Text form: one "token<TAB>id<TAB>df" line per entry, ordered by id.
  std::string serialize() const;
  void write(const std::filesystem::path& path) const;
  static Vocabulary read(const std::filesystem::path& path, std::size_t n_docs);
  std::string content_hash() const;

  bool operator==(const Vocabulary& o) const {
    return tokens_ == o.tokens_ && doc_freq_ == o.doc_freq_ && n_docs_ == o.n_docs_;
  }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> tokens_;
  std::vector<std::size_t> doc_freq_;
  std::size_t n_docs_ = 0;
};

// Retains a token iff min_df <= df and df / n_docs <= max_df (inclusive).
// Ids follow first appearance. Throws InvalidArgument on an empty corpus or
// out-of-range thresholds.
Vocabulary build_vocabulary(const TokenDocs& docs, std::size_t min_df, double max_df);

struct TermCount {
  int id = 0;
  int count = 0;
  bool operator==(const TermCount&) const = default;
};

// Sorted by id, counts positive.
using SparseDoc = std::vector<TermCount>;

struct BowCorpus {
  std::vector<SparseDoc> docs;
  std::size_t vocab_size = 0;

  std::size_t total_tokens() const;
  std::size_t doc_length(std::size_t d) const;

  // One line per document: "docid: id:count id:count ...".
  void write(const std::filesystem::path& path) const;
  static BowCorpus read(const std::filesystem::path& path, std::size_t vocab_size);

  bool operator==(const BowCorpus&) const = default;
};

SparseDoc to_bow(const std::vector<std::string>& doc, const Vocabulary& vocab);
BowCorpus to_bow(const TokenDocs& docs, const Vocabulary& vocab);

struct NgramConfig {
  int lo = 1;
  int hi = 3;
  std::size_t min_df = 5;
  double max_df = 0.95;

  void validate() const;
};

struct NgramCounts {
  Vocabulary vocab;  // entries are space-joined n-grams
  BowCorpus counts;
};

// Contiguous n-grams (lo <= n <= hi) over each token list, pruned by the same
// document-frequency rule as build_vocabulary.
NgramCounts ngram_counts(const TokenDocs& docs, const NgramConfig& cfg);

// Lower-cased, stop-filtered token lists for a set of texts.
TokenDocs prepare_tokens(const std::vector<std::string>& texts, const TokenizerConfig& cfg,
                         const StopList& stops);

// Writes/reads token documents, one document per line, tokens space-separated.
void write_token_docs(const TokenDocs& docs, const std::filesystem::path& path);
TokenDocs read_token_docs(const std::filesystem::path& path);

}  // namespace litclass
