#include "litclass/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "litclass/error.hpp"
#include "litclass/hash.hpp"

namespace litclass {
namespace {

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_lower_word(const std::string& w) {
  return std::none_of(w.begin(), w.end(), [](unsigned char c) { return std::isupper(c); });
}

void check_df_bounds(std::size_t min_df, double max_df) {
  if (min_df < 1) throw InvalidArgument("min_df must be >= 1");
  if (!(max_df > 0.0 && max_df <= 1.0)) throw InvalidArgument("max_df must be in (0, 1]");
}

bool df_retained(std::size_t df, std::size_t n_docs, std::size_t min_df, double max_df) {
  // Exact rational comparison of df / n_docs <= max_df, with slack for the
  // binary representation of max_df.
  return df >= min_df &&
         static_cast<double>(df) <= max_df * static_cast<double>(n_docs) * (1.0 + 1e-12);
}

struct DfEntry {
  std::size_t df = 0;
  std::size_t last_doc = static_cast<std::size_t>(-1);
  std::size_t first_seen = 0;
};

// Counts document frequency of each key, remembering first-appearance order.
template <typename ForEachKey>
Vocabulary pruned_vocabulary(std::size_t n_docs, std::size_t min_df, double max_df,
                             ForEachKey&& for_each_key) {
  std::unordered_map<std::string, DfEntry> df;
  std::vector<const std::string*> order;
  for (std::size_t d = 0; d < n_docs; ++d) {
    for_each_key(d, [&](std::string key) {
      auto [it, inserted] = df.try_emplace(std::move(key));
      if (inserted) {
        it->second.first_seen = order.size();
        order.push_back(&it->first);
      }
      if (it->second.last_doc != d) {
        it->second.last_doc = d;
        ++it->second.df;
      }
    });
  }
  std::vector<std::string> tokens;
  std::vector<std::size_t> dfs;
  for (const std::string* key : order) {
    const auto& e = df.at(*key);
    if (df_retained(e.df, n_docs, min_df, max_df)) {
      tokens.push_back(*key);
      dfs.push_back(e.df);
    }
  }
  return Vocabulary(std::move(tokens), std::move(dfs), n_docs);
}

SparseDoc count_ids(const std::vector<int>& ids) {
  SparseDoc out;
  std::vector<int> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  for (int id : sorted) {
    if (!out.empty() && out.back().id == id) {
      ++out.back().count;
    } else {
      out.push_back({id, 1});
    }
  }
  return out;
}

}  // namespace

void TokenizerConfig::validate() const {
  if (min_token_len < 1) throw InvalidArgument("tokenizer: min_token_len must be >= 1");
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= cfg.min_token_len) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    if (is_ascii_alpha(c)) {
      cur.push_back(cfg.lowercase ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

StopList StopList::defaults() {
  StopList s;
  s.standard.insert(english_words().begin(), english_words().end());
  s.domain.insert(domain_words().begin(), domain_words().end());
  return s;
}

std::unordered_set<std::string> StopList::read_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stop list " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
    line.erase(0, start);
    if (line.empty() || line[0] == '#') continue;
    std::transform(line.begin(), line.end(), line.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    words.insert(line);
  }
  return words;
}

void StopList::validate() const {
  for (const auto* set : {&standard, &domain}) {
    for (const auto& w : *set) {
      if (!is_lower_word(w)) throw InvalidArgument("stop list entry not lowercase: " + w);
    }
  }
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopList& stops) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stops.contains(t)) out.push_back(t);
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> doc_freq,
                       std::size_t n_docs)
    : tokens_(std::move(tokens)), doc_freq_(std::move(doc_freq)), n_docs_(n_docs) {
  if (tokens_.size() != doc_freq_.size()) throw InvalidArgument("vocabulary: size mismatch");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw InvalidArgument("vocabulary: duplicate token '" + tokens_[i] + "'");
    }
  }
}

std::optional<int> Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out += tokens_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\t';
    out += std::to_string(doc_freq_[i]);
    out += '\n';
  }
  return out;
}

void Vocabulary::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize();
}

Vocabulary Vocabulary::read(const std::filesystem::path& path, std::size_t n_docs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> tokens;
  std::vector<std::size_t> dfs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected token<TAB>id<TAB>df");
    }
    std::size_t id = std::stoul(line.substr(t1 + 1, t2 - t1 - 1));
    if (id != tokens.size()) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": ids must be dense and ordered");
    }
    tokens.push_back(line.substr(0, t1));
    dfs.push_back(std::stoul(line.substr(t2 + 1)));
  }
  return Vocabulary(std::move(tokens), std::move(dfs), n_docs);
}

std::string Vocabulary::content_hash() const { return sha256_hex(serialize()); }

Vocabulary build_vocabulary(const TokenDocs& docs, std::size_t min_df, double max_df) {
  if (docs.empty()) throw InvalidArgument("build_vocabulary: empty corpus");
  check_df_bounds(min_df, max_df);
  return pruned_vocabulary(docs.size(), min_df, max_df, [&](std::size_t d, auto&& emit) {
    for (const auto& t : docs[d]) emit(t);
  });
}

std::size_t BowCorpus::doc_length(std::size_t d) const {
  std::size_t n = 0;
  for (const auto& tc : docs[d]) n += static_cast<std::size_t>(tc.count);
  return n;
}

std::size_t BowCorpus::total_tokens() const {
  std::size_t n = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) n += doc_length(d);
  return n;
}

void BowCorpus::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    out << d << ':';
    for (const auto& tc : docs[d]) out << ' ' << tc.id << ':' << tc.count;
    out << '\n';
  }
}

BowCorpus BowCorpus::read(const std::filesystem::path& path, std::size_t vocab_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  BowCorpus bow;
  bow.vocab_size = vocab_size;
  std::string line;
  while (std::getline(in, line)) {
    auto where = path.string() + ":" + std::to_string(bow.docs.size() + 1) + ": ";
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head != std::to_string(bow.docs.size()) + ":") throw ParseError(where + "bad document id");
    SparseDoc doc;
    std::string item;
    while (ls >> item) {
      auto colon = item.find(':');
      if (colon == std::string::npos) throw ParseError(where + "expected id:count");
      TermCount tc{std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))};
      if (tc.id < 0 || static_cast<std::size_t>(tc.id) >= vocab_size || tc.count <= 0 ||
          (!doc.empty() && doc.back().id >= tc.id)) {
        throw ParseError(where + "invalid entry " + item);
      }
      doc.push_back(tc);
    }
    bow.docs.push_back(std::move(doc));
  }
  return bow;
}

SparseDoc to_bow(const std::vector<std::string>& doc, const Vocabulary& vocab) {
  std::vector<int> ids;
  ids.reserve(doc.size());
  for (const auto& t : doc) {
    if (auto id = vocab.id(t)) ids.push_back(*id);
  }
  return count_ids(ids);
}

BowCorpus to_bow(const TokenDocs& docs, const Vocabulary& vocab) {
  BowCorpus bow;
  bow.vocab_size = vocab.size();
  bow.docs.reserve(docs.size());
  for (const auto& d : docs) bow.docs.push_back(to_bow(d, vocab));
  return bow;
}

void NgramConfig::validate() const {
  if (lo < 1 || lo > hi) throw InvalidArgument("ngram: require 1 <= lo <= hi");
  check_df_bounds(min_df, max_df);
}

NgramCounts ngram_counts(const TokenDocs& docs, const NgramConfig& cfg) {
  cfg.validate();
  if (docs.empty()) throw InvalidArgument("ngram_counts: empty corpus");
  auto for_each_gram = [&](std::size_t d, auto&& emit) {
    const auto& toks = docs[d];
    for (std::size_t i = 0; i < toks.size(); ++i) {
      std::string gram;
      for (int n = 1; n <= cfg.hi && i + n <= toks.size(); ++n) {
        if (n > 1) gram += ' ';
        gram += toks[i + n - 1];
        if (n >= cfg.lo) emit(gram);
      }
    }
  };
  NgramCounts out;
  out.vocab = pruned_vocabulary(docs.size(), cfg.min_df, cfg.max_df, for_each_gram);
  out.counts.vocab_size = out.vocab.size();
  out.counts.docs.reserve(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::vector<int> ids;
    for_each_gram(d, [&](const std::string& g) {
      if (auto id = out.vocab.id(g)) ids.push_back(*id);
    });
    out.counts.docs.push_back(count_ids(ids));
  }
  return out;
}

TokenDocs prepare_tokens(const std::vector<std::string>& texts, const TokenizerConfig& cfg,
                         const StopList& stops) {
  TokenDocs docs;
  docs.reserve(texts.size());
  for (const auto& t : texts) docs.push_back(remove_stopwords(tokenize(t, cfg), stops));
  return docs;
}

void write_token_docs(const TokenDocs& docs, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& d : docs) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i) out << ' ';
      out << d[i];
    }
    out << '\n';
  }
}

TokenDocs read_token_docs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  TokenDocs docs;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    docs.push_back(std::move(toks));
  }
  return docs;
}

}  // namespace litclass
