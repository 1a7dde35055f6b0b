#include "litclass/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "litclass/csv.hpp"
#include "litclass/error.hpp"

namespace litclass {
namespace {

constexpr std::size_t kDensePairLimit = 1024;

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void CoherenceConfig::validate() const {
  if (window_size < 1) throw InvalidArgument("coherence: window_size must be >= 1");
  if (top_n < 2) throw InvalidArgument("coherence: top_n must be >= 2");
  if (!(epsilon > 0)) throw InvalidArgument("coherence: epsilon must be > 0");
}

std::size_t WindowCounts::pair_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  return static_cast<std::size_t>(a) * word_.size() + static_cast<std::size_t>(b);
}

std::size_t WindowCounts::word_count(const std::string& w) const {
  auto it = ids_.find(w);
  return it == ids_.end() ? 0 : word_[it->second];
}

std::size_t WindowCounts::pair_count(const std::string& a, const std::string& b) const {
  auto ia = ids_.find(a);
  auto ib = ids_.find(b);
  if (ia == ids_.end() || ib == ids_.end()) return 0;
  if (ia->second == ib->second) return word_[ia->second];
  if (!dense_pairs_.empty()) return dense_pairs_[pair_index(ia->second, ib->second)];
  auto lo = std::min(ia->second, ib->second);
  auto hi = std::max(ia->second, ib->second);
  auto it = sparse_pairs_.find((static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint64_t>(hi));
  return it == sparse_pairs_.end() ? 0 : it->second;
}

std::vector<std::string> WindowCounts::words() const {
  std::vector<std::string> out(ids_.size());
  for (const auto& [w, id] : ids_) out[id] = w;
  return out;
}

WindowCounts window_counts(const TokenDocs& docs, std::size_t window_size,
                           const std::unordered_set<std::string>* relevant) {
  if (window_size < 1) throw InvalidArgument("window_counts: window_size must be >= 1");
  WindowCounts wc;
  if (relevant) {
    std::vector<std::string> sorted(relevant->begin(), relevant->end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& w : sorted) wc.ids_.emplace(w, static_cast<int>(wc.ids_.size()));
  } else {
    for (const auto& doc : docs) {
      for (const auto& t : doc) wc.ids_.emplace(t, static_cast<int>(wc.ids_.size()));
    }
  }
  const std::size_t R = wc.ids_.size();
  wc.word_.assign(R, 0);
  const bool dense = R <= kDensePairLimit;
  if (dense) wc.dense_pairs_.assign(R * R, 0);

  std::vector<int> in_window(R, 0);  // occurrences of each id in the current window
  std::vector<int> present;
  std::vector<int> ids;
  auto count_window = [&] {
    present.clear();
    for (std::size_t r = 0; r < R; ++r) {
      if (in_window[r] > 0) present.push_back(static_cast<int>(r));
    }
    ++wc.n_windows_;
    for (std::size_t i = 0; i < present.size(); ++i) {
      ++wc.word_[present[i]];
      for (std::size_t j = i + 1; j < present.size(); ++j) {
        if (dense) {
          ++wc.dense_pairs_[static_cast<std::size_t>(present[i]) * R + present[j]];
        } else {
          ++wc.sparse_pairs_[(static_cast<std::uint64_t>(present[i]) << 32) |
                             static_cast<std::uint64_t>(present[j])];
        }
      }
    }
  };

  for (const auto& doc : docs) {
    if (doc.empty()) continue;
    ids.clear();
    for (const auto& t : doc) {
      auto it = wc.ids_.find(t);
      ids.push_back(it == wc.ids_.end() ? -1 : it->second);
    }
    std::fill(in_window.begin(), in_window.end(), 0);
    const std::size_t first = std::min(window_size, ids.size());
    for (std::size_t i = 0; i < first; ++i) {
      if (ids[i] >= 0) ++in_window[ids[i]];
    }
    count_window();
    for (std::size_t end = first; end < ids.size(); ++end) {
      if (ids[end - window_size] >= 0) --in_window[ids[end - window_size]];
      if (ids[end] >= 0) ++in_window[ids[end]];
      count_window();
    }
  }
  return wc;
}

double npmi(std::size_t count_a, std::size_t count_b, std::size_t count_ab, std::size_t n_windows,
            double epsilon) {
  if (count_a == 0 || count_b == 0 || n_windows == 0) return -1.0;
  const double n = static_cast<double>(n_windows);
  const double pa = count_a / n;
  const double pb = count_b / n;
  const double pab = count_ab / n + epsilon;
  return std::log(pab / (pa * pb)) / -std::log(pab);
}

double npmi(const std::string& a, const std::string& b, const WindowCounts& counts, double epsilon) {
  return npmi(counts.word_count(a), counts.word_count(b), counts.pair_count(a, b),
              counts.n_windows(), epsilon);
}

CoherenceResult cv_coherence(const std::vector<std::vector<std::string>>& topics,
                             const WindowCounts& counts, const CoherenceConfig& cfg) {
  cfg.validate();
  CoherenceResult result;
  for (const auto& topic : topics) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < topic.size() && i < cfg.top_n; ++i) {
      if (counts.word_count(topic[i]) > 0) words.push_back(topic[i]);
    }
    if (words.size() < 2) {
      result.per_topic.push_back(0.0);
      result.flagged.push_back(true);
      continue;
    }
    const std::size_t m = words.size();
    std::vector<std::vector<double>> vectors(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        vectors[i][j] = vectors[j][i] = npmi(words[i], words[j], counts, cfg.epsilon);
      }
    }
    std::vector<double> sum(m, 0.0);
    for (const auto& v : vectors) {
      for (std::size_t j = 0; j < m; ++j) sum[j] += v[j];
    }
    double score = 0.0;
    for (const auto& v : vectors) score += cosine(v, sum);
    result.per_topic.push_back(score / static_cast<double>(m));
    result.flagged.push_back(false);
  }
  if (!result.per_topic.empty()) {
    double total = 0.0;
    for (double s : result.per_topic) total += s;
    result.score = total / static_cast<double>(result.per_topic.size());
  }
  return result;
}

CoherenceResult cv_coherence(const std::vector<std::vector<std::string>>& topics,
                             const TokenDocs& reference, const CoherenceConfig& cfg) {
  cfg.validate();
  std::unordered_set<std::string> relevant;
  for (const auto& t : topics) {
    for (std::size_t i = 0; i < t.size() && i < cfg.top_n; ++i) relevant.insert(t[i]);
  }
  return cv_coherence(topics, window_counts(reference, cfg.window_size, &relevant), cfg);
}

std::vector<std::vector<std::string>> topic_top_words(const LdaModel& model, const Vocabulary& vocab,
                                                      std::size_t n) {
  n = std::min(n, model.vocab_size());
  std::vector<std::vector<std::string>> out;
  for (int k = 0; k < model.num_topics(); ++k) {
    std::vector<std::string> words;
    for (int id : top_words(model, k, n)) words.push_back(vocab.token(id));
    out.push_back(std::move(words));
  }
  return out;
}

void SweepOptions::validate() const {
  if (kmin < 1 || kmin > kmax) throw InvalidArgument("sweep: require 1 <= kmin <= kmax");
  hyper_for(kmin).validate();
}

LdaHyperparams SweepOptions::hyper_for(int k) const {
  LdaHyperparams h = LdaHyperparams::with_topics(k, base_seed + static_cast<std::uint64_t>(k));
  if (alpha) h.alpha = *alpha;
  h.beta = beta;
  h.iterations = iterations;
  h.burn_in = burn_in;
  return h;
}

SweepResult sweep_topics(const BowCorpus& train, const BowCorpus& heldout, const TokenDocs& reference,
                         const Vocabulary& vocab, const SweepOptions& options,
                         const CoherenceConfig& cfg, const LdaTrainer& trainer) {
  options.validate();
  cfg.validate();
  SweepResult result;
  bool have_best = false;
  double best = 0.0;
  for (int k = options.kmin; k <= options.kmax; ++k) {
    SweepRow row;
    row.k = k;
    try {
      const auto hyper = options.hyper_for(k);
      LdaModel model = trainer ? trainer(train, hyper) : train_lda(train, hyper);
      row.coherence = cv_coherence(topic_top_words(model, vocab, cfg.top_n), reference, cfg).score;
      row.heldout_loglik = heldout_log_likelihood(model, heldout);
    } catch (const std::exception& e) {
      row.failed = true;
      row.message = e.what();
      std::cerr << "warning: sweep k=" << k << " failed: " << e.what() << '\n';
    }
    if (!row.failed && (!have_best || row.coherence > best)) {
      have_best = true;
      best = row.coherence;
      result.selected_k = k;
    }
    result.rows.push_back(std::move(row));
  }
  if (!have_best) throw Error("sweep: every k failed");
  return result;
}

void SweepResult::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  csv::write_row(out, {"k", "coherence", "heldout_loglik"});
  for (const auto& r : rows) {
    if (r.failed) {
      csv::write_row(out, {std::to_string(r.k), "", ""});
    } else {
      csv::write_row(out, {std::to_string(r.k), format_double(r.coherence),
                           format_double(r.heldout_loglik)});
    }
  }
}

SweepResult SweepResult::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row != std::vector<std::string>{"k", "coherence", "heldout_loglik"}) {
    throw ParseError(path.string() + ":1: unexpected sweep header");
  }
  SweepResult result;
  bool have_best = false;
  while (reader.next(row)) {
    if (row.size() != 3) throw ParseError(path.string() + ":" + std::to_string(reader.line()) + ": bad row");
    SweepRow r;
    r.k = std::stoi(row[0]);
    if (row[1].empty()) {
      r.failed = true;
    } else {
      r.coherence = std::stod(row[1]);
      r.heldout_loglik = std::stod(row[2]);
    }
    result.rows.push_back(r);
  }
  double best = 0.0;
  for (const auto& r : result.rows) {
    if (!r.failed && (!have_best || r.coherence > best)) {
      have_best = true;
      best = r.coherence;
      result.selected_k = r.k;
    }
  }
  return result;
}

CorpusSplit split_heldout(const BowCorpus& bow, std::size_t every) {
  if (every < 2) throw InvalidArgument("split_heldout: every must be >= 2");
  CorpusSplit split;
  split.train.vocab_size = split.heldout.vocab_size = bow.vocab_size;
  for (std::size_t d = 0; d < bow.docs.size(); ++d) {
    (d % every == every - 1 ? split.heldout : split.train).docs.push_back(bow.docs[d]);
  }
  return split;
}

}  // namespace litclass
