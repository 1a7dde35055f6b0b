#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "litclass/lda.hpp"
#include "litclass/textprep.hpp"

namespace litclass {

struct CoherenceConfig {
  std::size_t window_size = 110;
  std::size_t top_n = 10;
  double epsilon = 1e-12;

  void validate() const;
};

// Boolean sliding-window occurrence counts. Windows have stride 1; a document
// shorter than the window is a single window and an empty document has none.
class WindowCounts {
 public:
  std::size_t n_windows() const { return n_windows_; }
  std::size_t word_count(const std::string& w) const;
  std::size_t pair_count(const std::string& a, const std::string& b) const;
  // Every word that was counted (the relevant set, or all words seen).
  std::vector<std::string> words() const;

 private:
  friend WindowCounts window_counts(const TokenDocs&, std::size_t,
                                    const std::unordered_set<std::string>*);
  std::size_t pair_index(int a, int b) const;

  std::size_t n_windows_ = 0;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::size_t> word_;
  std::vector<std::size_t> dense_pairs_;  // used when the word set is small
  std::unordered_map<std::uint64_t, std::size_t> sparse_pairs_;
};

// When `relevant` is given only those words are counted, but windows still
// slide over every token.
WindowCounts window_counts(const TokenDocs& docs, std::size_t window_size,
                           const std::unordered_set<std::string>* relevant = nullptr);

// log(p12' / (p1 p2)) / -log(p12') with p12' = p12 + epsilon. Unseen words
// score -1, the epsilon -> 0 limit.
double npmi(std::size_t count_a, std::size_t count_b, std::size_t count_ab,
            std::size_t n_windows, double epsilon = 1e-12);
double npmi(const std::string& a, const std::string& b, const WindowCounts& counts,
            double epsilon = 1e-12);

struct CoherenceResult {
  double score = 0.0;               // mean over topics
  std::vector<double> per_topic;
  std::vector<bool> flagged;        // fewer than two words seen in the reference corpus
};

// C_v: each top word's NPMI vector against the topic's top words is compared
// by cosine with the sum of all those vectors; topic score is the mean cosine.
CoherenceResult cv_coherence(const std::vector<std::vector<std::string>>& topics,
                             const WindowCounts& counts, const CoherenceConfig& cfg = {});
CoherenceResult cv_coherence(const std::vector<std::vector<std::string>>& topics,
                             const TokenDocs& reference, const CoherenceConfig& cfg = {});

// Top words of every topic of a model, as strings.
std::vector<std::vector<std::string>> topic_top_words(const LdaModel& model, const Vocabulary& vocab,
                                                      std::size_t n);

struct SweepRow {
  int k = 0;
  double coherence = 0.0;
  double heldout_loglik = 0.0;
  bool failed = false;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by k
  int selected_k = 0;          // argmax coherence, ties to the smaller k

  // Columns k,coherence,heldout_loglik; failed rows carry empty metrics.
  void write_csv(const std::filesystem::path& path) const;
  static SweepResult read_csv(const std::filesystem::path& path);
};

struct SweepOptions {
  int kmin = 10;
  int kmax = 30;
  std::optional<double> alpha;  // default 50 / k
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 200;
  std::uint64_t base_seed = 0;  // model for k uses base_seed + k

  void validate() const;
  LdaHyperparams hyper_for(int k) const;
};

using LdaTrainer = std::function<LdaModel(const BowCorpus&, const LdaHyperparams&)>;

// Trains one model per k, scoring C_v on `reference` and held-out likelihood
// on `heldout`. A k whose training throws becomes a failed row.
SweepResult sweep_topics(const BowCorpus& train, const BowCorpus& heldout, const TokenDocs& reference,
                         const Vocabulary& vocab, const SweepOptions& options,
                         const CoherenceConfig& cfg = {}, const LdaTrainer& trainer = {});

struct CorpusSplit {
  BowCorpus train;
  BowCorpus heldout;
};

// Every `every`-th document (index % every == every - 1) is held out.
CorpusSplit split_heldout(const BowCorpus& bow, std::size_t every = 10);

}  // namespace litclass
