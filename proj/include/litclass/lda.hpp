#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "litclass/matrix.hpp"
#include "litclass/textprep.hpp"

namespace litclass {

struct LdaHyperparams {
  int num_topics = 14;
  double alpha = 50.0 / 14;  // symmetric prior on document-topic mixtures
  double beta = 0.01;        // symmetric prior on topic-word distributions
  int iterations = 1000;
  int burn_in = 200;
  std::uint64_t seed = 0;

  // Conventional defaults: alpha = 50 / K, beta = 0.01.
  static LdaHyperparams with_topics(int k, std::uint64_t seed = 0);
  void validate() const;
};

// Count tables of a collapsed Gibbs state. Topic-word counts are stored
// word-major since the sampler reads all topics of one word at a time.
class LdaModel {
 public:
  int num_topics() const { return hyper_.num_topics; }
  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t num_docs() const { return doc_len_.size(); }
  const LdaHyperparams& hyper() const { return hyper_; }

  int topic_word(int k, int w) const {
    return word_topic_[static_cast<std::size_t>(w) * num_topics() + k];
  }
  int doc_topic(std::size_t d, int k) const { return doc_topic_[d * num_topics() + k]; }
  int topic_total(int k) const { return topic_total_[static_cast<std::size_t>(k)]; }
  int doc_length(std::size_t d) const { return doc_len_[d]; }
  std::size_t total_tokens() const;

  // Per-token topic assignments in corpus order (documents in order, tokens
  // expanded from sparse counts in id order). Empty after load().
  const std::vector<int>& assignments() const { return z_; }

  // Checks sum_w n_kw = n_k, sum_k n_dk = N_d and non-negativity.
  bool counts_consistent() const;

  std::string vocab_hash;

  // Structured-text model file; see README for the layout.
  void save(const std::filesystem::path& path) const;
  static LdaModel load(const std::filesystem::path& path);

 private:
  friend class GibbsSampler;

  LdaHyperparams hyper_;
  std::size_t vocab_size_ = 0;
  std::vector<int> word_topic_;   // V x K
  std::vector<int> doc_topic_;    // D x K
  std::vector<int> topic_total_;  // K
  std::vector<int> doc_len_;      // D
  std::vector<int> z_;
};

// Called after each completed sweep (1-based).
using SweepCallback = std::function<void(int sweep, const LdaModel&)>;

// Collapsed Gibbs sampling: every token is resampled from
// p(z = k | rest) ∝ (n_dk + alpha)(n_kw + beta) / (n_k + V beta) with its own
// assignment removed. Empty documents are skipped; throws InvalidArgument
// when every document is empty. Deterministic for a given seed.
LdaModel train_lda(const BowCorpus& bow, const LdaHyperparams& hyper,
                   const SweepCallback& on_sweep = {});

// phi[k][w] = (n_kw + beta) / (n_k + V beta)
Matrix phi(const LdaModel& model);
// theta[d][k] = (n_dk + alpha) / (N_d + K alpha)
Matrix theta(const LdaModel& model);

inline constexpr int kFoldInSweeps = 20;

// Mean per-token log-likelihood of held-out documents, (1/N) sum log
// sum_k theta_d[k] phi[k][w]. Each document's mixture is estimated by
// `fold_in_sweeps` Gibbs sweeps with phi frozen, seeded from the model seed
// and the document's content. Always <= 0; documents without tokens are
// ignored. This is the quantity some toolkits report as "log perplexity".
double heldout_log_likelihood(const LdaModel& model, const BowCorpus& heldout,
                              int fold_in_sweeps = kFoldInSweeps);

// Ids of the n highest-probability words of topic k, ties by lower id.
std::vector<int> top_words(const LdaModel& model, int k, std::size_t n = 10);

}  // namespace litclass
