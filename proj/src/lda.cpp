#include "litclass/lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "litclass/error.hpp"
#include "litclass/rng.hpp"

namespace litclass {
namespace {

constexpr const char* kModelMagic = "litclass-lda-model";
constexpr int kModelVersion = 1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t doc_seed(std::uint64_t base, const SparseDoc& doc) {
  std::uint64_t h = splitmix64(base ^ 0x6a09e667f3bcc908ULL);
  for (const auto& tc : doc) {
    h = splitmix64(h ^ static_cast<std::uint64_t>(tc.id));
    h = splitmix64(h ^ static_cast<std::uint64_t>(tc.count));
  }
  return h;
}

// Draws an index from unnormalized cumulative weights.
int sample_cumulative(const std::vector<double>& cum, Rng& rng) {
  const double u = rng.uniform() * cum.back();
  const int n = static_cast<int>(cum.size());
  for (int k = 0; k < n - 1; ++k) {
    if (u < cum[k]) return k;
  }
  return n - 1;
}

}  // namespace

LdaHyperparams LdaHyperparams::with_topics(int k, std::uint64_t seed) {
  LdaHyperparams h;
  h.num_topics = k;
  h.alpha = k > 0 ? 50.0 / k : 0.0;
  h.seed = seed;
  return h;
}

void LdaHyperparams::validate() const {
  if (num_topics < 1) throw InvalidArgument("lda: num_topics must be >= 1");
  if (!(alpha > 0)) throw InvalidArgument("lda: alpha must be > 0");
  if (!(beta > 0)) throw InvalidArgument("lda: beta must be > 0");
  if (burn_in < 0) throw InvalidArgument("lda: burn_in must be >= 0");
  if (iterations <= burn_in) throw InvalidArgument("lda: iterations must exceed burn_in");
}

std::size_t LdaModel::total_tokens() const {
  return std::accumulate(doc_len_.begin(), doc_len_.end(), std::size_t{0});
}

bool LdaModel::counts_consistent() const {
  const int K = num_topics();
  for (int k = 0; k < K; ++k) {
    long long sum = 0;
    for (std::size_t w = 0; w < vocab_size_; ++w) {
      const int c = topic_word(k, static_cast<int>(w));
      if (c < 0) return false;
      sum += c;
    }
    if (sum != topic_total_[k] || topic_total_[k] < 0) return false;
  }
  for (std::size_t d = 0; d < num_docs(); ++d) {
    long long sum = 0;
    for (int k = 0; k < K; ++k) {
      if (doc_topic(d, k) < 0) return false;
      sum += doc_topic(d, k);
    }
    if (sum != doc_len_[d]) return false;
  }
  return true;
}

class GibbsSampler {
 public:
  GibbsSampler(const BowCorpus& bow, const LdaHyperparams& hyper) : rng_(hyper.seed) {
    hyper.validate();
    if (bow.vocab_size == 0) throw InvalidArgument("lda: empty vocabulary");
    const int K = hyper.num_topics;
    m_.hyper_ = hyper;
    m_.vocab_size_ = bow.vocab_size;
    m_.word_topic_.assign(bow.vocab_size * K, 0);
    m_.doc_topic_.assign(bow.docs.size() * K, 0);
    m_.topic_total_.assign(K, 0);
    m_.doc_len_.assign(bow.docs.size(), 0);

    for (std::size_t d = 0; d < bow.docs.size(); ++d) {
      for (const auto& tc : bow.docs[d]) {
        if (tc.id < 0 || static_cast<std::size_t>(tc.id) >= bow.vocab_size || tc.count <= 0) {
          throw InvalidArgument("lda: invalid term count in document " + std::to_string(d));
        }
        for (int c = 0; c < tc.count; ++c) {
          words_.push_back(tc.id);
          docs_.push_back(static_cast<int>(d));
        }
        m_.doc_len_[d] += tc.count;
      }
    }
    if (words_.empty()) throw InvalidArgument("lda: every document is empty");

    m_.z_.resize(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const int k = static_cast<int>(rng_.below(static_cast<std::uint64_t>(K)));
      m_.z_[i] = k;
      add(i, k, +1);
    }
    inv_denom_.resize(K);
    for (int k = 0; k < K; ++k) refresh_denom(k);
    cum_.resize(K);
  }

  void sweep() {
    const int K = m_.num_topics();
    const double alpha = m_.hyper_.alpha;
    const double beta = m_.hyper_.beta;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const int old = m_.z_[i];
      add(i, old, -1);
      refresh_denom(old);
      const int* nwk = &m_.word_topic_[static_cast<std::size_t>(words_[i]) * K];
      const int* ndk = &m_.doc_topic_[static_cast<std::size_t>(docs_[i]) * K];
      double total = 0.0;
      for (int k = 0; k < K; ++k) {
        total += (ndk[k] + alpha) * (nwk[k] + beta) * inv_denom_[k];
        cum_[k] = total;
      }
      const int k_new = sample_cumulative(cum_, rng_);
      m_.z_[i] = k_new;
      add(i, k_new, +1);
      refresh_denom(k_new);
    }
  }

  LdaModel& model() { return m_; }

 private:
  void add(std::size_t i, int k, int delta) {
    const int K = m_.num_topics();
    m_.word_topic_[static_cast<std::size_t>(words_[i]) * K + k] += delta;
    m_.doc_topic_[static_cast<std::size_t>(docs_[i]) * K + k] += delta;
    m_.topic_total_[k] += delta;
  }

  void refresh_denom(int k) {
    inv_denom_[k] = 1.0 / (m_.topic_total_[k] + static_cast<double>(m_.vocab_size_) * m_.hyper_.beta);
  }

  LdaModel m_;
  Rng rng_;
  std::vector<int> words_;
  std::vector<int> docs_;
  std::vector<double> inv_denom_;
  std::vector<double> cum_;
};

LdaModel train_lda(const BowCorpus& bow, const LdaHyperparams& hyper, const SweepCallback& on_sweep) {
  GibbsSampler sampler(bow, hyper);
  for (int s = 1; s <= hyper.iterations; ++s) {
    sampler.sweep();
    if (on_sweep) on_sweep(s, sampler.model());
  }
  return std::move(sampler.model());
}

Matrix phi(const LdaModel& model) {
  const int K = model.num_topics();
  const std::size_t V = model.vocab_size();
  const double beta = model.hyper().beta;
  Matrix out(static_cast<std::size_t>(K), V);
  for (int k = 0; k < K; ++k) {
    const double denom = model.topic_total(k) + static_cast<double>(V) * beta;
    for (std::size_t w = 0; w < V; ++w) {
      out(k, w) = (model.topic_word(k, static_cast<int>(w)) + beta) / denom;
    }
  }
  return out;
}

Matrix theta(const LdaModel& model) {
  const int K = model.num_topics();
  const double alpha = model.hyper().alpha;
  Matrix out(model.num_docs(), static_cast<std::size_t>(K));
  for (std::size_t d = 0; d < model.num_docs(); ++d) {
    const double denom = model.doc_length(d) + K * alpha;
    for (int k = 0; k < K; ++k) out(d, k) = (model.doc_topic(d, k) + alpha) / denom;
  }
  return out;
}

double heldout_log_likelihood(const LdaModel& model, const BowCorpus& heldout, int fold_in_sweeps) {
  if (fold_in_sweeps < 0) throw InvalidArgument("heldout: fold_in_sweeps must be >= 0");
  const int K = model.num_topics();
  const double alpha = model.hyper().alpha;
  const Matrix topic_word = phi(model);

  double log_lik = 0.0;
  std::size_t n_tokens = 0;
  std::vector<int> words;
  std::vector<int> z;
  std::vector<int> ndk(K);
  std::vector<double> cum(K);
  for (const auto& doc : heldout.docs) {
    words.clear();
    for (const auto& tc : doc) {
      if (tc.id < 0 || static_cast<std::size_t>(tc.id) >= model.vocab_size()) {
        throw InvalidArgument("heldout: token id outside the training vocabulary");
      }
      words.insert(words.end(), static_cast<std::size_t>(tc.count), tc.id);
    }
    if (words.empty()) continue;

    Rng rng(doc_seed(model.hyper().seed, doc));
    std::fill(ndk.begin(), ndk.end(), 0);
    z.resize(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      z[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
      ++ndk[z[i]];
    }
    for (int s = 0; s < fold_in_sweeps; ++s) {
      for (std::size_t i = 0; i < words.size(); ++i) {
        --ndk[z[i]];
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
          total += (ndk[k] + alpha) * topic_word(k, words[i]);
          cum[k] = total;
        }
        z[i] = sample_cumulative(cum, rng);
        ++ndk[z[i]];
      }
    }
    const double denom = static_cast<double>(words.size()) + K * alpha;
    for (const auto& tc : doc) {
      double p = 0.0;
      for (int k = 0; k < K; ++k) p += (ndk[k] + alpha) / denom * topic_word(k, tc.id);
      log_lik += tc.count * std::log(p);
    }
    n_tokens += words.size();
  }
  if (n_tokens == 0) return 0.0;
  return log_lik / static_cast<double>(n_tokens);
}

std::vector<int> top_words(const LdaModel& model, int k, std::size_t n) {
  if (k < 0 || k >= model.num_topics()) {
    throw InvalidArgument("top_words: topic " + std::to_string(k) + " out of range");
  }
  const std::size_t V = model.vocab_size();
  if (n < 1 || n > V) throw InvalidArgument("top_words: n must be in [1, V]");
  std::vector<int> ids(V);
  std::iota(ids.begin(), ids.end(), 0);
  // phi is monotone in the raw count within a topic, so compare integers.
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                    [&](int a, int b) {
                      const int ca = model.topic_word(k, a);
                      const int cb = model.topic_word(k, b);
                      return ca != cb ? ca > cb : a < b;
                    });
  ids.resize(n);
  return ids;
}

void LdaModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const int K = num_topics();
  out << kModelMagic << ' ' << kModelVersion << '\n'
      << "topics " << K << '\n'
      << "vocab_size " << vocab_size_ << '\n'
      << "documents " << num_docs() << '\n'
      << std::setprecision(17) << "alpha " << hyper_.alpha << '\n'
      << "beta " << hyper_.beta << '\n'
      << "iterations " << hyper_.iterations << '\n'
      << "burn_in " << hyper_.burn_in << '\n'
      << "seed " << hyper_.seed << '\n'
      << "vocab_hash " << (vocab_hash.empty() ? "-" : vocab_hash) << '\n'
      << "topic_word\n";
  for (int k = 0; k < K; ++k) {
    for (std::size_t w = 0; w < vocab_size_; ++w) {
      if (w) out << ' ';
      out << topic_word(k, static_cast<int>(w));
    }
    out << '\n';
  }
  out << "doc_topic\n";
  for (std::size_t d = 0; d < num_docs(); ++d) {
    for (int k = 0; k < K; ++k) {
      if (k) out << ' ';
      out << doc_topic(d, k);
    }
    out << '\n';
  }
}

LdaModel LdaModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  auto fail = [&](const std::string& what) { return ParseError(path.string() + ": " + what); };
  auto expect = [&](const char* key) {
    std::string k;
    if (!(in >> k) || k != key) throw fail(std::string("expected '") + key + "'");
  };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kModelMagic) throw fail("not an LDA model file");
  if (version != kModelVersion) throw fail("unsupported model version " + std::to_string(version));

  LdaModel m;
  std::size_t docs = 0;
  expect("topics");
  in >> m.hyper_.num_topics;
  expect("vocab_size");
  in >> m.vocab_size_;
  expect("documents");
  in >> docs;
  expect("alpha");
  in >> m.hyper_.alpha;
  expect("beta");
  in >> m.hyper_.beta;
  expect("iterations");
  in >> m.hyper_.iterations;
  expect("burn_in");
  in >> m.hyper_.burn_in;
  expect("seed");
  in >> m.hyper_.seed;
  expect("vocab_hash");
  in >> m.vocab_hash;
  if (m.vocab_hash == "-") m.vocab_hash.clear();
  if (!in) throw fail("truncated header");
  m.hyper_.validate();

  const int K = m.hyper_.num_topics;
  m.word_topic_.assign(m.vocab_size_ * K, 0);
  m.topic_total_.assign(K, 0);
  expect("topic_word");
  for (int k = 0; k < K; ++k) {
    for (std::size_t w = 0; w < m.vocab_size_; ++w) {
      int c = 0;
      if (!(in >> c)) throw fail("truncated topic_word table");
      m.word_topic_[w * K + k] = c;
      m.topic_total_[k] += c;
    }
  }
  expect("doc_topic");
  m.doc_topic_.assign(docs * K, 0);
  m.doc_len_.assign(docs, 0);
  for (std::size_t d = 0; d < docs; ++d) {
    for (int k = 0; k < K; ++k) {
      int c = 0;
      if (!(in >> c)) throw fail("truncated doc_topic table");
      m.doc_topic_[d * K + k] = c;
      m.doc_len_[d] += c;
    }
  }
  if (!m.counts_consistent()) throw fail("inconsistent count tables");
  return m;
}

}  // namespace litclass
