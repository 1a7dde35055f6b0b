#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "litclass/coherence.hpp"
#include "litclass/curate.hpp"
#include "litclass/error.hpp"
#include "litclass/hdbscan.hpp"
#include "litclass/ingest.hpp"
#include "litclass/textprep.hpp"
#include "litclass/umap.hpp"

namespace litclass {

// Relative paths resolve against the directory holding the config file.
struct PathsConfig {
  std::filesystem::path raw = "raw.csv";
  std::filesystem::path embeddings;  // empty: no external embedding file
  std::filesystem::path out = "out";
  std::filesystem::path timings;     // empty: "<out>.timings.json"
  std::filesystem::path extra_stopwords;
};

struct FetchConfig {
  bool enabled = false;
  double requests_per_second = 3.0;
  std::size_t retmax = 500;
  double timeout_seconds = 30.0;
};

struct PrepConfig {
  TokenizerConfig tokenizer;
  bool domain_stopwords = true;
  std::size_t min_df = 5;
  double max_df = 0.95;
  NgramConfig ngram;
};

struct LdaConfig {
  int k_min = 10;
  int k_max = 30;
  std::optional<int> num_topics;  // unset: the sweep's selection
  std::optional<double> alpha;    // unset: 50 / K
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 200;
  std::size_t heldout_every = 10;
  CoherenceConfig coherence;
};

enum class EmbeddingSource { kFile, kFallback };

struct EmbeddingConfig {
  EmbeddingSource source = EmbeddingSource::kFile;
  std::size_t dim = 384;  // fallback width
};

enum class HeatmapVectors { kCtfidf, kCentroid };

struct TopicsConfig {
  double merge_threshold = 0.85;
  bool reassign = true;
  double reassign_quantile = kDefaultReassignQuantile;
  HeatmapVectors heatmap_vectors = HeatmapVectors::kCtfidf;
  std::size_t top_terms = 10;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  PathsConfig paths;
  QuerySpec query = QuerySpec::speech_disorders();
  FetchConfig fetch;
  ChildKeywordSet curation;
  PrepConfig prep;
  LdaConfig lda;
  EmbeddingConfig embedding;
  UmapConfig umap;
  HdbscanConfig hdbscan;
  TopicsConfig topics;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  std::filesystem::path timings_path() const;
  std::filesystem::path base_dir;
};

struct Diagnostic {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string path;  // dotted field path, e.g. "umap.min_dist"
  std::string message;

  std::string to_string() const;
};

struct ConfigCheck {
  PipelineConfig config;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

// Parses a JSON config document and lists every violated invariant. Unknown
// keys are warnings.
ConfigCheck check_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");
// Throws IoError if the file cannot be read.
ConfigCheck check_config_file(const std::filesystem::path& path);

class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// check_config_file, throwing ConfigError when any error is present.
PipelineConfig load_config(const std::filesystem::path& path);

// Canonical JSON for a config (paths as written, not resolved).
std::string config_to_json(const PipelineConfig& cfg);

}  // namespace litclass
