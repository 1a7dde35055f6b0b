#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "litclass/config.hpp"

namespace litclass {

enum class Stage { kFetch, kCurate, kPrep, kLdaSweep, kLdaTrain, kEmbed, kReduce, kCluster, kTopics, kExport };

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

// Stable per-stage exit codes, 10..18 in pipeline order.
int stage_exit_code(Stage s);
std::string_view stage_name(Stage s);  // also the stage's output directory
std::vector<Stage> all_stages();

class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& what) : Error(what), stage_(stage) {}
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
  bool cache_hit = false;
  bool skipped = false;
};

struct ComparisonReport {
  int lda_selected_k = 0;
  double lda_coherence = 0.0;
  double lda_heldout_loglik = 0.0;
  int n_topics = 0;
  double outlier_ratio_before = 0.0;
  double outlier_ratio_after = 0.0;
  std::vector<StageTiming> timings;

  // Runtimes vary between runs, so the copy kept in the output tree omits them.
  std::string to_json(bool with_timings) const;
  std::string to_table() const;
  static ComparisonReport from_json(const std::string& text);
};

// Runs pipeline stages with content-hash caching. Each stage writes into
// <out>/<stage>/ and finishes with a .stamp file holding the SHA-256 of its
// input files and its configuration subset; a matching stamp is a cache hit.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, std::ostream* log = nullptr);

  // Runs `target` and everything it depends on. The LDA and embedding tracks
  // run concurrently when both are needed.
  void run_to(Stage target);
  ComparisonReport run();

  std::filesystem::path out_dir() const;
  std::filesystem::path stage_dir(Stage s) const;
  const std::vector<StageTiming>& timings() const { return timings_; }
  const PipelineConfig& config() const { return cfg_; }

 private:
  void ensure(Stage s);
  void execute(Stage s);
  std::vector<Stage> inputs_of(Stage s) const;
  std::string stage_key(Stage s) const;
  void record(const StageTiming& t);
  void say(const std::string& line);

  void do_fetch(const std::filesystem::path& dir);
  void do_curate(const std::filesystem::path& dir);
  void do_prep(const std::filesystem::path& dir);
  void do_lda_sweep(const std::filesystem::path& dir);
  void do_lda_train(const std::filesystem::path& dir);
  void do_embed(const std::filesystem::path& dir);
  void do_reduce(const std::filesystem::path& dir);
  void do_cluster(const std::filesystem::path& dir);
  void do_topics(const std::filesystem::path& dir);
  void do_export(const std::filesystem::path& dir);

  std::filesystem::path raw_input() const;
  ComparisonReport build_report() const;

  PipelineConfig cfg_;
  std::ostream* log_;
  std::mutex mu_;
  std::vector<StageTiming> timings_;
  std::vector<char> done_;
};

// Loads a config and runs the whole pipeline; also writes the timings file.
ComparisonReport run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr);

}  // namespace litclass
