#include "litclass/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "litclass/coherence.hpp"
#include "litclass/csv.hpp"
#include "litclass/embedding.hpp"
#include "litclass/eutils.hpp"
#include "litclass/hash.hpp"
#include "litclass/hdbscan.hpp"
#include "litclass/lda.hpp"
#include "litclass/topics.hpp"
#include "litclass/umap.hpp"

namespace litclass {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Bumped whenever a stage's output format changes, invalidating old stamps.
constexpr const char* kCacheVersion = "litclass-cache-1";
constexpr const char* kStampFile = ".stamp";

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed for " + p.string());
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> record_ids(const std::vector<DocumentRecord>& records) {
  std::vector<std::string> ids;
  for (const auto& r : records) ids.push_back(r.pmid);
  return ids;
}

std::vector<std::string> record_texts(const std::vector<DocumentRecord>& records) {
  std::vector<std::string> texts;
  for (const auto& r : records) texts.push_back(r.title + " " + r.abstract.value_or(""));
  return texts;
}

// Files of a stage directory in name order, stamp excluded.
std::vector<fs::path> stage_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) return files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != kStampFile) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct PrepMeta {
  std::size_t n_docs = 0;
  std::size_t vocab_size = 0;
  std::size_t ngram_vocab_size = 0;
};

PrepMeta read_prep_meta(const fs::path& dir) {
  const auto j = Json::parse(read_text(dir / "meta.json"));
  return {j.at("n_docs").get<std::size_t>(), j.at("vocab_size").get<std::size_t>(),
          j.at("ngram_vocab_size").get<std::size_t>()};
}

void copy_into(const fs::path& from, const fs::path& to) {
  fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

}  // namespace

int stage_exit_code(Stage s) { return 10 + static_cast<int>(s); }

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kFetch: return "fetch";
    case Stage::kCurate: return "curate";
    case Stage::kPrep: return "prep";
    case Stage::kLdaSweep: return "lda-sweep";
    case Stage::kLdaTrain: return "lda-train";
    case Stage::kEmbed: return "embed";
    case Stage::kReduce: return "reduce";
    case Stage::kCluster: return "cluster";
    case Stage::kTopics: return "topics";
    case Stage::kExport: return "export";
  }
  return "unknown";
}

std::vector<Stage> all_stages() {
  return {Stage::kFetch,   Stage::kCurate, Stage::kPrep,    Stage::kLdaSweep, Stage::kLdaTrain,
          Stage::kEmbed,   Stage::kReduce, Stage::kCluster, Stage::kTopics,   Stage::kExport};
}

std::string ComparisonReport::to_json(bool with_timings) const {
  Json j;
  j["lda"] = {{"selected_k", lda_selected_k}, {"coherence", lda_coherence}, {"heldout_loglik", lda_heldout_loglik}};
  j["clusterer"] = {{"n_topics", n_topics},
                    {"outlier_ratio_before", outlier_ratio_before},
                    {"outlier_ratio_after", outlier_ratio_after}};
  if (with_timings) {
    Json t = Json::array();
    for (const auto& s : timings) {
      t.push_back({{"stage", s.stage}, {"seconds", s.seconds}, {"cache_hit", s.cache_hit}, {"skipped", s.skipped}});
    }
    j["runtime"] = t;
  }
  return j.dump(2) + "\n";
}

ComparisonReport ComparisonReport::from_json(const std::string& text) {
  const auto j = Json::parse(text);
  ComparisonReport r;
  r.lda_selected_k = j.at("lda").at("selected_k").get<int>();
  r.lda_coherence = j.at("lda").at("coherence").get<double>();
  r.lda_heldout_loglik = j.at("lda").at("heldout_loglik").get<double>();
  r.n_topics = j.at("clusterer").at("n_topics").get<int>();
  r.outlier_ratio_before = j.at("clusterer").at("outlier_ratio_before").get<double>();
  r.outlier_ratio_after = j.at("clusterer").at("outlier_ratio_after").get<double>();
  if (j.contains("runtime")) {
    for (const auto& t : j.at("runtime")) {
      r.timings.push_back({t.at("stage").get<std::string>(), t.at("seconds").get<double>(),
                           t.at("cache_hit").get<bool>(), t.at("skipped").get<bool>()});
    }
  }
  return r;
}

std::string ComparisonReport::to_table() const {
  char buf[256];
  std::ostringstream os;
  os << "Model        Metric                  Value\n";
  os << "-----------  ----------------------  ----------\n";
  std::snprintf(buf, sizeof buf, "LDA          selected K              %d\n", lda_selected_k);
  os << buf;
  std::snprintf(buf, sizeof buf, "LDA          coherence (C_v)         %.4f\n", lda_coherence);
  os << buf;
  std::snprintf(buf, sizeof buf, "LDA          held-out log-lik/word   %.4f\n", lda_heldout_loglik);
  os << buf;
  std::snprintf(buf, sizeof buf, "Clustering   topics                  %d\n", n_topics);
  os << buf;
  std::snprintf(buf, sizeof buf, "Clustering   outlier ratio (before)  %.4f\n", outlier_ratio_before);
  os << buf;
  std::snprintf(buf, sizeof buf, "Clustering   outlier ratio (after)   %.4f\n", outlier_ratio_after);
  os << buf;
  if (!timings.empty()) {
    os << "\nStage        Seconds     Status\n";
    for (const auto& t : timings) {
      std::snprintf(buf, sizeof buf, "%-12s %9.3f   %s\n", t.stage.c_str(), t.seconds,
                    t.skipped ? "skipped" : t.cache_hit ? "cache-hit" : "ran");
      os << buf;
    }
  }
  return os.str();
}

Pipeline::Pipeline(PipelineConfig cfg, std::ostream* log)
    : cfg_(std::move(cfg)), log_(log), done_(all_stages().size(), 0) {}

fs::path Pipeline::out_dir() const { return cfg_.resolve(cfg_.paths.out); }

fs::path Pipeline::stage_dir(Stage s) const { return out_dir() / std::string(stage_name(s)); }

fs::path Pipeline::raw_input() const {
  return cfg_.fetch.enabled ? stage_dir(Stage::kFetch) / "raw.csv" : cfg_.resolve(cfg_.paths.raw);
}

void Pipeline::say(const std::string& line) {
  if (!log_) return;
  std::lock_guard lock(mu_);
  *log_ << line << std::endl;
}

void Pipeline::record(const StageTiming& t) {
  std::lock_guard lock(mu_);
  timings_.push_back(t);
}

std::vector<Stage> Pipeline::inputs_of(Stage s) const {
  switch (s) {
    case Stage::kFetch: return {};
    case Stage::kCurate: return {Stage::kFetch};
    case Stage::kPrep: return {Stage::kCurate};
    case Stage::kLdaSweep: return {Stage::kPrep};
    case Stage::kLdaTrain: return {Stage::kPrep, Stage::kLdaSweep};
    case Stage::kEmbed: return {Stage::kCurate, Stage::kPrep};
    case Stage::kReduce: return {Stage::kEmbed};
    case Stage::kCluster: return {Stage::kCurate, Stage::kReduce};
    case Stage::kTopics: return {Stage::kCurate, Stage::kPrep, Stage::kEmbed, Stage::kCluster};
    case Stage::kExport:
      return {Stage::kCurate, Stage::kLdaSweep, Stage::kLdaTrain, Stage::kCluster, Stage::kTopics};
  }
  return {};
}

std::string Pipeline::stage_key(Stage s) const {
  const auto c = Json::parse(config_to_json(cfg_));
  Json subset;
  switch (s) {
    case Stage::kFetch: subset = {{"query", c["query"]}, {"fetch", c["fetch"]}}; break;
    case Stage::kCurate: subset = {{"curation", c["curation"]}}; break;
    case Stage::kPrep: subset = {{"prep", c["prep"]}, {"stoplist", StopList::kVersion}}; break;
    case Stage::kLdaSweep:
    case Stage::kLdaTrain: subset = {{"lda", c["lda"]}, {"seed", c["seed"]}}; break;
    case Stage::kEmbed: subset = {{"embedding", c["embedding"]}, {"seed", c["seed"]}}; break;
    case Stage::kReduce: subset = {{"umap", c["umap"]}}; break;
    case Stage::kCluster:
      subset = {{"hdbscan", c["hdbscan"]},
                {"reassign", c["topics"]["reassign"]},
                {"reassign_quantile", c["topics"]["reassign_quantile"]}};
      break;
    case Stage::kTopics: subset = {{"topics", c["topics"]}, {"ngram", c["prep"]["ngram"]}}; break;
    case Stage::kExport: subset = Json::object(); break;
  }
  Sha256 h;
  h.field(kCacheVersion).field(stage_name(s)).field(subset.dump());
  auto add_file = [&](const fs::path& p) { h.field(p.filename().string()).field(sha256_file(p)); };
  for (Stage in : inputs_of(s)) {
    if (in == Stage::kFetch && !cfg_.fetch.enabled) {
      add_file(raw_input());
      continue;
    }
    h.field(stage_name(in));
    for (const auto& f : stage_files(stage_dir(in))) add_file(f);
  }
  if (s == Stage::kPrep && !cfg_.paths.extra_stopwords.empty()) add_file(cfg_.resolve(cfg_.paths.extra_stopwords));
  if (s == Stage::kEmbed && cfg_.embedding.source == EmbeddingSource::kFile) {
    add_file(cfg_.resolve(cfg_.paths.embeddings));
  }
  return h.hex();
}

void Pipeline::ensure(Stage s) {
  if (done_[static_cast<std::size_t>(s)]) return;
  for (Stage in : inputs_of(s)) ensure(in);
  execute(s);
  done_[static_cast<std::size_t>(s)] = 1;
}

void Pipeline::execute(Stage s) {
  const std::string name(stage_name(s));
  if (s == Stage::kFetch && !cfg_.fetch.enabled) {
    say("[" + name + "] skipped (reading " + raw_input().string() + ")");
    record({name, 0.0, false, true});
    return;
  }
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = stage_dir(s);
  std::string key;
  try {
    key = stage_key(s);
    const fs::path stamp = dir / kStampFile;
    if (fs::exists(stamp) && read_text(stamp) == key + "\n") {
      say("[" + name + "] cache-hit");
      record({name, 0.0, true, false});
      return;
    }
    fs::remove_all(dir);
    fs::create_directories(dir);
    switch (s) {
      case Stage::kFetch: do_fetch(dir); break;
      case Stage::kCurate: do_curate(dir); break;
      case Stage::kPrep: do_prep(dir); break;
      case Stage::kLdaSweep: do_lda_sweep(dir); break;
      case Stage::kLdaTrain: do_lda_train(dir); break;
      case Stage::kEmbed: do_embed(dir); break;
      case Stage::kReduce: do_reduce(dir); break;
      case Stage::kCluster: do_cluster(dir); break;
      case Stage::kTopics: do_topics(dir); break;
      case Stage::kExport: do_export(dir); break;
    }
    write_text(stamp, key + "\n");
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(s, name + ": " + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", secs);
  say("[" + name + "] done in " + buf + " s");
  record({name, secs, false, false});
}

void Pipeline::run_to(Stage target) {
  if (target == Stage::kExport || target == Stage::kTopics) {
    // Shared prerequisites first, then the two independent tracks together.
    ensure(Stage::kPrep);
    auto lda = std::async(std::launch::async, [this] { ensure(Stage::kLdaTrain); });
    std::exception_ptr embed_error;
    try {
      ensure(Stage::kCluster);
    } catch (...) {
      embed_error = std::current_exception();
    }
    lda.get();
    if (embed_error) std::rethrow_exception(embed_error);
  }
  ensure(target);
}

ComparisonReport Pipeline::run() {
  run_to(Stage::kExport);
  auto report = ComparisonReport::from_json(read_text(stage_dir(Stage::kExport) / "report.json"));
  report.timings = timings_;
  return report;
}

void Pipeline::do_fetch(const fs::path& dir) {
  FetchSession session = FetchSession::from_environment();
  session.requests_per_second = cfg_.fetch.requests_per_second;
  session.retmax = cfg_.fetch.retmax;
  session.validate();
  auto transport = make_http_transport(cfg_.fetch.timeout_seconds);
  EutilsClient client(session, *transport, system_clock());
  const std::string query = build_query(cfg_.query);
  const auto ids = client.search_ids(query, cfg_.query.database);
  const auto fetched = client.fetch_records(ids, cfg_.query.database);
  write_corpus_csv(fetched.records, dir / "raw.csv");
  Json log = {{"query", query}, {"ids", ids.size()}, {"records", fetched.records.size()},
              {"skipped_ids", fetched.skipped_ids}};
  write_text(dir / "fetch_log.json", log.dump(2) + "\n");
}

void Pipeline::do_curate(const fs::path& dir) {
  cfg_.curation.validate();
  const auto result = curate(read_corpus_csv(raw_input()), cfg_.curation);
  write_corpus_csv(result.records, dir / "curated.csv");
  result.report.write_csv(dir / "curation_report.csv");
}

void Pipeline::do_prep(const fs::path& dir) {
  const auto records = read_corpus_csv(stage_dir(Stage::kCurate) / "curated.csv");
  StopList stops = StopList::defaults();
  if (!cfg_.prep.domain_stopwords) stops.domain.clear();
  if (!cfg_.paths.extra_stopwords.empty()) {
    for (auto& w : StopList::read_word_list(cfg_.resolve(cfg_.paths.extra_stopwords))) stops.domain.insert(w);
  }
  const TokenDocs tokens = prepare_tokens(record_texts(records), cfg_.prep.tokenizer, stops);
  const Vocabulary vocab = build_vocabulary(tokens, cfg_.prep.min_df, cfg_.prep.max_df);
  const BowCorpus bow = to_bow(tokens, vocab);
  const NgramCounts ngrams = ngram_counts(tokens, cfg_.prep.ngram);
  write_token_docs(tokens, dir / "tokens.txt");
  vocab.write(dir / "vocab.tsv");
  bow.write(dir / "bow.txt");
  ngrams.vocab.write(dir / "ngram_vocab.tsv");
  ngrams.counts.write(dir / "ngram_counts.txt");
  Json meta = {{"n_docs", tokens.size()},
               {"vocab_size", vocab.size()},
               {"ngram_vocab_size", ngrams.vocab.size()},
               {"tokens", bow.total_tokens()},
               {"stoplist", StopList::kVersion}};
  write_text(dir / "meta.json", meta.dump(2) + "\n");
}

namespace {

struct PrepData {
  PrepMeta meta;
  TokenDocs tokens;
  Vocabulary vocab;
  BowCorpus bow;
};

PrepData load_prep(const fs::path& dir) {
  PrepData p;
  p.meta = read_prep_meta(dir);
  p.tokens = read_token_docs(dir / "tokens.txt");
  p.vocab = Vocabulary::read(dir / "vocab.tsv", p.meta.n_docs);
  p.bow = BowCorpus::read(dir / "bow.txt", p.meta.vocab_size);
  return p;
}

SweepOptions sweep_options(const PipelineConfig& cfg) {
  SweepOptions o;
  o.kmin = cfg.lda.k_min;
  o.kmax = cfg.lda.k_max;
  o.alpha = cfg.lda.alpha;
  o.beta = cfg.lda.beta;
  o.iterations = cfg.lda.iterations;
  o.burn_in = cfg.lda.burn_in;
  o.base_seed = cfg.seed;
  return o;
}

}  // namespace

void Pipeline::do_lda_sweep(const fs::path& dir) {
  const auto prep = load_prep(stage_dir(Stage::kPrep));
  const auto split = split_heldout(prep.bow, cfg_.lda.heldout_every);
  const auto options = sweep_options(cfg_);
  LdaTrainer trainer = [this](const BowCorpus& train, const LdaHyperparams& hyper) {
    say("[lda-sweep] training k=" + std::to_string(hyper.num_topics));
    return train_lda(train, hyper);
  };
  auto result = sweep_topics(split.train, split.heldout, prep.tokens, prep.vocab, options, cfg_.lda.coherence, trainer);
  result.write_csv(dir / "sweep.csv");
  result = SweepResult::read_csv(dir / "sweep.csv");
  write_text(dir / "selection.json", Json{{"selected_k", result.selected_k}}.dump(2) + "\n");
}

void Pipeline::do_lda_train(const fs::path& dir) {
  const auto prep = load_prep(stage_dir(Stage::kPrep));
  int k = Json::parse(read_text(stage_dir(Stage::kLdaSweep) / "selection.json")).at("selected_k").get<int>();
  if (cfg_.lda.num_topics) k = *cfg_.lda.num_topics;
  const auto split = split_heldout(prep.bow, cfg_.lda.heldout_every);
  const auto hyper = sweep_options(cfg_).hyper_for(k);
  LdaModel model = train_lda(split.train, hyper);
  model.vocab_hash = prep.vocab.content_hash();
  model.save(dir / "model.txt");

  const auto top = topic_top_words(model, prep.vocab, cfg_.lda.coherence.top_n);
  const auto coherence = cv_coherence(top, prep.tokens, cfg_.lda.coherence);
  const double heldout = heldout_log_likelihood(model, split.heldout);

  std::ofstream words(dir / "top_words.csv", std::ios::binary);
  csv::write_row(words, {"topic", "rank", "word", "count"});
  for (int t = 0; t < model.num_topics(); ++t) {
    const auto ids = top_words(model, t, cfg_.lda.coherence.top_n);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      csv::write_row(words, {std::to_string(t), std::to_string(r + 1), prep.vocab.token(ids[r]),
                             std::to_string(model.topic_word(ids[r], t))});
    }
  }
  words.close();

  std::ofstream per(dir / "topic_coherence.csv", std::ios::binary);
  csv::write_row(per, {"topic", "coherence", "flagged"});
  for (std::size_t t = 0; t < coherence.per_topic.size(); ++t) {
    csv::write_row(per, {std::to_string(t), g17(coherence.per_topic[t]), coherence.flagged[t] ? "1" : "0"});
  }
  per.close();

  const auto map = lda_intertopic_map(model);
  write_text(dir / "intertopic_map.csv", intertopic_csv(map));
  Json metrics = {{"k", k},
                  {"coherence", coherence.score},
                  {"heldout_loglik", heldout},
                  {"perplexity", std::exp(-heldout)},
                  {"train_docs", split.train.docs.size()},
                  {"heldout_docs", split.heldout.docs.size()},
                  {"intertopic_degenerate", map.degenerate}};
  write_text(dir / "metrics.json", metrics.dump(2) + "\n");
}

void Pipeline::do_embed(const fs::path& dir) {
  const auto meta = read_prep_meta(stage_dir(Stage::kPrep));
  if (cfg_.embedding.source == EmbeddingSource::kFile) {
    const fs::path src = cfg_.resolve(cfg_.paths.embeddings);
    load_embeddings(src, meta.n_docs);  // validates shape and values
    copy_into(src, dir / "embeddings.txt");
  } else {
    const auto bow = BowCorpus::read(stage_dir(Stage::kPrep) / "bow.txt", meta.vocab_size);
    save_embeddings(fallback_embed(bow, cfg_.embedding.dim, cfg_.seed), dir / "embeddings.txt");
  }
}

void Pipeline::do_reduce(const fs::path& dir) {
  const Matrix emb = load_embeddings(stage_dir(Stage::kEmbed) / "embeddings.txt");
  save_embeddings(umap_reduce(emb, cfg_.umap), dir / "reduced.tsv", 17, '\t');
}

void Pipeline::do_cluster(const fs::path& dir) {
  const auto records = read_corpus_csv(stage_dir(Stage::kCurate) / "curated.csv");
  const Matrix reduced = load_embeddings(stage_dir(Stage::kReduce) / "reduced.tsv", records.size());
  const auto fit = hdbscan_fit(reduced, cfg_.hdbscan);
  for (const auto& w : fit.warnings) say("[cluster] warning: " + w);
  const auto ids = record_ids(records);
  write_labels_csv({ids, fit.labels.labels}, dir / "labels_raw.csv");
  ClusterLabels final_labels = fit.labels;
  if (cfg_.topics.reassign) {
    final_labels = reassign_outliers(fit.labels, reduced, cfg_.topics.reassign_quantile, cfg_.hdbscan.metric);
  }
  write_labels_csv({ids, final_labels.labels}, dir / "labels.csv");
  write_text(dir / "condensed_tree.json", fit.tree.to_json() + "\n");
  Json warnings = fit.warnings;
  Json summary = {{"n_clusters", fit.labels.n_clusters},
                  {"outlier_ratio_before", outlier_ratio(fit.labels.labels)},
                  {"outlier_ratio_after", outlier_ratio(final_labels.labels)},
                  {"warnings", warnings}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

void Pipeline::do_topics(const fs::path& dir) {
  const auto records = read_corpus_csv(stage_dir(Stage::kCurate) / "curated.csv");
  const auto meta = read_prep_meta(stage_dir(Stage::kPrep));
  const Vocabulary terms = Vocabulary::read(stage_dir(Stage::kPrep) / "ngram_vocab.tsv", meta.n_docs);
  const BowCorpus counts = BowCorpus::read(stage_dir(Stage::kPrep) / "ngram_counts.txt", meta.ngram_vocab_size);
  const Matrix emb = load_embeddings(stage_dir(Stage::kEmbed) / "embeddings.txt", records.size());
  const auto table = read_labels_csv(stage_dir(Stage::kCluster) / "labels.csv");

  const auto merged = merge_similar(table.labels, counts, cfg_.topics.merge_threshold);
  write_labels_csv({table.doc_ids, merged.labels}, dir / "labels.csv");
  std::ofstream log(dir / "merges.csv", std::ios::binary);
  csv::write_row(log, {"step", "kept", "removed", "similarity"});
  for (std::size_t i = 0; i < merged.log.size(); ++i) {
    const auto& m = merged.log[i];
    csv::write_row(log, {std::to_string(i + 1), std::to_string(m.kept), std::to_string(m.removed), g17(m.similarity)});
  }
  log.close();

  const auto weights = ctfidf(class_term_counts(counts, merged.labels, merged.n_topics));
  const auto summaries =
      summarize_topics(weights, terms, merged.labels, emb, table.doc_ids, cfg_.topics.top_terms, 3);
  write_text(dir / "topic_summaries.json", summaries_json(summaries));
  Json info = {{"n_topics", merged.n_topics},
               {"merges", merged.log.size()},
               {"heatmap_vectors", cfg_.topics.heatmap_vectors == HeatmapVectors::kCtfidf ? "ctfidf" : "centroid"}};
  if (merged.n_topics >= 2) {
    const Matrix vectors = cfg_.topics.heatmap_vectors == HeatmapVectors::kCtfidf
                               ? weights.weights
                               : topic_centroids(emb, merged.labels, merged.n_topics);
    const auto sim = topic_similarity(vectors);
    write_text(dir / "heatmap.csv", heatmap_csv(sim.values));
    write_text(dir / "heatmap.svg", heatmap_svg(sim.values));
    const auto tree = dendrogram(vectors);
    write_text(dir / "dendrogram.json", tree.to_json());
    write_text(dir / "dendrogram.svg", dendrogram_svg(tree));
    Json flagged = Json::array();
    for (std::size_t i = 0; i < sim.flagged.size(); ++i) {
      if (sim.flagged[i]) flagged.push_back(i);
    }
    info["zero_vector_topics"] = flagged;
  } else {
    say("[topics] warning: fewer than 2 topics; heatmap and dendrogram not written");
  }
  write_text(dir / "topics.json", info.dump(2) + "\n");
}

ComparisonReport Pipeline::build_report() const {
  ComparisonReport r;
  const auto lda = Json::parse(read_text(stage_dir(Stage::kLdaTrain) / "metrics.json"));
  r.lda_selected_k = lda.at("k").get<int>();
  r.lda_coherence = lda.at("coherence").get<double>();
  r.lda_heldout_loglik = lda.at("heldout_loglik").get<double>();
  const auto cl = Json::parse(read_text(stage_dir(Stage::kCluster) / "summary.json"));
  r.outlier_ratio_before = cl.at("outlier_ratio_before").get<double>();
  r.outlier_ratio_after = cl.at("outlier_ratio_after").get<double>();
  r.n_topics = Json::parse(read_text(stage_dir(Stage::kTopics) / "topics.json")).at("n_topics").get<int>();
  return r;
}

void Pipeline::do_export(const fs::path& dir) {
  const auto report = build_report();
  write_text(dir / "report.json", report.to_json(false));
  write_text(dir / "report.txt", report.to_table());
  copy_into(stage_dir(Stage::kCurate) / "curation_report.csv", dir / "curation_table.csv");
  copy_into(stage_dir(Stage::kLdaSweep) / "sweep.csv", dir / "coherence_by_k.csv");
  copy_into(stage_dir(Stage::kLdaTrain) / "intertopic_map.csv", dir / "intertopic_map.csv");
  copy_into(stage_dir(Stage::kTopics) / "topic_summaries.json", dir / "topic_summaries.json");
  for (const char* f : {"heatmap.csv", "heatmap.svg", "dendrogram.json", "dendrogram.svg"}) {
    const fs::path src = stage_dir(Stage::kTopics) / f;
    if (fs::exists(src)) copy_into(src, dir / (std::string("topic_") + f));
  }
}

ComparisonReport run_pipeline(const PipelineConfig& cfg, std::ostream* log) {
  Pipeline p(cfg, log);
  auto report = p.run();
  const fs::path timings = cfg.timings_path();
  if (timings.has_parent_path()) fs::create_directories(timings.parent_path());
  write_text(timings, report.to_json(true));
  return report;
}

}  // namespace litclass
