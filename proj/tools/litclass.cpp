// litclass command-line interface. Every stage subcommand works either on a
// config document (--config, running cached prerequisites as needed) or
// directly on files.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "litclass/coherence.hpp"
#include "litclass/config.hpp"
#include "litclass/curate.hpp"
#include "litclass/embedding.hpp"
#include "litclass/eutils.hpp"
#include "litclass/hdbscan.hpp"
#include "litclass/lda.hpp"
#include "litclass/pipeline.hpp"
#include "litclass/textprep.hpp"
#include "litclass/umap.hpp"

namespace fs = std::filesystem;
using namespace litclass;

namespace {

struct Common {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "Pipeline config (JSON)");
  cmd->add_option("--out-dir", c.out_dir, "Override paths.out");
  cmd->add_option("--seed", c.seed, "Override the seed");
}

PipelineConfig load(const Common& c) {
  auto cfg = load_config(c.config);
  if (c.out_dir) cfg.paths.out = *c.out_dir;
  if (c.seed) cfg.seed = cfg.umap.seed = *c.seed;
  return cfg;
}

class UsageError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

std::vector<std::string> ids_from(const std::optional<std::string>& corpus, std::size_t n) {
  std::vector<std::string> ids;
  if (corpus) {
    for (const auto& r : read_corpus_csv(*corpus)) ids.push_back(r.pmid);
    require(ids.size() == n, "--ids corpus has " + std::to_string(ids.size()) + " rows, expected " + std::to_string(n));
  } else {
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  return ids;
}

// Maps an exception to the documented exit code, reporting it on stderr.
// One keyword per line, order kept; blank lines and '#' comments skipped.
std::vector<std::string> read_keywords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open query file " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    out.push_back(line.substr(b, line.find_last_not_of(" \t\r") - b + 1));
  }
  if (out.empty()) throw UsageError("query file " + path + " has no keywords");
  return out;
}

int fail(const std::exception& e, Stage stage) {
  std::cerr << "error: " << e.what() << '\n';
  if (const auto* se = dynamic_cast<const StageError*>(&e)) return stage_exit_code(se->stage());
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UsageError*>(&e)) return kExitConfig;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return stage_exit_code(stage);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"litclass: literature topic modeling pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "litclass 0.3.0");

  Stage active = Stage::kExport;
  std::function<int()> action;

  // validate
  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a config document");
  validate->add_option("config", validate_path, "Config file")->required();
  validate->callback([&] {
    action = [&] {
      try {
        const auto check = check_config_file(validate_path);
        for (const auto& d : check.diagnostics) std::cout << d.to_string() << '\n';
        std::cout << (check.ok() ? "valid" : "invalid") << '\n';
        return check.ok() ? kExitOk : kExitConfig;
      } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
      }
    };
  });

  // run
  Common run_opts;
  auto* run = app.add_subcommand("run", "Run the full pipeline");
  add_common(run, run_opts);
  run->callback([&] {
    action = [&] {
      const auto cfg = load(run_opts);
      const auto report = run_pipeline(cfg, &std::cout);
      std::cout << '\n' << report.to_table();
      std::cout << "report: " << (cfg.resolve(cfg.paths.out) / "export" / "report.json").string() << '\n';
      std::cout << "timings: " << cfg.timings_path().string() << '\n';
      return kExitOk;
    };
  });

  auto run_stage = [&](const Common& c, Stage s, const std::function<void(PipelineConfig&)>& override) {
    auto cfg = load(c);
    if (override) override(cfg);
    Pipeline p(cfg, &std::cout);
    p.run_to(s);
    std::cout << "output: " << p.stage_dir(s).string() << '\n';
    return kExitOk;
  };

  // fetch
  Common fetch_opts;
  std::optional<std::string> fetch_out;
  std::optional<int> fetch_from, fetch_to;
  std::optional<std::size_t> fetch_retmax;
  std::optional<std::string> fetch_query_file;
  auto* fetch = app.add_subcommand("fetch", "Search and download PubMed records");
  add_common(fetch, fetch_opts);
  fetch->add_option("--out", fetch_out, "Corpus CSV to write (without --config)");
  fetch->add_option("--from", fetch_from, "First publication year");
  fetch->add_option("--to", fetch_to, "Last publication year");
  fetch->add_option("--retmax", fetch_retmax, "Page size for searches");
  fetch->add_option("--query-file", fetch_query_file, "Keywords, one per line ('#' comments)");
  fetch->callback([&] {
    active = Stage::kFetch;
    action = [&] {
      if (!fetch_opts.config.empty()) {
        return run_stage(fetch_opts, Stage::kFetch, [&](PipelineConfig& cfg) {
          cfg.fetch.enabled = true;
          if (fetch_from) cfg.query.date_from = *fetch_from;
          if (fetch_to) cfg.query.date_to = *fetch_to;
          if (fetch_retmax) cfg.fetch.retmax = *fetch_retmax;
          if (fetch_query_file) cfg.query.keywords = read_keywords(*fetch_query_file);
        });
      }
      require(fetch_out.has_value(), "fetch: --out is required without --config");
      QuerySpec q = QuerySpec::speech_disorders();
      if (fetch_from) q.date_from = *fetch_from;
      if (fetch_to) q.date_to = *fetch_to;
      if (fetch_query_file) q.keywords = read_keywords(*fetch_query_file);
      auto session = FetchSession::from_environment();
      if (fetch_retmax) session.retmax = *fetch_retmax;
      session.validate();
      auto transport = make_http_transport();
      EutilsClient client(session, *transport);
      const auto ids = client.search_ids(build_query(q), q.database);
      const auto result = client.fetch_records(ids, q.database);
      write_corpus_csv(result.records, *fetch_out);
      std::cout << result.records.size() << " records written, " << result.skipped_ids.size() << " ids skipped\n";
      return kExitOk;
    };
  });

  // curate
  Common curate_opts;
  std::optional<std::string> curate_in, curate_out, curate_report;
  auto* curate_cmd = app.add_subcommand("curate", "Drop non-English and non-child records");
  add_common(curate_cmd, curate_opts);
  curate_cmd->add_option("--in", curate_in, "Raw corpus CSV");
  curate_cmd->add_option("--out", curate_out, "Curated corpus CSV");
  curate_cmd->add_option("--report", curate_report, "Step table CSV");
  curate_cmd->callback([&] {
    active = Stage::kCurate;
    action = [&] {
      if (!curate_opts.config.empty()) return run_stage(curate_opts, Stage::kCurate, {});
      require(curate_in && curate_out, "curate: --in and --out are required without --config");
      const auto result = curate(read_corpus_csv(*curate_in));
      write_corpus_csv(result.records, *curate_out);
      if (curate_report) result.report.write_csv(*curate_report);
      for (const auto& s : result.report.steps) {
        std::cout << s.name << ": removed " << s.removed << ", remaining " << s.remaining << '\n';
      }
      return kExitOk;
    };
  });

  // prep
  Common prep_opts;
  std::optional<std::string> prep_in, prep_out, prep_stoplist;
  std::size_t prep_min_df = 5;
  double prep_max_df = 0.95;
  auto* prep = app.add_subcommand("prep", "Tokenize, filter stop words and build the vocabulary");
  add_common(prep, prep_opts);
  prep->add_option("--in", prep_in, "Curated corpus CSV");
  prep->add_option("--out-prefix", prep_out, "Output prefix: <prefix>.tokens.txt, .vocab.tsv, .bow.txt");
  prep->add_option("--min-df", prep_min_df, "Minimum document frequency");
  prep->add_option("--max-df", prep_max_df, "Maximum document fraction");
  prep->add_option("--stoplist", prep_stoplist, "Extra stop words, one per line");
  prep->callback([&] {
    active = Stage::kPrep;
    action = [&] {
      if (!prep_opts.config.empty()) {
        return run_stage(prep_opts, Stage::kPrep, [&](PipelineConfig& cfg) {
          if (prep->count("--min-df")) cfg.prep.min_df = prep_min_df;
          if (prep->count("--max-df")) cfg.prep.max_df = prep_max_df;
          if (prep_stoplist) cfg.paths.extra_stopwords = std::filesystem::absolute(*prep_stoplist);
        });
      }
      require(prep_in && prep_out, "prep: --in and --out-prefix are required without --config");
      std::vector<std::string> texts;
      for (const auto& r : read_corpus_csv(*prep_in)) texts.push_back(r.title + " " + r.abstract.value_or(""));
      auto stops = StopList::defaults();
      if (prep_stoplist) {
        for (auto& w : StopList::read_word_list(*prep_stoplist)) stops.domain.insert(w);
      }
      const auto tokens = prepare_tokens(texts, {}, stops);
      const auto vocab = build_vocabulary(tokens, prep_min_df, prep_max_df);
      write_token_docs(tokens, *prep_out + ".tokens.txt");
      vocab.write(*prep_out + ".vocab.tsv");
      to_bow(tokens, vocab).write(*prep_out + ".bow.txt");
      std::cout << tokens.size() << " documents, vocabulary " << vocab.size() << '\n';
      return kExitOk;
    };
  });

  // lda-sweep / lda-train share the LDA options
  struct LdaOpts {
    Common common;
    std::optional<std::string> prefix, out;
    std::optional<int> kmin, kmax, k, iterations;
    std::optional<double> alpha;
  } lda_sweep_opts, lda_train_opts;
  auto add_lda = [](CLI::App* cmd, LdaOpts& o) {
    add_common(cmd, o.common);
    cmd->add_option("--prep-prefix", o.prefix, "Prefix written by prep (without --config)");
    cmd->add_option("--out", o.out, "Output file (without --config)");
    cmd->add_option("--iterations", o.iterations, "Gibbs sweeps");
    cmd->add_option("--alpha", o.alpha, "Document-topic prior (default 50/K)");
  };
  auto apply_lda = [](const LdaOpts& o, PipelineConfig& cfg) {
    if (o.kmin) cfg.lda.k_min = *o.kmin;
    if (o.kmax) cfg.lda.k_max = *o.kmax;
    if (o.k) cfg.lda.num_topics = *o.k;
    if (o.iterations) cfg.lda.iterations = *o.iterations;
    if (o.alpha) cfg.lda.alpha = *o.alpha;
    if (cfg.lda.burn_in >= cfg.lda.iterations) cfg.lda.burn_in = 0;
  };
  auto load_prefix = [](const std::string& prefix, TokenDocs& tokens, Vocabulary& vocab, BowCorpus& bow) {
    tokens = read_token_docs(prefix + ".tokens.txt");
    vocab = Vocabulary::read(prefix + ".vocab.tsv", tokens.size());
    bow = BowCorpus::read(prefix + ".bow.txt", vocab.size());
  };

  auto* lda_sweep = app.add_subcommand("lda-sweep", "Score LDA models over a range of K");
  add_lda(lda_sweep, lda_sweep_opts);
  lda_sweep->add_option("--kmin", lda_sweep_opts.kmin, "Smallest K");
  lda_sweep->add_option("--kmax", lda_sweep_opts.kmax, "Largest K");
  lda_sweep->callback([&] {
    active = Stage::kLdaSweep;
    action = [&] {
      auto& o = lda_sweep_opts;
      if (!o.common.config.empty()) {
        return run_stage(o.common, Stage::kLdaSweep, [&](PipelineConfig& cfg) { apply_lda(o, cfg); });
      }
      require(o.prefix && o.out, "lda-sweep: --prep-prefix and --out are required without --config");
      TokenDocs tokens;
      Vocabulary vocab;
      BowCorpus bow;
      load_prefix(*o.prefix, tokens, vocab, bow);
      PipelineConfig cfg;
      if (o.common.seed) cfg.seed = *o.common.seed;
      apply_lda(o, cfg);
      SweepOptions opts;
      opts.kmin = cfg.lda.k_min;
      opts.kmax = cfg.lda.k_max;
      opts.alpha = cfg.lda.alpha;
      opts.iterations = cfg.lda.iterations;
      opts.burn_in = cfg.lda.burn_in;
      opts.base_seed = cfg.seed;
      const auto split = split_heldout(bow);
      const auto result = sweep_topics(split.train, split.heldout, tokens, vocab, opts);
      result.write_csv(*o.out);
      std::cout << "selected K = " << result.selected_k << '\n';
      return kExitOk;
    };
  });

  auto* lda_train = app.add_subcommand("lda-train", "Train the final LDA model");
  add_lda(lda_train, lda_train_opts);
  lda_train->add_option("-k,--topics", lda_train_opts.k, "Number of topics (default: sweep selection)");
  lda_train->callback([&] {
    active = Stage::kLdaTrain;
    action = [&] {
      auto& o = lda_train_opts;
      if (!o.common.config.empty()) {
        return run_stage(o.common, Stage::kLdaTrain, [&](PipelineConfig& cfg) { apply_lda(o, cfg); });
      }
      require(o.prefix && o.out && o.k, "lda-train: --prep-prefix, --out and -k are required without --config");
      TokenDocs tokens;
      Vocabulary vocab;
      BowCorpus bow;
      load_prefix(*o.prefix, tokens, vocab, bow);
      PipelineConfig cfg;
      apply_lda(o, cfg);
      auto hyper = LdaHyperparams::with_topics(*o.k, o.common.seed.value_or(0) + static_cast<std::uint64_t>(*o.k));
      if (o.alpha) hyper.alpha = *o.alpha;
      hyper.iterations = cfg.lda.iterations;
      hyper.burn_in = cfg.lda.burn_in;
      auto model = train_lda(bow, hyper);
      model.vocab_hash = vocab.content_hash();
      model.save(*o.out);
      std::cout << "coherence " << cv_coherence(topic_top_words(model, vocab, 10), tokens).score << '\n';
      return kExitOk;
    };
  });

  // embed-check
  Common embed_opts;
  std::optional<std::string> embed_in, embed_corpus, embed_out;
  auto* embed = app.add_subcommand("embed-check", "Validate an embedding file (or produce fallback embeddings)");
  add_common(embed, embed_opts);
  embed->add_option("--in", embed_in, "Embedding file");
  embed->add_option("--corpus", embed_corpus, "Curated corpus CSV whose row count must match");
  embed->add_option("--fallback-bow", embed_out, "Write fallback embeddings for <prefix> from prep");
  std::size_t embed_dim = 384;
  int embed_precision = 17;
  embed->add_option("--dim", embed_dim, "Fallback width");
  embed->add_option("--precision", embed_precision, "Significant digits written");
  std::optional<std::string> embed_fallback_out;
  embed->add_option("--out", embed_fallback_out, "Fallback embedding file to write");
  embed->callback([&] {
    active = Stage::kEmbed;
    action = [&] {
      if (!embed_opts.config.empty()) return run_stage(embed_opts, Stage::kEmbed, {});
      if (embed_out) {
        require(embed_fallback_out.has_value(), "embed-check: --fallback-bow needs --out");
        const auto tokens = read_token_docs(*embed_out + ".tokens.txt");
        const auto vocab = Vocabulary::read(*embed_out + ".vocab.tsv", tokens.size());
        const auto bow = BowCorpus::read(*embed_out + ".bow.txt", vocab.size());
        save_embeddings(fallback_embed(bow, embed_dim, embed_opts.seed.value_or(0)), *embed_fallback_out,
                        embed_precision);
        std::cout << "wrote " << bow.docs.size() << " x " << embed_dim << " fallback embeddings\n";
        return kExitOk;
      }
      require(embed_in.has_value(), "embed-check: --in is required without --config");
      std::optional<std::size_t> rows;
      if (embed_corpus) rows = read_corpus_csv(*embed_corpus).size();
      const auto m = load_embeddings(*embed_in, rows);
      std::cout << "ok: " << m.rows() << " x " << m.cols() << '\n';
      return kExitOk;
    };
  });

  // reduce
  Common reduce_opts;
  std::optional<std::string> reduce_in, reduce_out, reduce_metric;
  std::optional<std::size_t> reduce_neighbors, reduce_components;
  std::optional<double> reduce_min_dist;
  std::optional<int> reduce_epochs;
  auto* reduce = app.add_subcommand("reduce", "UMAP reduction of embeddings");
  add_common(reduce, reduce_opts);
  reduce->add_option("--in", reduce_in, "Embedding file");
  reduce->add_option("--out", reduce_out, "Reduced coordinates (reduced.tsv)");
  reduce->add_option("--neighbors", reduce_neighbors, "n_neighbors");
  reduce->add_option("--components", reduce_components, "n_components");
  reduce->add_option("--min-dist", reduce_min_dist, "min_dist");
  reduce->add_option("--metric", reduce_metric, "manhattan, euclidean or cosine");
  reduce->add_option("--epochs", reduce_epochs, "Optimisation epochs");
  auto apply_umap = [&](UmapConfig& u) {
    if (reduce_neighbors) u.n_neighbors = *reduce_neighbors;
    if (reduce_components) u.n_components = *reduce_components;
    if (reduce_min_dist) u.min_dist = *reduce_min_dist;
    if (reduce_metric) u.metric = parse_metric(*reduce_metric);
    if (reduce_epochs) u.epochs = *reduce_epochs;
    if (reduce_opts.seed) u.seed = *reduce_opts.seed;
  };
  reduce->callback([&] {
    active = Stage::kReduce;
    action = [&] {
      if (!reduce_opts.config.empty()) {
        return run_stage(reduce_opts, Stage::kReduce, [&](PipelineConfig& cfg) { apply_umap(cfg.umap); });
      }
      require(reduce_in && reduce_out, "reduce: --in and --out are required without --config");
      UmapConfig u;
      apply_umap(u);
      save_embeddings(umap_reduce(load_embeddings(*reduce_in), u), *reduce_out, 17, '\t');
      return kExitOk;
    };
  });

  // cluster
  Common cluster_opts;
  std::optional<std::string> cluster_in, cluster_out, cluster_ids, cluster_tree, cluster_metric;
  std::optional<std::size_t> cluster_mcs, cluster_ms;
  bool cluster_reassign = false;
  auto* cluster = app.add_subcommand("cluster", "HDBSCAN clustering of reduced coordinates");
  add_common(cluster, cluster_opts);
  cluster->add_option("--in", cluster_in, "Reduced coordinates");
  cluster->add_option("--out", cluster_out, "Labels CSV (docid,label)");
  cluster->add_option("--ids", cluster_ids, "Corpus CSV supplying document ids");
  cluster->add_option("--tree", cluster_tree, "Condensed tree JSON");
  cluster->add_option("--min-cluster-size", cluster_mcs, "Minimum cluster size");
  cluster->add_option("--min-samples", cluster_ms, "Core distance neighbour count");
  cluster->add_option("--metric", cluster_metric, "euclidean, manhattan or cosine");
  cluster->add_flag("--reassign", cluster_reassign, "Reassign outliers to nearby clusters");
  auto apply_hdbscan = [&](HdbscanConfig& h) {
    if (cluster_mcs) h.min_cluster_size = *cluster_mcs;
    if (cluster_ms) h.min_samples = *cluster_ms;
    if (cluster_metric) h.metric = parse_metric(*cluster_metric);
  };
  cluster->callback([&] {
    active = Stage::kCluster;
    action = [&] {
      if (!cluster_opts.config.empty()) {
        return run_stage(cluster_opts, Stage::kCluster, [&](PipelineConfig& cfg) { apply_hdbscan(cfg.hdbscan); });
      }
      require(cluster_in && cluster_out, "cluster: --in and --out are required without --config");
      HdbscanConfig h;
      apply_hdbscan(h);
      const Matrix points = load_embeddings(*cluster_in);
      const auto fit = hdbscan_fit(points, h);
      for (const auto& w : fit.warnings) std::cerr << "warning: " << w << '\n';
      auto labels = fit.labels;
      if (cluster_reassign) labels = reassign_outliers(labels, points, kDefaultReassignQuantile, h.metric);
      write_labels_csv({ids_from(cluster_ids, points.rows()), labels.labels}, *cluster_out);
      if (cluster_tree) {
        std::ofstream(*cluster_tree, std::ios::binary) << fit.tree.to_json() << '\n';
      }
      std::cout << fit.labels.n_clusters << " clusters, outlier ratio " << outlier_ratio(fit.labels.labels);
      if (cluster_reassign) std::cout << " -> " << outlier_ratio(labels.labels);
      std::cout << '\n';
      return kExitOk;
    };
  });

  // topics / viz-export run from a config only
  Common topics_opts, viz_opts;
  std::optional<double> merge_threshold;
  auto* topics = app.add_subcommand("topics", "c-TF-IDF topics, merging, heatmap and dendrogram");
  add_common(topics, topics_opts);
  topics->add_option("--merge-threshold", merge_threshold, "Similarity at which topics merge");
  topics->callback([&] {
    active = Stage::kTopics;
    action = [&] {
      require(!topics_opts.config.empty(), "topics: --config is required");
      return run_stage(topics_opts, Stage::kTopics, [&](PipelineConfig& cfg) {
        if (merge_threshold) cfg.topics.merge_threshold = *merge_threshold;
      });
    };
  });
  auto* viz = app.add_subcommand("viz-export", "Write the report and figure data");
  add_common(viz, viz_opts);
  viz->callback([&] {
    active = Stage::kExport;
    action = [&] {
      require(!viz_opts.config.empty(), "viz-export: --config is required");
      return run_stage(viz_opts, Stage::kExport, {});
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    return fail(e, active);
  }
}
