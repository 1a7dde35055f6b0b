#include "litclass/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace litclass {
namespace {

using Json = nlohmann::ordered_json;

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Reads known keys out of one JSON object, recording type errors and unknown
// keys as diagnostics.
class Section {
 public:
  Section(const Json* obj, std::string prefix, std::vector<Diagnostic>& diags)
      : obj_(obj), prefix_(std::move(prefix)), diags_(diags) {}

  ~Section() {
    if (!obj_) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!seen_.count(key)) warn(key, "unknown key ignored");
    }
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return;
    const Json& v = obj_->at(key);
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      const bool negative = v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0;
      if (!v.is_number_integer() || (std::is_unsigned_v<T> && negative)) {
        error(key, "expected " + type_name<T>() + ", got " + v.dump());
        return;
      }
    }
    try {
      out = v.get<T>();
    } catch (const nlohmann::json::exception&) {
      error(key, "expected " + type_name<T>() + ", got " + obj_->at(key).dump());
    }
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return;
    if (obj_->at(key).is_null()) {
      out.reset();
      return;
    }
    T value{};
    get(key, value);
    out = value;
  }

  void get(const std::string& key, std::filesystem::path& out) {
    std::string s = out.string();
    get(key, s);
    out = s;
  }

  // A nested object, or nullptr when absent or not an object.
  const Json* child(const std::string& key) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return nullptr;
    if (!obj_->at(key).is_object()) {
      error(key, "expected an object");
      return nullptr;
    }
    return &obj_->at(key);
  }

  std::string path(const std::string& key) const { return join_path(prefix_, key); }
  void error(const std::string& key, const std::string& msg) {
    diags_.push_back({Diagnostic::Severity::kError, path(key), msg});
  }
  void warn(const std::string& key, const std::string& msg) {
    diags_.push_back({Diagnostic::Severity::kWarning, path(key), msg});
  }
  void check(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) error(key, msg);
  }

 private:
  template <typename T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, bool>) {
      return "a boolean";
    } else if constexpr (std::is_integral_v<T>) {
      return std::is_unsigned_v<T> ? "a non-negative integer" : "an integer";
    } else if constexpr (std::is_floating_point_v<T>) {
      return "a number";
    } else if constexpr (std::is_same_v<T, std::string>) {
      return "a string";
    } else {
      return "a list of strings";
    }
  }

  const Json* obj_;
  std::string prefix_;
  std::vector<Diagnostic>& diags_;
  std::set<std::string> seen_;
};

template <typename E>
void get_enum(Section& s, const std::string& key, E& out, const std::vector<std::pair<std::string, E>>& names) {
  std::string current;
  for (const auto& [n, v] : names) {
    if (v == out) current = n;
  }
  std::string value = current;
  s.get(key, value);
  for (const auto& [n, v] : names) {
    if (n == value) {
      out = v;
      return;
    }
  }
  std::string allowed;
  for (const auto& [n, v] : names) allowed += (allowed.empty() ? "" : ", ") + n;
  s.error(key, "must be one of " + allowed + ", got \"" + value + "\"");
}

void read_metric(Section& s, const std::string& key, Metric& out) {
  get_enum<Metric>(s, key, out,
                   {{"manhattan", Metric::kManhattan}, {"euclidean", Metric::kEuclidean}, {"cosine", Metric::kCosine}});
}

void read_config(const Json& root, PipelineConfig& cfg, std::vector<Diagnostic>& d) {
  Section top(&root, "", d);
  top.get("seed", cfg.seed);

  {
    Section s(top.child("paths"), "paths", d);
    s.get("raw", cfg.paths.raw);
    s.get("embeddings", cfg.paths.embeddings);
    s.get("out", cfg.paths.out);
    s.get("timings", cfg.paths.timings);
    s.get("extra_stopwords", cfg.paths.extra_stopwords);
    s.check(!cfg.paths.out.empty(), "out", "must not be empty");
    const auto out = cfg.resolve(cfg.paths.out).lexically_normal();
    auto distinct = [&](const std::filesystem::path& p, const char* key) {
      if (!p.empty() && cfg.resolve(p).lexically_normal() == out) s.error(key, "must differ from paths.out");
    };
    distinct(cfg.paths.raw, "raw");
    distinct(cfg.paths.embeddings, "embeddings");
    distinct(cfg.paths.timings, "timings");
    if (!cfg.paths.embeddings.empty() && cfg.resolve(cfg.paths.embeddings) == cfg.resolve(cfg.paths.raw)) {
      s.error("embeddings", "must differ from paths.raw");
    }
    if (!cfg.paths.timings.empty()) {
      const auto t = cfg.resolve(cfg.paths.timings).lexically_normal();
      auto rel = t.lexically_relative(out);
      if (!rel.empty() && *rel.begin() != "..") s.error("timings", "must lie outside paths.out");
    }
  }
  {
    Section s(top.child("query"), "query", d);
    s.get("keywords", cfg.query.keywords);
    get_enum<BoolOp>(s, "boolean_op", cfg.query.boolean_op, {{"OR", BoolOp::kOr}, {"AND", BoolOp::kAnd}});
    s.get("date_from", cfg.query.date_from);
    s.get("date_to", cfg.query.date_to);
    s.get("database", cfg.query.database);
    s.check(!cfg.query.keywords.empty(), "keywords", "must not be empty");
    for (const auto& k : cfg.query.keywords) {
      s.check(!k.empty() && k.find('"') == std::string::npos, "keywords", "keywords must be non-empty and unquoted");
    }
    s.check(cfg.query.date_from <= cfg.query.date_to, "date_from", "must not exceed query.date_to");
    s.check(cfg.query.date_from >= kMinYear && cfg.query.date_to <= kMaxYear, "date_to",
            "years must lie in [" + std::to_string(kMinYear) + ", " + std::to_string(kMaxYear) + "]");
    s.check(!cfg.query.database.empty(), "database", "must not be empty");
  }
  {
    Section s(top.child("fetch"), "fetch", d);
    s.get("enabled", cfg.fetch.enabled);
    s.get("requests_per_second", cfg.fetch.requests_per_second);
    s.get("retmax", cfg.fetch.retmax);
    s.get("timeout_seconds", cfg.fetch.timeout_seconds);
    s.check(cfg.fetch.requests_per_second > 0 && cfg.fetch.requests_per_second <= 10, "requests_per_second",
            "must be in (0, 10]");
    s.check(cfg.fetch.retmax >= 1, "retmax", "must be >= 1");
    s.check(cfg.fetch.timeout_seconds > 0, "timeout_seconds", "must be > 0");
  }
  {
    Section s(top.child("curation"), "curation", d);
    s.get("stems", cfg.curation.stems);
    s.check(!cfg.curation.stems.empty(), "stems", "must not be empty");
    for (const auto& st : cfg.curation.stems) s.check(!st.empty(), "stems", "stems must be non-empty");
  }
  {
    Section s(top.child("prep"), "prep", d);
    s.get("lowercase", cfg.prep.tokenizer.lowercase);
    s.get("min_token_len", cfg.prep.tokenizer.min_token_len);
    s.get("domain_stopwords", cfg.prep.domain_stopwords);
    s.get("min_df", cfg.prep.min_df);
    s.get("max_df", cfg.prep.max_df);
    s.check(cfg.prep.tokenizer.min_token_len >= 1, "min_token_len", "must be >= 1");
    s.check(cfg.prep.min_df >= 1, "min_df", "must be >= 1");
    s.check(cfg.prep.max_df > 0 && cfg.prep.max_df <= 1, "max_df", "must be in (0, 1]");
    Section n(s.child("ngram"), "prep.ngram", d);
    n.get("lo", cfg.prep.ngram.lo);
    n.get("hi", cfg.prep.ngram.hi);
    n.get("min_df", cfg.prep.ngram.min_df);
    n.get("max_df", cfg.prep.ngram.max_df);
    n.check(cfg.prep.ngram.lo >= 1, "lo", "must be >= 1");
    n.check(cfg.prep.ngram.lo <= cfg.prep.ngram.hi, "hi", "must be >= prep.ngram.lo");
    n.check(cfg.prep.ngram.min_df >= 1, "min_df", "must be >= 1");
    n.check(cfg.prep.ngram.max_df > 0 && cfg.prep.ngram.max_df <= 1, "max_df", "must be in (0, 1]");
  }
  {
    Section s(top.child("lda"), "lda", d);
    auto& l = cfg.lda;
    s.get("k_min", l.k_min);
    s.get("k_max", l.k_max);
    s.get("num_topics", l.num_topics);
    s.get("alpha", l.alpha);
    s.get("beta", l.beta);
    s.get("iterations", l.iterations);
    s.get("burn_in", l.burn_in);
    s.get("heldout_every", l.heldout_every);
    s.get("coherence_window", l.coherence.window_size);
    s.get("coherence_top_n", l.coherence.top_n);
    s.check(l.k_min >= 2, "k_min", "must be >= 2");
    s.check(l.k_min <= l.k_max, "k_min", "must not exceed lda.k_max");
    s.check(!l.num_topics || *l.num_topics >= 2, "num_topics", "must be >= 2");
    s.check(!l.alpha || *l.alpha > 0, "alpha", "must be > 0");
    s.check(l.beta > 0, "beta", "must be > 0");
    s.check(l.iterations >= 1, "iterations", "must be >= 1");
    s.check(l.burn_in >= 0 && l.burn_in < l.iterations, "burn_in", "must be in [0, lda.iterations)");
    s.check(l.heldout_every >= 2, "heldout_every", "must be >= 2");
    s.check(l.coherence.window_size >= 1, "coherence_window", "must be >= 1");
    s.check(l.coherence.top_n >= 2, "coherence_top_n", "must be >= 2");
  }
  {
    Section s(top.child("embedding"), "embedding", d);
    get_enum<EmbeddingSource>(s, "source", cfg.embedding.source,
                              {{"file", EmbeddingSource::kFile}, {"fallback", EmbeddingSource::kFallback}});
    s.get("dim", cfg.embedding.dim);
    s.check(cfg.embedding.dim >= 1, "dim", "must be >= 1");
    if (cfg.embedding.source == EmbeddingSource::kFile && cfg.paths.embeddings.empty()) {
      s.error("source", "\"file\" requires paths.embeddings");
    }
  }
  {
    Section s(top.child("umap"), "umap", d);
    auto& u = cfg.umap;
    u.seed = cfg.seed;
    s.get("n_neighbors", u.n_neighbors);
    s.get("n_components", u.n_components);
    s.get("min_dist", u.min_dist);
    s.get("spread", u.spread);
    read_metric(s, "metric", u.metric);
    s.get("epochs", u.epochs);
    s.get("negative_sample_rate", u.negative_sample_rate);
    s.get("learning_rate", u.learning_rate);
    s.get("seed", u.seed);
    s.check(u.n_neighbors >= 2, "n_neighbors", "must be >= 2");
    s.check(u.n_components >= 2, "n_components", "must be >= 2");
    s.check(u.min_dist > 0, "min_dist", "must be > 0");
    s.check(u.spread > 0, "spread", "must be > 0");
    s.check(u.min_dist <= u.spread, "min_dist", "must not exceed umap.spread");
    s.check(u.epochs >= 1, "epochs", "must be >= 1");
    s.check(u.negative_sample_rate >= 0, "negative_sample_rate", "must be >= 0");
    s.check(u.learning_rate > 0, "learning_rate", "must be > 0");
  }
  {
    Section s(top.child("hdbscan"), "hdbscan", d);
    s.get("min_cluster_size", cfg.hdbscan.min_cluster_size);
    s.get("min_samples", cfg.hdbscan.min_samples);
    read_metric(s, "metric", cfg.hdbscan.metric);
    s.check(cfg.hdbscan.min_cluster_size >= 2, "min_cluster_size", "must be >= 2");
    s.check(!cfg.hdbscan.min_samples || *cfg.hdbscan.min_samples >= 1, "min_samples", "must be >= 1");
  }
  {
    Section s(top.child("topics"), "topics", d);
    auto& t = cfg.topics;
    s.get("merge_threshold", t.merge_threshold);
    s.get("reassign", t.reassign);
    s.get("reassign_quantile", t.reassign_quantile);
    get_enum<HeatmapVectors>(s, "heatmap_vectors", t.heatmap_vectors,
                             {{"ctfidf", HeatmapVectors::kCtfidf}, {"centroid", HeatmapVectors::kCentroid}});
    s.get("top_terms", t.top_terms);
    s.check(t.merge_threshold > 0 && t.merge_threshold <= 1, "merge_threshold", "must be in (0, 1]");
    s.check(t.reassign_quantile >= 0 && t.reassign_quantile <= 1, "reassign_quantile", "must be in [0, 1]");
    s.check(t.top_terms >= 1, "top_terms", "must be >= 1");
  }
}

std::string metric_string(Metric m) { return std::string(metric_name(m)); }

}  // namespace

std::filesystem::path PipelineConfig::resolve(const std::filesystem::path& p) const {
  if (p.empty() || p.is_absolute()) return p;
  return (base_dir / p).lexically_normal();
}

std::filesystem::path PipelineConfig::timings_path() const {
  if (!paths.timings.empty()) return resolve(paths.timings);
  auto out = resolve(paths.out).lexically_normal();
  if (!out.has_filename()) out = out.parent_path();
  return out.parent_path() / (out.filename().string() + ".timings.json");
}

std::string Diagnostic::to_string() const {
  return std::string(severity == Severity::kError ? "error: " : "warning: ") + path + ": " + message;
}

bool ConfigCheck::ok() const {
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::kError) return false;
  }
  return true;
}

ConfigCheck check_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  ConfigCheck check;
  check.config.base_dir = base_dir;
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    check.diagnostics.push_back({Diagnostic::Severity::kError, "<document>", e.what()});
    return check;
  }
  if (!root.is_object()) {
    check.diagnostics.push_back({Diagnostic::Severity::kError, "<document>", "top level must be an object"});
    return check;
  }
  read_config(root, check.config, check.diagnostics);
  return check;
}

ConfigCheck check_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return check_config_text(text.str(), base);
}

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : InvalidArgument([&] {
        std::string msg = "invalid config";
        for (const auto& d : diagnostics) {
          if (d.severity == Diagnostic::Severity::kError) msg += "\n  " + d.to_string();
        }
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

PipelineConfig load_config(const std::filesystem::path& path) {
  auto check = check_config_file(path);
  if (!check.ok()) throw ConfigError(std::move(check.diagnostics));
  return std::move(check.config);
}

std::string config_to_json(const PipelineConfig& c) {
  auto opt = [](const auto& o) -> Json { return o ? Json(*o) : Json(nullptr); };
  Json j;
  j["seed"] = c.seed;
  j["paths"] = {{"raw", c.paths.raw.string()},
                {"embeddings", c.paths.embeddings.string()},
                {"out", c.paths.out.string()},
                {"timings", c.paths.timings.string()},
                {"extra_stopwords", c.paths.extra_stopwords.string()}};
  j["query"] = {{"keywords", c.query.keywords},
                {"boolean_op", c.query.boolean_op == BoolOp::kOr ? "OR" : "AND"},
                {"date_from", c.query.date_from},
                {"date_to", c.query.date_to},
                {"database", c.query.database}};
  j["fetch"] = {{"enabled", c.fetch.enabled},
                {"requests_per_second", c.fetch.requests_per_second},
                {"retmax", c.fetch.retmax},
                {"timeout_seconds", c.fetch.timeout_seconds}};
  j["curation"] = {{"stems", c.curation.stems}};
  j["prep"] = {{"lowercase", c.prep.tokenizer.lowercase},
               {"min_token_len", c.prep.tokenizer.min_token_len},
               {"domain_stopwords", c.prep.domain_stopwords},
               {"min_df", c.prep.min_df},
               {"max_df", c.prep.max_df},
               {"ngram",
                {{"lo", c.prep.ngram.lo},
                 {"hi", c.prep.ngram.hi},
                 {"min_df", c.prep.ngram.min_df},
                 {"max_df", c.prep.ngram.max_df}}}};
  j["lda"] = {{"k_min", c.lda.k_min},
              {"k_max", c.lda.k_max},
              {"num_topics", opt(c.lda.num_topics)},
              {"alpha", opt(c.lda.alpha)},
              {"beta", c.lda.beta},
              {"iterations", c.lda.iterations},
              {"burn_in", c.lda.burn_in},
              {"heldout_every", c.lda.heldout_every},
              {"coherence_window", c.lda.coherence.window_size},
              {"coherence_top_n", c.lda.coherence.top_n}};
  j["embedding"] = {{"source", c.embedding.source == EmbeddingSource::kFile ? "file" : "fallback"},
                    {"dim", c.embedding.dim}};
  j["umap"] = {{"n_neighbors", c.umap.n_neighbors},
               {"n_components", c.umap.n_components},
               {"min_dist", c.umap.min_dist},
               {"spread", c.umap.spread},
               {"metric", metric_string(c.umap.metric)},
               {"epochs", c.umap.epochs},
               {"negative_sample_rate", c.umap.negative_sample_rate},
               {"learning_rate", c.umap.learning_rate},
               {"seed", c.umap.seed}};
  j["hdbscan"] = {{"min_cluster_size", c.hdbscan.min_cluster_size},
                  {"min_samples", opt(c.hdbscan.min_samples)},
                  {"metric", metric_string(c.hdbscan.metric)}};
  j["topics"] = {{"merge_threshold", c.topics.merge_threshold},
                 {"reassign", c.topics.reassign},
                 {"reassign_quantile", c.topics.reassign_quantile},
                 {"heatmap_vectors", c.topics.heatmap_vectors == HeatmapVectors::kCtfidf ? "ctfidf" : "centroid"},
                 {"top_terms", c.topics.top_terms}};
  return j.dump(2) + "\n";
}

}  // namespace litclass
