#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>

#include "litclass/coherence.hpp"
#include "litclass/config.hpp"
#include "litclass/curate.hpp"
#include "litclass/error.hpp"
#include "litclass/hdbscan.hpp"
#include "litclass/ingest.hpp"
#include "litclass/lda.hpp"
#include "litclass/pipeline.hpp"
#include "litclass/textprep.hpp"
#include "litclass/topics.hpp"
#include "litclass/umap.hpp"

namespace py = pybind11;
using namespace litclass;

namespace {

using Rows = std::vector<std::vector<double>>;

Matrix to_matrix(const Rows& rows) {
  if (rows.empty()) return {};
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw InvalidArgument("rows must all have the same length");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Rows to_rows(const Matrix& m) {
  Rows out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i].assign(m.row(i).begin(), m.row(i).end());
  return out;
}

// A trained model together with the vocabulary it was trained on.
struct TopicModel {
  LdaModel model;
  Vocabulary vocab;

  BowCorpus encode(const TokenDocs& docs) const { return to_bow(docs, vocab); }
};

TopicModel train(const TokenDocs& docs, int k, std::optional<double> alpha, double beta, int iterations,
                 int burn_in, std::uint64_t seed, std::size_t min_df, double max_df) {
  TopicModel t;
  t.vocab = build_vocabulary(docs, min_df, max_df);
  auto h = LdaHyperparams::with_topics(k, seed);
  if (alpha) h.alpha = *alpha;
  h.beta = beta;
  h.iterations = iterations;
  h.burn_in = burn_in;
  t.model = train_lda(t.encode(docs), h);
  t.model.vocab_hash = t.vocab.content_hash();
  return t;
}

py::dict report_dict(const ComparisonReport& r) {
  py::dict d;
  d["lda_selected_k"] = r.lda_selected_k;
  d["lda_coherence"] = r.lda_coherence;
  d["lda_heldout_loglik"] = r.lda_heldout_loglik;
  d["n_topics"] = r.n_topics;
  d["outlier_ratio_before"] = r.outlier_ratio_before;
  d["outlier_ratio_after"] = r.outlier_ratio_after;
  py::list timings;
  for (const auto& t : r.timings) {
    py::dict e;
    e["stage"] = t.stage;
    e["seconds"] = t.seconds;
    e["cache_hit"] = t.cache_hit;
    e["skipped"] = t.skipped;
    timings.append(e);
  }
  d["timings"] = timings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "litclass core bindings";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<DocumentRecord>(m, "Document")
      .def(py::init<>())
      .def_readwrite("pmid", &DocumentRecord::pmid)
      .def_readwrite("title", &DocumentRecord::title)
      .def_readwrite("authors", &DocumentRecord::authors)
      .def_readwrite("year", &DocumentRecord::year)
      .def_readwrite("journal", &DocumentRecord::journal)
      .def_readwrite("abstract", &DocumentRecord::abstract)
      .def_readwrite("doi", &DocumentRecord::doi)
      .def_readwrite("language", &DocumentRecord::language)
      .def("__eq__", [](const DocumentRecord& a, const DocumentRecord& b) { return a == b; })
      .def("__repr__", [](const DocumentRecord& r) { return "<Document " + r.pmid + ">"; });

  m.def(
      "build_query",
      [](std::vector<std::string> keywords, const std::string& op, int date_from, int date_to) {
        QuerySpec q;
        q.keywords = std::move(keywords);
        if (op == "OR") {
          q.boolean_op = BoolOp::kOr;
        } else if (op == "AND") {
          q.boolean_op = BoolOp::kAnd;
        } else {
          throw InvalidArgument("op must be \"OR\" or \"AND\"");
        }
        q.date_from = date_from;
        q.date_to = date_to;
        return build_query(q);
      },
      py::arg("keywords"), py::arg("op") = "OR", py::arg("date_from") = 2015, py::arg("date_to") = 2025);

  m.def("read_corpus", py::overload_cast<const std::filesystem::path&>(&read_corpus_csv), py::arg("path"));
  m.def("write_corpus",
        py::overload_cast<const std::vector<DocumentRecord>&, const std::filesystem::path&>(&write_corpus_csv),
        py::arg("records"), py::arg("path"));

  m.def(
      "curate",
      [](const std::vector<DocumentRecord>& records, std::optional<std::vector<std::string>> stems) {
        ChildKeywordSet kw;
        if (stems) kw.stems = *stems;
        auto res = curate(records, kw);
        std::vector<std::tuple<std::string, std::size_t, std::size_t>> steps;
        for (const auto& s : res.report.steps) steps.emplace_back(s.name, s.removed, s.remaining);
        return py::make_tuple(res.records, steps);
      },
      py::arg("records"), py::arg("stems") = py::none());

  m.def(
      "tokenize",
      [](const std::string& text, std::size_t min_len, bool lowercase) {
        TokenizerConfig cfg;
        cfg.min_token_len = min_len;
        cfg.lowercase = lowercase;
        return tokenize(text, cfg);
      },
      py::arg("text"), py::arg("min_len") = 3, py::arg("lowercase") = true);

  m.def(
      "prepare_tokens",
      [](const std::vector<std::string>& texts, bool domain_stopwords) {
        auto stops = StopList::defaults();
        if (!domain_stopwords) stops.domain.clear();
        return prepare_tokens(texts, TokenizerConfig{}, stops);
      },
      py::arg("texts"), py::arg("domain_stopwords") = true);

  py::class_<TopicModel>(m, "TopicModel")
      .def_property_readonly("num_topics", [](const TopicModel& t) { return t.model.num_topics(); })
      .def_property_readonly("vocabulary", [](const TopicModel& t) { return t.vocab.tokens(); })
      .def_property_readonly("phi", [](const TopicModel& t) { return to_rows(phi(t.model)); })
      .def_property_readonly("theta", [](const TopicModel& t) { return to_rows(theta(t.model)); })
      .def(
          "top_words",
          [](const TopicModel& t, int k, std::size_t n) {
            std::vector<std::string> out;
            for (int id : top_words(t.model, k, n)) out.push_back(t.vocab.token(id));
            return out;
          },
          py::arg("k"), py::arg("n") = 10)
      .def("save", [](const TopicModel& t, const std::filesystem::path& p) { t.model.save(p); });

  m.def("train_lda", &train, py::arg("docs"), py::arg("k"), py::arg("alpha") = py::none(), py::arg("beta") = 0.01,
        py::arg("iterations") = 1000, py::arg("burn_in") = 200, py::arg("seed") = 0, py::arg("min_df") = 1,
        py::arg("max_df") = 1.0);

  m.def(
      "heldout_log_likelihood",
      [](const TopicModel& t, const TokenDocs& docs) { return heldout_log_likelihood(t.model, t.encode(docs)); },
      py::arg("model"), py::arg("docs"));

  m.def(
      "cv_coherence",
      [](const std::vector<std::vector<std::string>>& topics, const TokenDocs& reference, std::size_t window,
         std::size_t top_n) {
        CoherenceConfig cfg;
        cfg.window_size = window;
        cfg.top_n = top_n;
        auto r = cv_coherence(topics, reference, cfg);
        return py::make_tuple(r.score, r.per_topic);
      },
      py::arg("topics"), py::arg("reference"), py::arg("window") = 110, py::arg("top_n") = 10);

  m.def("npmi", py::overload_cast<std::size_t, std::size_t, std::size_t, std::size_t, double>(&npmi),
        py::arg("count_a"), py::arg("count_b"), py::arg("count_ab"), py::arg("n_windows"), py::arg("epsilon") = 1e-12);

  m.def(
      "umap_reduce",
      [](const Rows& points, std::size_t n_neighbors, std::size_t n_components, double min_dist,
         const std::string& metric, int epochs, std::uint64_t seed) {
        UmapConfig cfg;
        cfg.n_neighbors = n_neighbors;
        cfg.n_components = n_components;
        cfg.min_dist = min_dist;
        cfg.metric = parse_metric(metric);
        cfg.epochs = epochs;
        cfg.seed = seed;
        return to_rows(umap_reduce(to_matrix(points), cfg));
      },
      py::arg("points"), py::arg("n_neighbors") = 8, py::arg("n_components") = 8, py::arg("min_dist") = 0.1,
      py::arg("metric") = "manhattan", py::arg("epochs") = 500, py::arg("seed") = 0);

  m.def(
      "fit_ab",
      [](double min_dist, double spread) {
        auto c = fit_ab(min_dist, spread);
        return py::make_tuple(c.a, c.b);
      },
      py::arg("min_dist") = 0.1, py::arg("spread") = 1.0);

  py::class_<HdbscanResult>(m, "ClusterResult")
      .def_property_readonly("labels", [](const HdbscanResult& r) { return r.labels.labels; })
      .def_property_readonly("n_clusters", [](const HdbscanResult& r) { return r.labels.n_clusters; })
      .def_property_readonly("warnings", [](const HdbscanResult& r) { return r.warnings; })
      .def_property_readonly("condensed_tree", [](const HdbscanResult& r) { return r.tree.to_json(); });

  m.def(
      "hdbscan",
      [](const Rows& points, std::size_t min_cluster_size, std::optional<std::size_t> min_samples,
         const std::string& metric) {
        HdbscanConfig cfg;
        cfg.min_cluster_size = min_cluster_size;
        cfg.min_samples = min_samples;
        cfg.metric = parse_metric(metric);
        return hdbscan_fit(to_matrix(points), cfg);
      },
      py::arg("points"), py::arg("min_cluster_size") = 15, py::arg("min_samples") = py::none(),
      py::arg("metric") = "euclidean");

  m.def(
      "reassign_outliers",
      [](const std::vector<int>& labels, const Rows& points, double quantile) {
        return reassign_outliers(ClusterLabels::from_labels(labels), to_matrix(points), quantile).labels;
      },
      py::arg("labels"), py::arg("points"), py::arg("quantile") = kDefaultReassignQuantile);

  m.def("outlier_ratio", &outlier_ratio, py::arg("labels"));

  m.def(
      "ctfidf", [](const Rows& class_counts) { return to_rows(ctfidf(to_matrix(class_counts)).weights); },
      py::arg("class_counts"));

  m.def(
      "jsd",
      [](const std::vector<double>& p, const std::vector<double>& q) {
        if (p.size() != q.size()) throw InvalidArgument("jsd: distributions differ in length");
        return jsd(p, q);
      },
      py::arg("p"), py::arg("q"));

  m.def(
      "validate_config",
      [](const std::filesystem::path& path) {
        auto c = check_config_file(path);
        std::vector<std::string> diags;
        for (const auto& d : c.diagnostics) diags.push_back(d.to_string());
        return py::make_tuple(c.ok(), diags);
      },
      py::arg("path"));

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config, std::optional<std::filesystem::path> out) {
        auto cfg = load_config(config);
        if (out) {
          cfg.paths.out = std::filesystem::absolute(*out);
          cfg.paths.timings.clear();
        }
        ComparisonReport r;
        {
          py::gil_scoped_release release;
          r = run_pipeline(cfg);
        }
        return report_dict(r);
      },
      py::arg("config"), py::arg("out") = py::none());
}
