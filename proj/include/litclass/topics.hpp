#pragma once

#include <string>
#include <vector>

#include "litclass/lda.hpp"
#include "litclass/matrix.hpp"
#include "litclass/textprep.hpp"

namespace litclass {

// Per-class term totals (C x T). Documents labelled -1 are skipped.
Matrix class_term_counts(const BowCorpus& docs, const std::vector<int>& labels, int n_classes);

struct CtfidfMatrix {
  Matrix weights;                     // C x T
  std::vector<double> class_totals;   // term count per class
  double avg_total = 0.0;             // A, mean of class_totals
  std::vector<bool> empty;            // class has no terms; its row is zero
};

// W[c][t] = tf(t, c) * ln(1 + A / f(t)), f(t) the term's count over all classes.
CtfidfMatrix ctfidf(const Matrix& class_counts);

struct SimilarityMatrix {
  Matrix values;
  std::vector<bool> flagged;  // zero vector: row is 0 apart from the diagonal
};

// Cosine similarity between rows.
SimilarityMatrix topic_similarity(const Matrix& vectors);

// Mean point per cluster; the alternative vectors for the heatmap.
Matrix topic_centroids(const Matrix& points, const std::vector<int>& labels, int n_classes);

struct MergeStep {
  int kept = 0;
  int removed = 0;  // id before compaction
  double similarity = 0.0;
};

struct MergeResult {
  std::vector<int> labels;
  int n_topics = 0;
  std::vector<MergeStep> log;
};

// Repeatedly merges the most similar pair of c-TF-IDF topics while its
// similarity is at least `threshold`. The lower id survives and higher ids
// shift down by one; ties go to the lexicographically smallest pair.
MergeResult merge_similar(const std::vector<int>& labels, const BowCorpus& docs, double threshold = 0.85);

struct DendrogramMerge {
  int left = 0;   // lower node id
  int right = 0;
  int id = 0;     // n_leaves + merge index
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  int n_leaves = 0;
  std::vector<DendrogramMerge> merges;

  // Nested {id, height, children:[...]}; leaves carry only an id.
  std::string to_json() const;
};

// Average linkage over 1 - cosine similarity. Equal distances resolve to the
// pair with the smallest (lower id, higher id).
Dendrogram dendrogram(const Matrix& vectors);

// Base-2 Jensen-Shannon divergence.
double jsd(std::span<const double> p, std::span<const double> q);

struct IntertopicMap {
  Matrix coords;  // K x 2
  std::vector<double> prevalence;
  bool degenerate = false;  // K < 3
};

// Classical MDS of the pairwise JSD between phi rows; prevalence weights theta
// by document length.
IntertopicMap intertopic_map(const Matrix& phi, const Matrix& theta, const std::vector<int>& doc_lengths);
IntertopicMap lda_intertopic_map(const LdaModel& model);

// Classical MDS of a symmetric distance matrix into `dims` coordinates.
Matrix classical_mds(const Matrix& distances, int dims = 2);

struct TermScore {
  std::string term;
  double score = 0.0;
};

struct TopicSummary {
  int id = 0;
  std::size_t size = 0;
  std::vector<TermScore> top_terms;
  std::vector<std::string> representative_docs;
};

// Top terms by c-TF-IDF weight (ties to the lower term id) and the documents
// nearest the cluster centroid in `points`.
std::vector<TopicSummary> summarize_topics(const CtfidfMatrix& weights, const Vocabulary& terms,
                                           const std::vector<int>& labels, const Matrix& points,
                                           const std::vector<std::string>& doc_ids, std::size_t n_terms = 10,
                                           std::size_t n_docs = 3);

std::string summaries_json(const std::vector<TopicSummary>& topics);
std::string heatmap_csv(const Matrix& similarity);
std::string heatmap_svg(const Matrix& similarity);
std::string dendrogram_svg(const Dendrogram& tree);
std::string intertopic_csv(const IntertopicMap& map);

}  // namespace litclass
