#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "litclass/ingest.hpp"

namespace litclass {

struct CurationStep {
  std::string name;
  std::size_t removed = 0;
  std::size_t remaining = 0;

  bool operator==(const CurationStep&) const = default;
};

// Table of filtering steps; row i's remaining equals row i-1's remaining
// minus row i's removed.
struct CurationReport {
  std::vector<CurationStep> steps;

  bool telescopes() const;
  void write_csv(const std::filesystem::path& path) const;
  static CurationReport read_csv(const std::filesystem::path& path);
};

// Lowercase stems matched against word starts ("child" matches "children").
struct ChildKeywordSet {
  std::vector<std::string> stems = {"child",       "infant",     "toddler",  "pediatric",
                                    "paediatric",  "adolescent", "preschool"};
  void validate() const;
};

struct FilterOutcome {
  std::vector<DocumentRecord> kept;
  std::size_t removed = 0;
};

// Keeps English records and records with no language metadata.
FilterOutcome filter_language(const std::vector<DocumentRecord>& records);

// Keeps records whose title or abstract has a word starting with any stem,
// case-insensitively.
FilterOutcome filter_child_relevance(const std::vector<DocumentRecord>& records,
                                     const ChildKeywordSet& keywords);

bool mentions_stem(std::string_view text, const ChildKeywordSet& keywords);

struct CurationResult {
  std::vector<DocumentRecord> records;
  CurationReport report;
};

CurationResult curate(const std::vector<DocumentRecord>& records,
                      const ChildKeywordSet& keywords = {});

}  // namespace litclass
