#include "litclass/curate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "litclass/csv.hpp"
#include "litclass/error.hpp"

namespace litclass {
namespace {

// Bytes >= 0x80 count as word characters so a stem never matches inside a
// word that starts with a non-ASCII letter.
bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

bool CurationReport::telescopes() const {
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i].removed > steps[i - 1].remaining) return false;
    if (steps[i].remaining != steps[i - 1].remaining - steps[i].removed) return false;
  }
  return true;
}

void CurationReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  csv::write_row(out, {"step", "removed", "remaining"});
  for (const auto& s : steps) {
    csv::write_row(out, {s.name, std::to_string(s.removed), std::to_string(s.remaining)});
  }
}

CurationReport CurationReport::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row != std::vector<std::string>{"step", "removed", "remaining"}) {
    throw ParseError("line 1: unexpected report header");
  }
  CurationReport report;
  while (reader.next(row)) {
    if (row.size() != 3) throw ParseError("line " + std::to_string(reader.line()) + ": bad row");
    report.steps.push_back({row[0], std::stoul(row[1]), std::stoul(row[2])});
  }
  return report;
}

void ChildKeywordSet::validate() const {
  if (stems.empty()) throw InvalidArgument("curation: keyword stem list is empty");
  for (const auto& s : stems) {
    if (s.empty()) throw InvalidArgument("curation: empty keyword stem");
    if (std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isupper(c); })) {
      throw InvalidArgument("curation: keyword stem not lowercase: " + s);
    }
  }
}

bool mentions_stem(std::string_view text, const ChildKeywordSet& keywords) {
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_word_byte(text[i]) || (i > 0 && is_word_byte(text[i - 1]))) continue;
    for (const auto& stem : keywords.stems) {
      if (stem.size() > n - i) continue;
      bool match = true;
      for (std::size_t j = 0; j < stem.size() && match; ++j) {
        match = std::tolower(static_cast<unsigned char>(text[i + j])) == stem[j];
      }
      if (match) return true;
    }
  }
  return false;
}

FilterOutcome filter_language(const std::vector<DocumentRecord>& records) {
  FilterOutcome out;
  for (const auto& r : records) {
    if (!r.language || *r.language == "eng") {
      out.kept.push_back(r);
    } else {
      ++out.removed;
    }
  }
  return out;
}

FilterOutcome filter_child_relevance(const std::vector<DocumentRecord>& records,
                                     const ChildKeywordSet& keywords) {
  keywords.validate();
  FilterOutcome out;
  for (const auto& r : records) {
    if (mentions_stem(r.title, keywords) || (r.abstract && mentions_stem(*r.abstract, keywords))) {
      out.kept.push_back(r);
    } else {
      ++out.removed;
    }
  }
  return out;
}

CurationResult curate(const std::vector<DocumentRecord>& records, const ChildKeywordSet& keywords) {
  CurationResult result;
  auto& steps = result.report.steps;
  steps.push_back({"Initial retrieval", 0, records.size()});
  auto lang = filter_language(records);
  steps.push_back({"Non-English articles removed", lang.removed, lang.kept.size()});
  auto child = filter_child_relevance(lang.kept, keywords);
  steps.push_back({"Non-child-related articles removed", child.removed, child.kept.size()});
  result.records = std::move(child.kept);
  return result;
}

}  // namespace litclass
