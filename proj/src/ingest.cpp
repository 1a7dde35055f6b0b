#include "litclass/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_set>

#include "litclass/csv.hpp"
#include "litclass/error.hpp"

namespace litclass {
namespace {

const std::vector<std::string> kCorpusHeader = {"pmid",     "title", "authors", "year",
                                                "journal",  "abstract", "doi", "language"};
constexpr std::string_view kAuthorSep = "; ";

std::string join_authors(const std::vector<std::string>& authors) {
  std::string out;
  for (std::size_t i = 0; i < authors.size(); ++i) {
    if (i) out += kAuthorSep;
    out += authors[i];
  }
  return out;
}

std::vector<std::string> split_authors(const std::string& field) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    auto pos = field.find(kAuthorSep, start);
    if (pos == std::string::npos) {
      out.push_back(field.substr(start));
      return out;
    }
    out.push_back(field.substr(start, pos - start));
    start = pos + kAuthorSep.size();
  }
}

std::optional<std::string> optional_field(std::string s) {
  if (s.empty()) return std::nullopt;
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

QuerySpec QuerySpec::speech_disorders() {
  QuerySpec spec;
  spec.keywords = {"stuttering",         "stammering",        "speech disorder",
                   "communication disorder", "language disorder", "tempering",
                   "temperament"};
  spec.boolean_op = BoolOp::kOr;
  spec.date_from = 2015;
  spec.date_to = 2025;
  return spec;
}

void QuerySpec::validate() const {
  if (keywords.empty()) throw InvalidArgument("query: keyword list is empty");
  for (const auto& k : keywords) {
    if (k.empty()) throw InvalidArgument("query: empty keyword");
    if (k.find('"') != std::string::npos) {
      throw InvalidArgument("query: keyword contains a double quote: " + k);
    }
  }
  if (date_from > date_to) {
    throw InvalidArgument("query: date_from " + std::to_string(date_from) + " > date_to " +
                          std::to_string(date_to));
  }
  if (database.empty()) throw InvalidArgument("query: database is empty");
}

std::string build_query(const QuerySpec& spec) {
  spec.validate();
  const char* op = spec.boolean_op == BoolOp::kOr ? " OR " : " AND ";
  std::string q = "(";
  for (std::size_t i = 0; i < spec.keywords.size(); ++i) {
    if (i) q += op;
    q += '"' + spec.keywords[i] + '"';
  }
  q += ") AND (\"" + std::to_string(spec.date_from) + "\"[pdat] : \"" +
       std::to_string(spec.date_to) + "\"[pdat])";
  return q;
}

void write_corpus_csv(const std::vector<DocumentRecord>& records, std::ostream& out) {
  csv::write_row(out, kCorpusHeader);
  for (const auto& r : records) {
    csv::write_row(out, {r.pmid, r.title, join_authors(r.authors),
                         r.year ? std::to_string(*r.year) : std::string(), r.journal,
                         r.abstract.value_or(""), r.doi.value_or(""), r.language.value_or("")});
  }
}

std::size_t write_corpus_csv(const std::vector<DocumentRecord>& records,
                             const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_corpus_csv(records, out);
  if (!out) throw IoError("write failed: " + path.string());
  return records.size();
}

std::vector<DocumentRecord> read_corpus_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw ParseError("line 1: missing header");
  if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
  if (fields != kCorpusHeader) throw ParseError("line 1: unexpected header");

  std::vector<DocumentRecord> records;
  std::unordered_set<std::string> seen;
  while (reader.next(fields)) {
    auto where = [&] { return "line " + std::to_string(reader.line()) + ": "; };
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != kCorpusHeader.size()) {
      throw ParseError(where() + "expected " + std::to_string(kCorpusHeader.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    DocumentRecord r;
    r.pmid = std::move(fields[0]);
    if (!all_digits(r.pmid)) throw ParseError(where() + "pmid is not a digit string");
    if (!seen.insert(r.pmid).second) throw ParseError(where() + "duplicate pmid " + r.pmid);
    r.title = std::move(fields[1]);
    r.authors = split_authors(fields[2]);
    if (!fields[3].empty()) {
      int y = 0;
      const auto& s = fields[3];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), y);
      if (ec != std::errc() || ptr != s.data() + s.size() || y < kMinYear || y > kMaxYear) {
        throw ParseError(where() + "invalid year '" + s + "'");
      }
      r.year = y;
    }
    r.journal = std::move(fields[4]);
    r.abstract = optional_field(std::move(fields[5]));
    r.doi = optional_field(std::move(fields[6]));
    r.language = optional_field(std::move(fields[7]));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<DocumentRecord> read_corpus_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_corpus_csv(in);
}

}  // namespace litclass
