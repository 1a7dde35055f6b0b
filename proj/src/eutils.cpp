#include "litclass/eutils.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <thread>
#include <unordered_set>

#include "litclass/error.hpp"
#include "xml.hpp"

namespace litclass {
namespace {

constexpr int kMaxAttempts = 3;
constexpr double kInitialBackoff = 1.0;

class SystemClock final : public Clock {
 public:
  double now() override {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  }
  void sleep_for(double seconds) override {
    if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  }
};

std::size_t parse_count(const xml::Node* node, const char* what) {
  if (!node) throw ParseError(std::string("esearch: missing ") + what);
  auto text = xml::normalize_space(node->text_content());
  try {
    std::size_t pos = 0;
    auto v = std::stoull(text, &pos);
    if (pos != text.size()) throw ParseError("");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(std::string("esearch: bad ") + what + " '" + text + "'");
  }
}

std::optional<std::string> non_empty(std::string s) {
  if (s.empty()) return std::nullopt;
  return s;
}

std::optional<int> first_year(std::string_view s) {
  for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
    if (std::all_of(s.begin() + i, s.begin() + i + 4, [](char c) { return c >= '0' && c <= '9'; }) &&
        (i + 4 == s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 4]))) &&
        (i == 0 || !std::isdigit(static_cast<unsigned char>(s[i - 1])))) {
      int y = std::stoi(std::string(s.substr(i, 4)));
      if (y >= kMinYear && y <= kMaxYear) return y;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string author_name(const xml::Node& author) {
  auto text = [&](const char* tag) {
    const auto* n = author.child(tag);
    return n ? xml::normalize_space(n->text_content()) : std::string();
  };
  std::string name = text("CollectiveName");
  if (name.empty()) {
    std::string last = text("LastName");
    std::string first = text("ForeName");
    if (first.empty()) first = text("Initials");
    name = first.empty() ? last : (last.empty() ? first : first + " " + last);
  }
  // "; " separates authors in the corpus file.
  std::replace(name.begin(), name.end(), ';', ',');
  return name;
}

DocumentRecord parse_article(const xml::Node& article_node) {
  DocumentRecord r;
  const auto* citation = article_node.child("MedlineCitation");
  if (!citation) throw ParseError("efetch: PubmedArticle without MedlineCitation");
  const auto* pmid = citation->child("PMID");
  if (!pmid) throw ParseError("efetch: article without PMID");
  r.pmid = xml::normalize_space(pmid->text_content());

  const auto* article = citation->child("Article");
  if (!article) return r;
  if (const auto* t = article->child("ArticleTitle")) r.title = xml::normalize_space(t->text_content());

  if (const auto* abs = article->child("Abstract")) {
    std::string joined;
    for (const auto* part : abs->children_named("AbstractText")) {
      auto s = xml::normalize_space(part->text_content());
      if (s.empty()) continue;
      if (!joined.empty()) joined += ' ';
      joined += s;
    }
    r.abstract = non_empty(std::move(joined));
  }

  if (const auto* list = article->child("AuthorList")) {
    for (const auto* a : list->children_named("Author")) {
      auto name = author_name(*a);
      if (!name.empty()) r.authors.push_back(std::move(name));
    }
  }

  if (const auto* journal = article->child("Journal")) {
    if (const auto* t = journal->child("Title")) r.journal = xml::normalize_space(t->text_content());
    if (const auto* date = journal->path({"JournalIssue", "PubDate"})) {
      if (const auto* y = date->child("Year")) {
        r.year = first_year(y->text_content());
      } else if (const auto* md = date->child("MedlineDate")) {
        r.year = first_year(md->text_content());
      }
    }
  }
  if (!r.year) {
    if (const auto* y = article->path({"ArticleDate", "Year"})) r.year = first_year(y->text_content());
  }

  if (const auto* lang = article->child("Language")) {
    auto s = xml::normalize_space(lang->text_content());
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    r.language = non_empty(std::move(s));
  }

  if (const auto* ids = article_node.path({"PubmedData", "ArticleIdList"})) {
    for (const auto* id : ids->children_named("ArticleId")) {
      if (id->attribute("IdType") == "doi") {
        r.doi = non_empty(xml::normalize_space(id->text_content()));
        break;
      }
    }
  }
  if (!r.doi) {
    for (const auto* loc : article->children_named("ELocationID")) {
      if (loc->attribute("EIdType") == "doi") {
        r.doi = non_empty(xml::normalize_space(loc->text_content()));
        break;
      }
    }
  }
  return r;
}

}  // namespace

Clock& system_clock() {
  static SystemClock clock;
  return clock;
}

void FetchSession::validate() const {
  if (base_url.empty()) throw InvalidArgument("fetch: base_url is empty");
  if (!(requests_per_second > 0)) throw InvalidArgument("fetch: requests_per_second must be > 0");
  const double cap = api_key ? 10.0 : 3.0;
  if (requests_per_second > cap) {
    throw InvalidArgument("fetch: requests_per_second " + std::to_string(requests_per_second) +
                          " exceeds the NCBI limit of " + std::to_string(static_cast<int>(cap)));
  }
  if (retmax == 0) throw InvalidArgument("fetch: retmax must be positive");
}

FetchSession FetchSession::from_environment() {
  FetchSession s;
  if (const char* key = std::getenv(kApiKeyEnv); key && *key) {
    s.api_key = key;
    s.requests_per_second = 10.0;
  }
  return s;
}

SearchPage parse_esearch(std::string_view body) {
  auto doc = xml::parse(body);
  const auto* result = doc.child("eSearchResult");
  if (!result) throw ParseError("esearch: missing eSearchResult");
  if (const auto* err = result->child("ERROR")) {
    throw ParseError("esearch: service error: " + xml::normalize_space(err->text_content()));
  }
  SearchPage page;
  page.count = parse_count(result->child("Count"), "Count");
  if (const auto* rs = result->child("RetStart")) page.retstart = parse_count(rs, "RetStart");
  if (const auto* list = result->child("IdList")) {
    for (const auto* id : list->children_named("Id")) {
      page.ids.push_back(xml::normalize_space(id->text_content()));
    }
  } else if (page.count > 0) {
    throw ParseError("esearch: missing IdList");
  }
  return page;
}

std::vector<DocumentRecord> parse_pubmed_xml(std::string_view body) {
  auto doc = xml::parse(body);
  const auto* set = doc.child("PubmedArticleSet");
  if (!set) throw ParseError("efetch: missing PubmedArticleSet");
  std::vector<DocumentRecord> out;
  for (const auto* a : set->children_named("PubmedArticle")) out.push_back(parse_article(*a));
  return out;
}

EutilsClient::EutilsClient(FetchSession session, HttpTransport& transport, Clock& clock)
    : session_(std::move(session)), transport_(transport), clock_(clock) {
  session_.validate();
}

void EutilsClient::throttle() {
  const double interval = 1.0 / session_.requests_per_second;
  if (last_request_) {
    const double wait = *last_request_ + interval - clock_.now();
    if (wait > 0) clock_.sleep_for(wait);
  }
  last_request_ = clock_.now();
}

HttpResponse EutilsClient::request(const std::string& endpoint, QueryParams params) {
  if (session_.api_key) params.emplace_back("api_key", *session_.api_key);
  const std::string url = session_.base_url + "/" + endpoint;
  double backoff = kInitialBackoff;
  std::string last_error;
  int last_status = 0;
  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    throttle();
    ++requests_sent_;
    try {
      auto resp = transport_.get(url, params);
      if (resp.status >= 200 && resp.status < 300) return resp;
      last_status = resp.status;
      last_error = endpoint + ": HTTP " + std::to_string(resp.status);
      if (resp.status >= 400 && resp.status < 500) throw TransportError(last_error, resp.status);
    } catch (const TransportError& e) {
      if (e.status() >= 400 && e.status() < 500) throw;
      last_error = e.what();
      last_status = e.status();
    }
    if (attempt < kMaxAttempts) {
      clock_.sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError(last_error + " (after " + std::to_string(kMaxAttempts) + " attempts)",
                       last_status);
}

std::vector<std::string> EutilsClient::search_ids(const std::string& query, const std::string& db) {
  if (query.empty()) throw InvalidArgument("esearch: empty query");
  std::vector<std::string> ids;
  std::unordered_set<std::string> seen;
  std::size_t retstart = 0;
  for (;;) {
    auto resp = request("esearch.fcgi", {{"db", db},
                                         {"term", query},
                                         {"retstart", std::to_string(retstart)},
                                         {"retmax", std::to_string(session_.retmax)},
                                         {"retmode", "xml"}});
    auto page = parse_esearch(resp.body);
    for (auto& id : page.ids) {
      if (seen.insert(id).second) ids.push_back(std::move(id));
    }
    retstart += session_.retmax;
    if (page.ids.empty() || retstart >= page.count) break;
  }
  return ids;
}

FetchResult EutilsClient::fetch_records(const std::vector<std::string>& pmids, const std::string& db) {
  if (pmids.empty()) throw InvalidArgument("efetch: empty id list");
  FetchResult result;
  const std::size_t batch = std::min(kFetchBatch, session_.retmax);
  for (std::size_t start = 0; start < pmids.size(); start += batch) {
    const std::size_t end = std::min(pmids.size(), start + batch);
    std::string id_list;
    for (std::size_t i = start; i < end; ++i) {
      if (i > start) id_list += ',';
      id_list += pmids[i];
    }
    auto resp = request("efetch.fcgi", {{"db", db},
                                        {"id", id_list},
                                        {"retmode", "xml"},
                                        {"rettype", "abstract"}});
    auto records = parse_pubmed_xml(resp.body);
    std::unordered_set<std::string> wanted(pmids.begin() + start, pmids.begin() + end);
    std::unordered_set<std::string> got;
    for (auto& r : records) {
      if (wanted.count(r.pmid) && got.insert(r.pmid).second) result.records.push_back(std::move(r));
    }
    for (std::size_t i = start; i < end; ++i) {
      if (!got.count(pmids[i])) result.skipped_ids.push_back(pmids[i]);
    }
  }
  return result;
}

}  // namespace litclass
