#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "litclass/ingest.hpp"

namespace litclass {

inline constexpr const char* kEutilsBaseUrl = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";
inline constexpr const char* kApiKeyEnv = "NCBI_API_KEY";
inline constexpr std::size_t kFetchBatch = 200;

struct FetchSession {
  std::string base_url = kEutilsBaseUrl;
  std::optional<std::string> api_key;
  double requests_per_second = 3.0;
  std::size_t retmax = 500;

  // NCBI allows 10 requests/s with a key and 3 without.
  void validate() const;

  // Session with the API key taken from NCBI_API_KEY when set.
  static FetchSession from_environment();
};

using QueryParams = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws TransportError with status 0 on connection failure or timeout.
  virtual HttpResponse get(const std::string& url, const QueryParams& params) = 0;
};

// cpp-httplib backed transport for http:// and https:// URLs.
std::unique_ptr<HttpTransport> make_http_transport(double timeout_seconds = 30.0);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() = 0;  // seconds on a monotonic scale
  virtual void sleep_for(double seconds) = 0;
};

Clock& system_clock();

struct SearchPage {
  std::size_t count = 0;
  std::size_t retstart = 0;
  std::vector<std::string> ids;
};

struct FetchResult {
  std::vector<DocumentRecord> records;
  std::vector<std::string> skipped_ids;  // requested but absent from the response
};

// Parsers are pure; they throw ParseError on malformed input.
SearchPage parse_esearch(std::string_view xml);
std::vector<DocumentRecord> parse_pubmed_xml(std::string_view xml);

// esearch/efetch client. One request stream, rate limited through `clock`;
// 5xx responses and timeouts are retried three times with 1 s, 2 s backoff,
// 4xx responses fail immediately.
class EutilsClient {
 public:
  EutilsClient(FetchSession session, HttpTransport& transport, Clock& clock = system_clock());

  std::vector<std::string> search_ids(const std::string& query, const std::string& db = "pubmed");
  FetchResult fetch_records(const std::vector<std::string>& pmids, const std::string& db = "pubmed");

  const FetchSession& session() const { return session_; }
  std::size_t requests_sent() const { return requests_sent_; }

 private:
  HttpResponse request(const std::string& endpoint, QueryParams params);
  void throttle();

  FetchSession session_;
  HttpTransport& transport_;
  Clock& clock_;
  std::optional<double> last_request_;
  std::size_t requests_sent_ = 0;
};

}  // namespace litclass
