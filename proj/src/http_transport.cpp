#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "litclass/error.hpp"
#include "litclass/eutils.hpp"

namespace litclass {
namespace {

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(double timeout) : timeout_(timeout) {}

  HttpResponse get(const std::string& url, const QueryParams& params) override {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("malformed url: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string origin = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(timeout_);
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_follow_location(true);

    httplib::Params query;
    for (const auto& [k, v] : params) query.emplace(k, v);
    auto res = client.Get(path, query, httplib::Headers{{"User-Agent", "litclass/0.3"}});
    if (!res) throw TransportError(url + ": " + httplib::to_string(res.error()), 0);
    return {res->status, res->body};
  }

 private:
  double timeout_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_http_transport(double timeout_seconds) {
  return std::make_unique<HttplibTransport>(timeout_seconds);
}

}  // namespace litclass
