#include "forge/gateway/transport.hpp"

#include <httplib.h>

namespace forge::gateway {

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(Seconds timeout) : timeout_(timeout) {}

  HttpResponse post(const std::string& url, const std::vector<Header>& headers,
                    const std::string& body) override {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) return {0, {}, "malformed url '" + url + "'"};
    const std::size_t path_start = url.find('/', scheme + 3);
    const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(timeout_.count());
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    httplib::Headers http_headers;
    std::string content_type = "application/json";
    for (const auto& [name, value] : headers) {
      if (name == "Content-Type") {
        content_type = value;
      } else {
        http_headers.emplace(name, value);
      }
    }
    auto result = client.Post(path, http_headers, body, content_type);
    if (!result) return {0, {}, httplib::to_string(result.error())};
    return {result->status, result->body, {}};
  }

 private:
  Seconds timeout_;
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport(Seconds timeout) {
  return std::make_shared<HttplibTransport>(timeout);
}

}  // namespace forge::gateway
