#pragma once

#include <memory>
#include <string>
#include <vector>

#include "forge/gateway/types.hpp"
#include "forge/gateway/wire.hpp"

namespace forge::gateway {

struct HttpResponse {
  int status = 0;  // 0 when the request never completed
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::vector<Header>& headers,
                            const std::string& body) = 0;
};

/// cpp-httplib backed transport. https URLs need OpenSSL support at build time.
std::shared_ptr<HttpTransport> make_http_transport(Seconds timeout = Seconds{120.0});

}  // namespace forge::gateway
