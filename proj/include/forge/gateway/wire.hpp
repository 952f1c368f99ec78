#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/gateway/types.hpp"

namespace forge::gateway {

using Header = std::pair<std::string, std::string>;

struct WireRequest {
  std::string url;
  std::vector<Header> headers;
  std::string body;
};

/// Serializes a request in the provider's wire format. Key order in the JSON
/// body is fixed, so equal requests give byte-identical bodies.
WireRequest encode_request(const ProviderProfile& profile, const CompletionRequest& request,
                           const std::string& api_key);

/// Extracts the assistant text. Throws MalformedResponse on schema mismatch.
std::string decode_reply(ProviderKind kind, std::string_view body);

}  // namespace forge::gateway
