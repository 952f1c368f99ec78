#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "forge/gateway/scripted.hpp"
#include "forge/gateway/transport.hpp"
#include "forge/gateway/types.hpp"

namespace forge::gateway {

/// Uniform chat-completion access with retries.
///
/// A Gateway is safe to share across threads once its scripted providers are
/// registered. Each complete() call keeps its retry state on its own stack.
class Gateway {
 public:
  using Sleeper = std::function<void(Seconds)>;
  using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

  Gateway();
  Gateway(std::shared_ptr<HttpTransport> transport, Sleeper sleeper, EnvLookup env);

  /// Scripted profiles are looked up by profile name.
  void register_scripted(const std::string& name, std::shared_ptr<ScriptedProvider> provider);
  std::shared_ptr<ScriptedProvider> scripted(const std::string& name) const;

  /// Sends the request, retrying retryable failures with backoff_wait(policy, n)
  /// between attempts. Throws AuthMissing, ExhaustedRetries, MalformedResponse,
  /// or a final ProviderError.
  CompletionResult complete(const ProviderProfile& profile, const CompletionRequest& request,
                            const RetryPolicy& policy) const;

  /// Profile's api_key_ref variable, else FORGE_API_KEY. Empty for kinds that
  /// need no key; throws AuthMissing for remote kinds without one.
  std::string resolve_api_key(const ProviderProfile& profile) const;

  static std::optional<std::string> process_env(std::string_view name);
  static void real_sleep(Seconds duration);

 private:
  std::string attempt_once(const ProviderProfile& profile, const CompletionRequest& request,
                           const std::string& api_key) const;

  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleeper_;
  EnvLookup env_;
  mutable std::shared_mutex scripted_mutex_;
  std::map<std::string, std::shared_ptr<ScriptedProvider>> scripted_;
};

/// Everything a model-backed operation needs for its calls.
struct ModelAccess {
  const Gateway& gateway;
  ProviderProfile profile;
  RetryPolicy policy;
  double temperature = 0.2;
  int max_tokens = 4096;

  CompletionResult chat(std::string system, std::string user) const;
};

}  // namespace forge::gateway
