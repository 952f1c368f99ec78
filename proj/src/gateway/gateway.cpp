#include "forge/gateway/gateway.hpp"

#include <cstdlib>
#include <random>
#include <thread>

#include "forge/gateway/errors.hpp"
#include "forge/gateway/wire.hpp"

namespace forge::gateway {

Gateway::Gateway() : Gateway(make_http_transport(), &Gateway::real_sleep, &Gateway::process_env) {}

Gateway::Gateway(std::shared_ptr<HttpTransport> transport, Sleeper sleeper, EnvLookup env)
    : transport_(std::move(transport)), sleeper_(std::move(sleeper)), env_(std::move(env)) {}

void Gateway::register_scripted(const std::string& name, std::shared_ptr<ScriptedProvider> provider) {
  std::unique_lock lock(scripted_mutex_);
  scripted_[name] = std::move(provider);
}

std::shared_ptr<ScriptedProvider> Gateway::scripted(const std::string& name) const {
  std::shared_lock lock(scripted_mutex_);
  const auto it = scripted_.find(name);
  return it == scripted_.end() ? nullptr : it->second;
}

std::optional<std::string> Gateway::process_env(std::string_view name) {
  const char* value = std::getenv(std::string(name).c_str());
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

void Gateway::real_sleep(Seconds duration) {
  std::this_thread::sleep_for(duration);
}

std::string Gateway::resolve_api_key(const ProviderProfile& profile) const {
  if (profile.kind == ProviderKind::scripted) return {};
  if (!profile.api_key_ref.empty()) {
    if (auto key = env_(profile.api_key_ref)) return *key;
  }
  if (auto key = env_("FORGE_API_KEY")) return *key;
  if (profile.is_remote()) {
    const std::string ref = profile.api_key_ref.empty() ? "FORGE_API_KEY" : profile.api_key_ref;
    throw AuthMissing("no API key for provider '" + profile.name + "': set " + ref);
  }
  return {};
}

std::string Gateway::attempt_once(const ProviderProfile& profile, const CompletionRequest& request,
                                  const std::string& api_key) const {
  if (profile.kind == ProviderKind::scripted) {
    auto provider = scripted(profile.name);
    if (!provider) throw ProviderError("no scripted provider registered as '" + profile.name + "'", 0, false);
    return provider->respond(request);
  }
  const WireRequest wire = encode_request(profile, request, api_key);
  const HttpResponse response = transport_->post(wire.url, wire.headers, wire.body);
  if (response.status == 0) {
    throw ProviderError("transport error calling " + wire.url + ": " + response.error, 0, true);
  }
  if (response.status < 200 || response.status >= 300) {
    std::string snippet = response.body.substr(0, 200);
    throw ProviderError("HTTP " + std::to_string(response.status) + " from " + wire.url + ": " + snippet,
                        response.status, is_retryable_status(response.status));
  }
  return decode_reply(profile.kind, response.body);
}

CompletionResult Gateway::complete(const ProviderProfile& profile, const CompletionRequest& request,
                                   const RetryPolicy& policy) const {
  profile.validate();
  request.validate();
  policy.validate();
  const std::string api_key = resolve_api_key(profile);

  CompletionResult result;
  std::string last_error;
  std::mt19937_64 jitter_rng(std::hash<std::string>{}(request.model_id));
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    try {
      result.text = attempt_once(profile, request, api_key);
      result.attempts_used = attempt + 1;
      return result;
    } catch (const ProviderError& e) {
      if (!e.retryable()) throw;
      last_error = e.what();
    }
    if (attempt == policy.max_retries) break;
    Seconds wait = backoff_wait(policy, attempt);
    if (policy.jitter) {
      wait *= static_cast<double>(jitter_rng() >> 11) * 0x1.0p-53;
    }
    result.waits.push_back(wait);
    sleeper_(wait);
  }
  throw ExhaustedRetries(policy.max_retries + 1, last_error);
}

CompletionResult ModelAccess::chat(std::string system, std::string user) const {
  CompletionRequest request;
  request.model_id = profile.default_model.empty() ? std::string("default") : profile.default_model;
  request.temperature = temperature;
  request.max_tokens = max_tokens;
  if (!system.empty()) request.messages.push_back({Role::system, std::move(system)});
  request.messages.push_back({Role::user, std::move(user)});
  return gateway.complete(profile, request, policy);
}

}  // namespace forge::gateway
