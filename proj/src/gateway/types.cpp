#include "forge/gateway/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "forge/gateway/errors.hpp"

namespace forge::gateway {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view name) {
  if (name == "system") return Role::system;
  if (name == "user") return Role::user;
  if (name == "assistant") return Role::assistant;
  throw std::invalid_argument("unknown chat role '" + std::string(name) + "'");
}

void CompletionRequest::validate() const {
  if (messages.empty()) throw std::invalid_argument("completion request has no messages");
  for (const auto& m : messages) {
    if (m.content.empty()) throw std::invalid_argument("chat message content is empty");
  }
  if (!std::isfinite(temperature) || temperature < 0.0) {
    throw std::invalid_argument("temperature must be finite and >= 0");
  }
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be >= 1");
}

void RetryPolicy::validate() const {
  if (!(initial_wait.count() > 0.0)) throw std::invalid_argument("initial_wait must be > 0");
  if (!(backoff_factor >= 1.0)) throw std::invalid_argument("backoff_factor must be >= 1");
  if (!(max_wait >= initial_wait)) throw std::invalid_argument("max_wait must be >= initial_wait");
  if (max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
}

Seconds backoff_wait(const RetryPolicy& policy, int attempt) {
  if (attempt < 0 || attempt > policy.max_retries) {
    throw std::invalid_argument("attempt " + std::to_string(attempt) + " outside 0.." +
                                std::to_string(policy.max_retries));
  }
  const double raw = policy.initial_wait.count() * std::pow(policy.backoff_factor, attempt);
  return Seconds{std::min(policy.max_wait.count(), raw)};
}

double retry_success_probability(double p, int k) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("success probability must lie in (0, 1]");
  if (k < 0) throw std::domain_error("retry count must be non-negative");
  return std::pow(1.0 - p, k) * p;
}

std::vector<double> apply_temperature(std::span<const double> logits, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::domain_error("temperature must be > 0");
  if (logits.empty()) throw std::invalid_argument("logits are empty");
  for (const double l : logits) {
    if (!std::isfinite(l)) throw std::invalid_argument("logits must be finite");
  }
  // Shift by the max so exp never overflows; softmax is shift invariant.
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - top) / tau);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::openai_compatible: return "openai_compatible";
    case ProviderKind::gemini_style: return "gemini_style";
    case ProviderKind::local_host: return "local_host";
    case ProviderKind::scripted: return "scripted";
  }
  return "scripted";
}

ProviderKind provider_kind_from_string(std::string_view name) {
  if (name == "openai_compatible") return ProviderKind::openai_compatible;
  if (name == "gemini_style") return ProviderKind::gemini_style;
  if (name == "local_host") return ProviderKind::local_host;
  if (name == "scripted") return ProviderKind::scripted;
  throw std::invalid_argument("unknown provider kind '" + std::string(name) + "'");
}

void ProviderProfile::validate() const {
  if (kind != ProviderKind::scripted) {
    const bool absolute = base_url.starts_with("http://") || base_url.starts_with("https://");
    if (!absolute) throw std::invalid_argument("provider '" + name + "' needs an absolute base_url");
  } else if (name.empty()) {
    throw std::invalid_argument("scripted provider profile needs a name");
  }
  if (is_remote() && api_key_ref.empty()) {
    throw std::invalid_argument("provider '" + name + "' needs an api_key_ref");
  }
}

bool is_retryable_status(int status) { return status == 0 || status == 429 || (status >= 500 && status <= 599); }

}  // namespace forge::gateway
