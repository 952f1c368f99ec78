#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace forge::gateway {

using Seconds = std::chrono::duration<double>;

enum class Role { system, user, assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view name);

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct CompletionRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.2;  // tau >= 0; applied server-side for remote kinds
  int max_tokens = 4096;

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

struct CompletionResult {
  std::string text;
  int attempts_used = 0;
  std::vector<Seconds> waits;  // backoff slept before attempts 2..n
};

/// Exponential backoff parameters. Defaults: 1 s, x2, capped at 30 s, 5 retries.
struct RetryPolicy {
  Seconds initial_wait{1.0};
  double backoff_factor = 2.0;
  Seconds max_wait{30.0};
  int max_retries = 5;
  /// Sleep a uniform fraction of each wait. Off by default so schedules are
  /// reproducible.
  bool jitter = false;

  void validate() const;
};

/// min(max_wait, initial_wait * backoff_factor^attempt).
Seconds backoff_wait(const RetryPolicy& policy, int attempt);

/// Probability that the first success happens after exactly k failures:
/// (1 - p)^k * p. Throws std::domain_error unless 0 < p <= 1.
double retry_success_probability(double p, int k);

/// softmax(logits / tau). Throws std::domain_error for tau <= 0 and
/// std::invalid_argument for empty or non-finite logits.
std::vector<double> apply_temperature(std::span<const double> logits, double tau);

enum class ProviderKind { openai_compatible, gemini_style, local_host, scripted };

std::string_view to_string(ProviderKind kind);
ProviderKind provider_kind_from_string(std::string_view name);

struct ProviderProfile {
  std::string name;
  ProviderKind kind = ProviderKind::scripted;
  std::string base_url;
  std::string api_key_ref;  // environment variable holding the key
  std::string default_model;

  bool is_remote() const {
    return kind == ProviderKind::openai_compatible || kind == ProviderKind::gemini_style;
  }
  void validate() const;
};

}  // namespace forge::gateway
