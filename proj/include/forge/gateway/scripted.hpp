#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/gateway/types.hpp"

namespace forge::gateway {

/// Replies used when any message of a request contains `match`. Replies are
/// consumed in order; the last one repeats once the list runs out.
struct ScriptRule {
  std::string match;
  std::vector<std::string> responses;
};

struct ScriptedBehavior {
  std::vector<std::string> responses;  // used when no rule matches
  std::vector<bool> failure_mask;      // call i fails when mask[i] is true
  std::optional<double> per_call_success_p;
  std::optional<std::uint64_t> seed;
  std::vector<ScriptRule> rules;
  /// When set, each successful call samples its reply index from
  /// apply_temperature(response_logits, request.temperature).
  std::vector<double> response_logits;

  void validate() const;
};

/// Deterministic (or explicitly seeded) stand-in for a hosted model.
///
/// Random draws come from std::mt19937_64, whose output sequence is fixed by
/// the C++ standard, and are mapped to [0, 1) with 53-bit precision, so a
/// seed reproduces the same run on every conforming toolchain.
class ScriptedProvider {
 public:
  explicit ScriptedProvider(ScriptedBehavior behavior);

  /// Throws ProviderError (retryable) for a scripted failure and
  /// ProviderError (final) when the script has no reply for the request.
  std::string respond(const CompletionRequest& request);

  std::size_t calls() const;
  std::size_t failures() const;

  static ScriptedBehavior behavior_from_json(const nlohmann::json& script);
  static ScriptedProvider from_json(const nlohmann::json& script);

 private:
  double next_uniform();

  mutable std::mutex mutex_;
  ScriptedBehavior behavior_;
  std::vector<std::size_t> rule_cursor_;
  std::size_t response_cursor_ = 0;
  std::size_t calls_ = 0;
  std::size_t failures_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace forge::gateway
