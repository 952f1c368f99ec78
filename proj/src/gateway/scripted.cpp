#include "forge/gateway/scripted.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "forge/gateway/errors.hpp"

namespace forge::gateway {

void ScriptedBehavior::validate() const {
  if (per_call_success_p) {
    const double p = *per_call_success_p;
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("per_call_success_p must lie in (0, 1]");
    if (!seed) throw std::invalid_argument("stochastic scripted mode requires an explicit seed");
  }
  if (!response_logits.empty() && response_logits.size() != responses.size()) {
    throw std::invalid_argument("response_logits must have one entry per response");
  }
  if (!response_logits.empty() && !seed) {
    throw std::invalid_argument("sampled scripted replies require an explicit seed");
  }
  for (const auto& rule : rules) {
    if (rule.match.empty() || rule.responses.empty()) {
      throw std::invalid_argument("script rules need a match string and at least one response");
    }
  }
}

ScriptedProvider::ScriptedProvider(ScriptedBehavior behavior)
    : behavior_(std::move(behavior)), rule_cursor_(behavior_.rules.size(), 0), rng_(behavior_.seed.value_or(0)) {
  behavior_.validate();
}

double ScriptedProvider::next_uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::string ScriptedProvider::respond(const CompletionRequest& request) {
  std::lock_guard lock(mutex_);
  const std::size_t call = calls_++;

  bool fail = false;
  if (behavior_.per_call_success_p) {
    fail = !(next_uniform() < *behavior_.per_call_success_p);
  } else if (call < behavior_.failure_mask.size()) {
    fail = behavior_.failure_mask[call];
  }
  if (fail) {
    ++failures_;
    throw ProviderError("scripted transient failure on call " + std::to_string(call + 1), 503, true);
  }

  for (std::size_t r = 0; r < behavior_.rules.size(); ++r) {
    const auto& rule = behavior_.rules[r];
    for (const auto& message : request.messages) {
      if (message.content.find(rule.match) == std::string::npos) continue;
      std::size_t& cursor = rule_cursor_[r];
      const std::string& reply = rule.responses[std::min(cursor, rule.responses.size() - 1)];
      ++cursor;
      return reply;
    }
  }

  if (behavior_.responses.empty()) {
    throw ProviderError("scripted provider has no reply for this request", 400, false);
  }
  if (!behavior_.response_logits.empty()) {
    std::size_t pick = 0;
    if (request.temperature <= 0.0) {
      for (std::size_t i = 1; i < behavior_.response_logits.size(); ++i) {
        if (behavior_.response_logits[i] > behavior_.response_logits[pick]) pick = i;
      }
    } else {
      const auto probs = apply_temperature(behavior_.response_logits, request.temperature);
      double u = next_uniform();
      pick = probs.size() - 1;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        if (u < probs[i]) {
          pick = i;
          break;
        }
        u -= probs[i];
      }
    }
    return behavior_.responses[pick];
  }
  const std::size_t index = std::min(response_cursor_, behavior_.responses.size() - 1);
  ++response_cursor_;
  return behavior_.responses[index];
}

std::size_t ScriptedProvider::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t ScriptedProvider::failures() const {
  std::lock_guard lock(mutex_);
  return failures_;
}

ScriptedBehavior ScriptedProvider::behavior_from_json(const nlohmann::json& script) {
  ScriptedBehavior behavior;
  behavior.responses = script.value("responses", std::vector<std::string>{});
  behavior.failure_mask = script.value("failure_mask", std::vector<bool>{});
  if (script.contains("success_p")) behavior.per_call_success_p = script.at("success_p").get<double>();
  if (script.contains("seed")) behavior.seed = script.at("seed").get<std::uint64_t>();
  behavior.response_logits = script.value("response_logits", std::vector<double>{});
  for (const auto& rule : script.value("rules", nlohmann::json::array())) {
    ScriptRule r;
    r.match = rule.at("match").get<std::string>();
    if (rule.contains("responses")) {
      r.responses = rule.at("responses").get<std::vector<std::string>>();
    } else {
      r.responses.push_back(rule.at("response").get<std::string>());
    }
    behavior.rules.push_back(std::move(r));
  }
  return behavior;
}

ScriptedProvider ScriptedProvider::from_json(const nlohmann::json& script) {
  return ScriptedProvider(behavior_from_json(script));
}

}  // namespace forge::gateway
