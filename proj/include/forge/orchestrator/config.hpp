#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "forge/gateway/gateway.hpp"
#include "forge/gateway/types.hpp"

namespace forge::orchestrator {

struct EngineConfig {
  std::map<std::string, gateway::ProviderProfile> profiles;
  std::string provider = "groq";       // active profile for writing
  std::optional<std::string> judge_provider;  // refinement judge; defaults to provider
  gateway::RetryPolicy retry;
  int refinement_iterations = 3;       // T
  bool fallback_enabled = true;
  bool use_context = true;
  std::filesystem::path workspace_root = "forge-workspace";
  double lambda = 0.5;
  double temperature = 0.2;
  double judge_temperature = 0.0;
  int max_tokens = 4096;
  int format_retries = 2;              // extra calls on malformed model output
  bool model_review = false;           // rubric reviews in the evaluation report
  std::string license = "MIT";
  std::optional<std::filesystem::path> prompt_dir;
  std::optional<nlohmann::json> script;  // scripted provider behaviour

  const gateway::ProviderProfile& active_profile() const;
  const gateway::ProviderProfile& judge_profile() const;

  /// Throws InvalidInput for a config the engine cannot run with; creates
  /// workspace_root and checks that it is writable.
  void validate() const;
};

/// groq (OpenAI-compatible), gemini, ollama and scripted profiles.
EngineConfig default_config();

/// FORGE_BASE_URL and FORGE_MODEL override the active profile.
void apply_env_overrides(EngineConfig& config, const gateway::Gateway::EnvLookup& env);

/// Keys missing from the JSON keep their defaults; profiles are merged by name.
EngineConfig config_from_json(const nlohmann::json& j, EngineConfig base = default_config());
nlohmann::ordered_json to_json(const EngineConfig& config);
EngineConfig load_config(const std::filesystem::path& path);

}  // namespace forge::orchestrator
