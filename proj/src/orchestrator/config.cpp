#include "forge/orchestrator/config.hpp"

#include <fstream>

#include "forge/common/errors.hpp"

namespace forge::orchestrator {

using gateway::ProviderKind;
using gateway::ProviderProfile;

const ProviderProfile& EngineConfig::active_profile() const {
  const auto it = profiles.find(provider);
  if (it == profiles.end()) throw InvalidInput("unknown provider profile '" + provider + "'");
  return it->second;
}

const ProviderProfile& EngineConfig::judge_profile() const {
  if (!judge_provider) return active_profile();
  const auto it = profiles.find(*judge_provider);
  if (it == profiles.end()) throw InvalidInput("unknown judge profile '" + *judge_provider + "'");
  return it->second;
}

void EngineConfig::validate() const {
  if (profiles.empty()) throw InvalidInput("config has no provider profiles");
  try {
    active_profile().validate();
    judge_profile().validate();
    retry.validate();
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(e.what());
  }
  if (refinement_iterations < 1) throw InvalidInput("refinement_iterations must be at least 1");
  if (format_retries < 0) throw InvalidInput("format_retries must be non-negative");
  if (!(lambda >= 0.0)) throw InvalidInput("lambda must be non-negative");
  if (!(temperature >= 0.0) || !(judge_temperature >= 0.0)) throw InvalidInput("temperature must be non-negative");
  if (max_tokens < 1) throw InvalidInput("max_tokens must be positive");
  if (active_profile().kind == ProviderKind::scripted && !script) {
    throw InvalidInput("the scripted provider needs a script");
  }

  std::error_code ec;
  std::filesystem::create_directories(workspace_root, ec);
  if (ec) throw InvalidInput("cannot create workspace root " + workspace_root.string() + ": " + ec.message());
  const auto probe = workspace_root / ".forge-write-probe";
  {
    std::ofstream out(probe, std::ios::trunc);
    if (!out) throw InvalidInput("workspace root is not writable: " + workspace_root.string());
  }
  std::filesystem::remove(probe, ec);
}

EngineConfig default_config() {
  EngineConfig c;
  c.profiles["groq"] = {"groq", ProviderKind::openai_compatible, "https://api.groq.com/openai/v1", "GROQ_API_KEY",
                        "llama-3.1-70b-versatile"};
  c.profiles["gemini"] = {"gemini", ProviderKind::gemini_style, "https://generativelanguage.googleapis.com/v1beta",
                          "GEMINI_API_KEY", "gemini-1.5-flash"};
  c.profiles["ollama"] = {"ollama", ProviderKind::local_host, "http://localhost:11434", "", "llama3.1"};
  c.profiles["scripted"] = {"scripted", ProviderKind::scripted, "", "", "scripted"};
  return c;
}

void apply_env_overrides(EngineConfig& config, const gateway::Gateway::EnvLookup& env) {
  auto it = config.profiles.find(config.provider);
  if (it == config.profiles.end()) return;
  if (auto v = env("FORGE_BASE_URL"); v && !v->empty()) it->second.base_url = *v;
  if (auto v = env("FORGE_MODEL"); v && !v->empty()) it->second.default_model = *v;
}

namespace {

ProviderProfile profile_from_json(const std::string& name, const nlohmann::json& j, ProviderProfile base) {
  base.name = name;
  if (j.contains("kind")) base.kind = gateway::provider_kind_from_string(j.at("kind").get<std::string>());
  base.base_url = j.value("base_url", base.base_url);
  base.api_key_ref = j.value("api_key_ref", base.api_key_ref);
  base.default_model = j.value("default_model", base.default_model);
  return base;
}

}  // namespace

EngineConfig config_from_json(const nlohmann::json& j, EngineConfig c) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  try {
    if (j.contains("profiles")) {
      for (const auto& [name, p] : j.at("profiles").items()) {
        const auto it = c.profiles.find(name);
        c.profiles[name] = profile_from_json(name, p, it == c.profiles.end() ? ProviderProfile{} : it->second);
      }
    }
    c.provider = j.value("provider", c.provider);
    if (j.contains("judge_provider") && !j.at("judge_provider").is_null()) {
      c.judge_provider = j.at("judge_provider").get<std::string>();
    }
    if (j.contains("retry")) {
      const auto& r = j.at("retry");
      c.retry.initial_wait = gateway::Seconds{r.value("initial_wait", c.retry.initial_wait.count())};
      c.retry.backoff_factor = r.value("backoff_factor", c.retry.backoff_factor);
      c.retry.max_wait = gateway::Seconds{r.value("max_wait", c.retry.max_wait.count())};
      c.retry.max_retries = r.value("max_retries", c.retry.max_retries);
      c.retry.jitter = r.value("jitter", c.retry.jitter);
    }
    c.refinement_iterations = j.value("refinement_iterations", c.refinement_iterations);
    c.fallback_enabled = j.value("fallback_enabled", c.fallback_enabled);
    c.use_context = j.value("use_context", c.use_context);
    if (j.contains("workspace_root")) c.workspace_root = j.at("workspace_root").get<std::string>();
    c.lambda = j.value("lambda", c.lambda);
    c.temperature = j.value("temperature", c.temperature);
    c.judge_temperature = j.value("judge_temperature", c.judge_temperature);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.format_retries = j.value("format_retries", c.format_retries);
    c.model_review = j.value("model_review", c.model_review);
    c.license = j.value("license", c.license);
    if (j.contains("prompt_dir") && !j.at("prompt_dir").is_null()) {
      c.prompt_dir = j.at("prompt_dir").get<std::string>();
    }
    if (j.contains("script") && !j.at("script").is_null()) c.script = j.at("script");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(std::string("bad config value: ") + e.what());
  }
  return c;
}

nlohmann::ordered_json to_json(const EngineConfig& c) {
  nlohmann::ordered_json j;
  j["provider"] = c.provider;
  j["judge_provider"] = c.judge_provider ? nlohmann::ordered_json(*c.judge_provider) : nlohmann::ordered_json();
  auto& profiles = j["profiles"] = nlohmann::ordered_json::object();
  for (const auto& [name, p] : c.profiles) {
    profiles[name] = {{"kind", gateway::to_string(p.kind)},
                      {"base_url", p.base_url},
                      {"api_key_ref", p.api_key_ref},
                      {"default_model", p.default_model}};
  }
  j["retry"] = {{"initial_wait", c.retry.initial_wait.count()},
                {"backoff_factor", c.retry.backoff_factor},
                {"max_wait", c.retry.max_wait.count()},
                {"max_retries", c.retry.max_retries},
                {"jitter", c.retry.jitter}};
  j["refinement_iterations"] = c.refinement_iterations;
  j["fallback_enabled"] = c.fallback_enabled;
  j["use_context"] = c.use_context;
  j["workspace_root"] = c.workspace_root.string();
  j["lambda"] = c.lambda;
  j["temperature"] = c.temperature;
  j["judge_temperature"] = c.judge_temperature;
  j["max_tokens"] = c.max_tokens;
  j["format_retries"] = c.format_retries;
  j["model_review"] = c.model_review;
  j["license"] = c.license;
  j["prompt_dir"] = c.prompt_dir ? nlohmann::ordered_json(c.prompt_dir->string()) : nlohmann::ordered_json();
  return j;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open config");
  auto j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw InvalidInput("config is not valid JSON: " + path.string());
  return config_from_json(j);
}

}  // namespace forge::orchestrator
