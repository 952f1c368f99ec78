#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "forge/common/package_tree.hpp"
#include "forge/gateway/gateway.hpp"
#include "forge/gateway/scripted.hpp"
#include "forge/orchestrator/config.hpp"

namespace forge::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Model reply holding a complete "mypkg" package with a data_loader module.
std::string sample_generation_reply();

/// Scripted behaviour answering every prompt of the pipeline; generation
/// returns `generation_reply`.
nlohmann::json pipeline_script(const std::string& generation_reply = sample_generation_reply());

/// Scripted profile, the given script, millisecond backoff, workspace root.
orchestrator::EngineConfig scripted_config(const std::filesystem::path& workspace_root,
                                           const nlohmann::json& script = pipeline_script());

/// Scripted provider behind a gateway that never sleeps or reads the
/// environment.
struct ScriptedModel {
  std::shared_ptr<gateway::ScriptedProvider> provider;
  std::shared_ptr<gateway::Gateway> gateway;

  gateway::ModelAccess access(double temperature = 0.2) const;
};

ScriptedModel scripted_model(gateway::ScriptedBehavior behavior);
ScriptedModel scripted_model(const nlohmann::json& script);

/// Python sources used for identity and invariance checks.
const std::vector<std::string>& python_fixtures();

/// (candidate, reference) pairs: template-versus-generated style edits.
const std::vector<std::pair<std::string, std::string>>& codebleu_fixture_pairs();

/// Tree whose contents never contain a line starting with a fence, so it
/// survives render_tree/parse_content.
PackageTree random_tree(std::mt19937_64& rng);

/// Arbitrary bytes biased towards headers, fences and broken UTF-8.
std::string random_wire_input(std::mt19937_64& rng);

/// Renames every identifier token through one random bijection.
std::string rename_identifiers(const std::string& source, std::mt19937_64& rng);

}  // namespace forge::testing
