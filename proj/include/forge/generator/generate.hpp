#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "forge/common/errors.hpp"
#include "forge/common/package_tree.hpp"
#include "forge/common/prompts.hpp"
#include "forge/gateway/gateway.hpp"
#include "forge/generator/fallback.hpp"
#include "forge/generator/wire_format.hpp"
#include "forge/planner/plan.hpp"

namespace forge::generator {

class EmptyGeneration : public Error {
 public:
  using Error::Error;
};

struct GenerationOptions {
  bool use_context = true;
  bool fallback_enabled = true;
};

struct GenerationResult {
  PackageTree tree;
  bool used_fallback = false;
  std::vector<ParseEvent> events;
  std::vector<std::string> fallback_paths;  // scaffold entries merged in
  std::string reply;                        // raw model output
  int attempts_used = 0;
};

/// Generation prompt: the package template contract plus either the context
/// prompt or the enhanced descriptions.
RenderedPrompt build_generation_prompt(const PromptLibrary& prompts, const planner::PackagePlan& plan,
                                       bool use_context);

/// One model call, parsed with parse_content, then completed from the
/// fallback scaffold when base files are missing. Throws EmptyGeneration when
/// nothing parsed and fallback is disabled.
GenerationResult generate_package(const gateway::ModelAccess& model, const PromptLibrary& prompts,
                                  const planner::PackagePlan& plan, const GenerationOptions& options);

/// Scaffold for a plan: its package name, feature names and description.
PackageTree fallback_for(const planner::PackagePlan& plan);

/// Writes every entry below out_dir and returns the written paths. out_dir
/// must be absent or empty unless force is set.
std::vector<std::filesystem::path> materialize(const PackageTree& tree, const std::filesystem::path& out_dir,
                                               bool force = false);

}  // namespace forge::generator
