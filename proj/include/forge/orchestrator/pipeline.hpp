#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/common/prompts.hpp"
#include "forge/gateway/gateway.hpp"
#include "forge/orchestrator/config.hpp"
#include "forge/orchestrator/job.hpp"
#include "forge/orchestrator/workspace.hpp"
#include "forge/planner/plan.hpp"

namespace forge::orchestrator {

struct PackageRequest {
  std::string name;
  std::string description;
  std::vector<planner::FeatureSpec> features;
  std::optional<std::string> code_template;
};

/// "Name: description" or a bare "Name" (the name doubles as description).
planner::FeatureSpec parse_feature_arg(std::string_view arg);

/// Files the plan is expected to produce: the base files plus a module,
/// example and test per feature.
std::vector<std::string> planned_files(const planner::PackagePlan& plan);

/// Called with the proposed file list when confirmation is interactive.
using ConfirmFn = std::function<bool(const std::vector<std::string>& files)>;

struct RunOptions {
  bool non_interactive = false;
  ConfirmFn confirm;  // required unless non_interactive
};

struct PipelineResult {
  std::string job_id;
  JobState state = JobState::planning;
  std::filesystem::path workspace;
  std::filesystem::path zip_path;
  std::filesystem::path doc_path;
  nlohmann::ordered_json report;
  std::optional<std::string> error;
};

/// Runs jobs phase by phase. Phase methods move the job through its state
/// machine; a phase that throws leaves the job failed with the cause logged
/// and its partial artifacts on disk.
class Engine {
 public:
  Engine(EngineConfig config, std::shared_ptr<gateway::Gateway> gateway, PromptLibrary prompts);

  /// Real transports, the configured prompt directory and, when the config
  /// holds a script, a scripted provider registered under the "scripted"
  /// profile name and any profile of kind scripted.
  static std::unique_ptr<Engine> from_config(EngineConfig config);

  const EngineConfig& config() const noexcept { return config_; }
  const gateway::Gateway& gateway() const noexcept { return *gateway_; }
  const PromptLibrary& prompts() const noexcept { return prompts_; }

  /// Validates the request and creates the job directory. Throws InvalidInput
  /// or planner::InvalidPlan.
  std::shared_ptr<Job> create_job(const PackageRequest& request) const;

  /// planning: enhance features, refine the description, build the context
  /// prompt, persist the plan. Ends in awaiting_refinement.
  void plan(Job& job) const;
  /// Another refinement round with user feedback; stays in awaiting_refinement.
  void refine(Job& job, const std::string& feedback) const;
  /// Accepts the plan and proposes its file list: awaiting_confirmation.
  void approve_plan(Job& job) const;
  /// The confirm step: awaiting_confirmation -> generating.
  void confirm_files(Job& job) const;
  /// generating -> documenting -> done: generate, merge fallback, materialize,
  /// document, validate, evaluate, zip.
  void build(Job& job) const;

  PipelineResult run_pipeline(const PackageRequest& request, const RunOptions& options) const;

  PipelineResult result_of(const Job& job) const;

 private:
  gateway::ModelAccess writer() const;
  gateway::ModelAccess judge() const;
  void persist_job(const Job& job) const;
  template <typename F>
  void guarded(Job& job, const char* phase, F&& body) const;

  EngineConfig config_;
  std::shared_ptr<gateway::Gateway> gateway_;
  PromptLibrary prompts_;
};

/// Builds the engine from the config and runs one job to completion.
PipelineResult run_pipeline(const EngineConfig& config, const PackageRequest& request, const RunOptions& options);

}  // namespace forge::orchestrator
