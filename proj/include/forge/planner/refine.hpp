#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "forge/common/prompts.hpp"
#include "forge/gateway/gateway.hpp"
#include "forge/planner/plan.hpp"

namespace forge::planner {

/// Asks the model for an enhanced description with pseudocode. A reply
/// without a fenced block is retried, up to max_retries extra calls; the
/// accepted reply is stored verbatim. Throws InvalidInput for an empty raw
/// description (before any call) and gateway::ExhaustedRetries when no reply
/// is well formed.
FeatureSpec enhance_feature(const gateway::ModelAccess& model, const PromptLibrary& prompts,
                            std::string_view package_name, const FeatureSpec& feature, int max_retries);

/// Enhances every feature of the plan in order.
PackagePlan enhance_features(const gateway::ModelAccess& model, const PromptLibrary& prompts,
                             const PackagePlan& plan, int max_retries);

struct RefinementRoles {
  gateway::ModelAccess judge;
  gateway::ModelAccess writer;
};

struct RefinementOutcome {
  PackagePlan plan;                          // enhanced_description set to the chosen iterate
  std::vector<QualityScore> quality_history; // one score per iteration
  std::vector<std::string> iterates;         // p_0 .. p_{T-1}
  std::size_t chosen_index = 0;
};

struct RefinementOptions {
  int iterations = 3;          // T
  bool keep_best = true;       // otherwise the last iterate is returned
  std::string feedback;        // user notes passed to judge and writer
  int judge_max_retries = 2;   // extra judge calls per step on malformed output
};

/// Judge-then-rewrite loop. Step t scores p_t; unless it is the last step,
/// the critique drives a rewrite into p_{t+1}. T judge steps, T-1 rewrites.
/// p_0 is the plan's enhanced description if present, else the raw one. The
/// first iterate with maximal overall score wins ties.
RefinementOutcome refine_description(const RefinementRoles& roles, const PromptLibrary& prompts,
                                     const PackagePlan& plan, const RefinementOptions& options);

/// Feature list rendered for prompts: "- name: description" per feature.
std::string describe_features(const PackagePlan& plan);

}  // namespace forge::planner
