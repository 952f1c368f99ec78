#include "forge/planner/refine.hpp"

#include "forge/common/text.hpp"
#include "forge/gateway/errors.hpp"
#include "forge/planner/judge.hpp"

namespace forge::planner {

FeatureSpec enhance_feature(const gateway::ModelAccess& model, const PromptLibrary& prompts,
                            std::string_view package_name, const FeatureSpec& feature, int max_retries) {
  if (text::trim(feature.raw_description).empty()) {
    throw InvalidInput("feature '" + feature.name + "' has an empty description");
  }
  if (max_retries < 0) throw InvalidInput("max_retries must be non-negative");
  const auto prompt = prompts.render("enhance_feature", {{"package_name", std::string(package_name)},
                                                         {"feature_name", feature.name},
                                                         {"raw_description", feature.raw_description}});
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    auto reply = model.chat(prompt.system, prompt.user);
    if (!text::trim(reply.text).empty() && text::has_fenced_block(reply.text)) {
      FeatureSpec out = feature;
      out.enhanced_description = std::move(reply.text);
      return out;
    }
  }
  throw gateway::ExhaustedRetries(max_retries + 1, "enhancement for '" + feature.name +
                                                       "' never contained a fenced pseudocode block");
}

PackagePlan enhance_features(const gateway::ModelAccess& model, const PromptLibrary& prompts,
                             const PackagePlan& plan, int max_retries) {
  PackagePlan out = plan;
  for (auto& f : out.features) f = enhance_feature(model, prompts, plan.package_name, f, max_retries);
  return out;
}

std::string describe_features(const PackagePlan& plan) {
  std::string out;
  for (const auto& f : plan.features) {
    out += "- " + f.name + ": " + std::string(text::trim(f.raw_description)) + "\n";
  }
  return out.empty() ? "(none)" : out;
}

namespace {

struct Judgement {
  QualityScore score;
  std::string critique;
};

Judgement judge(const gateway::ModelAccess& model, const PromptLibrary& prompts, const PackagePlan& plan,
                const std::string& description, const RefinementOptions& options) {
  const auto prompt = prompts.render("judge_description", {{"package_name", plan.package_name},
                                                           {"features", describe_features(plan)},
                                                           {"feedback", options.feedback},
                                                           {"description", description}});
  std::string last_error;
  for (int attempt = 0; attempt <= options.judge_max_retries; ++attempt) {
    auto reply = model.chat(prompt.system, prompt.user);
    try {
      return {parse_quality_score(reply.text), std::move(reply.text)};
    } catch (const MalformedJudgeOutput& e) {
      last_error = e.what();
    }
  }
  throw MalformedJudgeOutput("judge output malformed after " + std::to_string(options.judge_max_retries + 1) +
                             " attempts: " + last_error);
}

std::string rewrite(const gateway::ModelAccess& model, const PromptLibrary& prompts, const PackagePlan& plan,
                    const std::string& description, const std::string& critique,
                    const RefinementOptions& options) {
  const auto prompt = prompts.render("rewrite_description", {{"package_name", plan.package_name},
                                                             {"features", describe_features(plan)},
                                                             {"feedback", options.feedback},
                                                             {"description", description},
                                                             {"critique", critique}});
  const auto reply = model.chat(prompt.system, prompt.user);
  const auto trimmed = text::trim(reply.text);
  // An empty rewrite carries the current description forward.
  return trimmed.empty() ? description : std::string(trimmed);
}

}  // namespace

RefinementOutcome refine_description(const RefinementRoles& roles, const PromptLibrary& prompts,
                                     const PackagePlan& plan, const RefinementOptions& options) {
  if (options.iterations < 1) throw InvalidInput("refinement needs at least one iteration");
  if (text::trim(plan.raw_description).empty()) throw InvalidInput("package description is empty");

  RefinementOutcome out;
  std::string current = plan.enhanced_description.value_or(plan.raw_description);
  for (int t = 0; t < options.iterations; ++t) {
    out.iterates.push_back(current);
    Judgement j = judge(roles.judge, prompts, plan, current, options);
    out.quality_history.push_back(j.score);
    if (t + 1 < options.iterations) current = rewrite(roles.writer, prompts, plan, current, j.critique, options);
  }

  std::size_t chosen = out.iterates.size() - 1;
  if (options.keep_best) {
    chosen = 0;
    for (std::size_t i = 1; i < out.quality_history.size(); ++i) {
      if (out.quality_history[i].overall > out.quality_history[chosen].overall) chosen = i;
    }
  }
  out.chosen_index = chosen;
  out.plan = plan;
  out.plan.enhanced_description = out.iterates[chosen];
  return out;
}

}  // namespace forge::planner
