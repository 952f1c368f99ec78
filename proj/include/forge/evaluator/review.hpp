#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/common/prompts.hpp"
#include "forge/gateway/gateway.hpp"

namespace forge::evaluator {

enum class Rubric { package, documentation, enhancement };

std::string_view to_string(Rubric rubric);
/// Throws InvalidInput for an unknown name.
Rubric rubric_from_string(std::string_view name);

/// package: Structure, Code Quality, Testing, Usability
/// documentation: Clarity, Completeness, Structure, Readability
/// enhancement: Relevance, Clarity, Depth, Usefulness
const std::vector<std::string>& rubric_criteria(Rubric rubric);

struct ReviewScore {
  Rubric rubric = Rubric::package;
  std::vector<std::pair<std::string, double>> scores;  // rubric order, each in [0, 10]
  std::string reviewer_model;

  double score(std::string_view criterion) const;
  double mean() const;
};

/// Asks the reviewer for a fenced JSON block with one score per criterion.
/// Replies that do not parse are retried up to max_retries times, after
/// which MalformedJudgeOutput is thrown. Gateway errors propagate.
ReviewScore model_review(const gateway::ModelAccess& model, const PromptLibrary& prompts, Rubric rubric,
                         std::string_view artifact_text, int max_retries = 2);

}  // namespace forge::evaluator
