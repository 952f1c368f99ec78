#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "forge/common/errors.hpp"
#include "forge/planner/plan.hpp"

namespace forge::planner {

class MalformedJudgeOutput : public Error {
 public:
  using Error::Error;
};

/// Reads the first fenced block whose body is a JSON object and returns the
/// value of each criterion, in criteria order, clamped to [0, 10]. A key
/// matches exactly, or after case folding with spaces and underscores treated
/// alike. Throws MalformedJudgeOutput on a missing block, missing criterion or
/// non-numeric value.
std::vector<double> parse_rubric_scores(std::string_view text, const std::vector<std::string>& criteria);

/// {"specificity", "completeness", "technical_accuracy"}
const std::vector<std::string>& quality_criteria();

QualityScore parse_quality_score(std::string_view judge_text);

/// Fenced JSON block that parse_quality_score reads back exactly.
std::string render_quality_score(const QualityScore& score);

}  // namespace forge::planner
