#include "forge/evaluator/review.hpp"

#include <json.hpp>

#include "forge/common/errors.hpp"
#include "forge/common/text.hpp"
#include "forge/planner/judge.hpp"

namespace forge::evaluator {

std::string_view to_string(Rubric rubric) {
  switch (rubric) {
    case Rubric::package: return "package";
    case Rubric::documentation: return "documentation";
    case Rubric::enhancement: return "enhancement";
  }
  return "unknown";
}

Rubric rubric_from_string(std::string_view name) {
  for (const Rubric r : {Rubric::package, Rubric::documentation, Rubric::enhancement}) {
    if (to_string(r) == name) return r;
  }
  throw InvalidInput("unknown rubric '" + std::string(name) + "'");
}

const std::vector<std::string>& rubric_criteria(Rubric rubric) {
  static const std::vector<std::string> package{"Structure", "Code Quality", "Testing", "Usability"};
  static const std::vector<std::string> documentation{"Clarity", "Completeness", "Structure", "Readability"};
  static const std::vector<std::string> enhancement{"Relevance", "Clarity", "Depth", "Usefulness"};
  switch (rubric) {
    case Rubric::package: return package;
    case Rubric::documentation: return documentation;
    case Rubric::enhancement: return enhancement;
  }
  return package;
}

double ReviewScore::score(std::string_view criterion) const {
  for (const auto& [name, value] : scores) {
    if (name == criterion) return value;
  }
  throw InvalidInput("no score for '" + std::string(criterion) + "'");
}

double ReviewScore::mean() const {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [name, value] : scores) sum += value;
  return sum / static_cast<double>(scores.size());
}

namespace {

std::string_view artifact_kind(Rubric rubric) {
  switch (rubric) {
    case Rubric::package: return "Python packages";
    case Rubric::documentation: return "technical documentation";
    case Rubric::enhancement: return "software feature descriptions";
  }
  return "artifacts";
}

}  // namespace

ReviewScore model_review(const gateway::ModelAccess& model, const PromptLibrary& prompts, Rubric rubric,
                         std::string_view artifact_text, int max_retries) {
  if (text::trim(artifact_text).empty()) throw InvalidInput("review artifact is empty");
  const auto& criteria = rubric_criteria(rubric);
  nlohmann::ordered_json example;
  for (const auto& c : criteria) example[c] = 7;
  const auto prompt = prompts.render("review", {{"artifact_kind", std::string(artifact_kind(rubric))},
                                                {"criteria", text::join(criteria, ", ")},
                                                {"example", example.dump()},
                                                {"artifact", std::string(artifact_text)}});
  std::string last_error;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    const auto reply = model.chat(prompt.system, prompt.user);
    try {
      const auto values = planner::parse_rubric_scores(reply.text, criteria);
      ReviewScore out;
      out.rubric = rubric;
      out.reviewer_model = model.profile.default_model;
      for (std::size_t i = 0; i < criteria.size(); ++i) out.scores.emplace_back(criteria[i], values[i]);
      return out;
    } catch (const planner::MalformedJudgeOutput& e) {
      last_error = e.what();
    }
  }
  throw planner::MalformedJudgeOutput("review failed after " + std::to_string(max_retries + 1) +
                                      " attempts: " + last_error);
}

}  // namespace forge::evaluator
