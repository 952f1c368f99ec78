#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "forge/common/text.hpp"
#include "forge/planner/judge.hpp"

namespace forge::planner {

namespace {

std::string fold_key(std::string_view key) {
  std::string out = text::to_lower(text::trim(key));
  std::replace(out.begin(), out.end(), ' ', '_');
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

std::vector<double> parse_rubric_scores(std::string_view text, const std::vector<std::string>& criteria) {
  nlohmann::json object;
  bool found = false;
  for (const auto& block : text::fenced_blocks(text)) {
    auto parsed = nlohmann::json::parse(block.body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_object()) {
      object = std::move(parsed);
      found = true;
      break;
    }
  }
  if (!found) throw MalformedJudgeOutput("judge reply has no fenced JSON object");

  std::vector<double> scores;
  scores.reserve(criteria.size());
  for (const auto& criterion : criteria) {
    const nlohmann::json* value = nullptr;
    if (object.contains(criterion)) {
      value = &object.at(criterion);
    } else {
      const std::string wanted = fold_key(criterion);
      for (const auto& [key, v] : object.items()) {
        if (fold_key(key) == wanted) {
          value = &v;
          break;
        }
      }
    }
    if (value == nullptr) throw MalformedJudgeOutput("judge reply is missing '" + criterion + "'");
    if (!value->is_number()) throw MalformedJudgeOutput("judge value for '" + criterion + "' is not a number");
    const double x = value->get<double>();
    if (!std::isfinite(x)) throw MalformedJudgeOutput("judge value for '" + criterion + "' is not finite");
    scores.push_back(std::clamp(x, 0.0, 10.0));
  }
  return scores;
}

const std::vector<std::string>& quality_criteria() {
  static const std::vector<std::string> criteria{"specificity", "completeness", "technical_accuracy"};
  return criteria;
}

QualityScore parse_quality_score(std::string_view judge_text) {
  const auto v = parse_rubric_scores(judge_text, quality_criteria());
  return QualityScore::from_criteria(v[0], v[1], v[2]);
}

std::string render_quality_score(const QualityScore& score) {
  nlohmann::ordered_json j;
  j["specificity"] = score.specificity;
  j["completeness"] = score.completeness;
  j["technical_accuracy"] = score.technical_accuracy;
  return "```json\n" + j.dump() + "\n```\n";
}

}  // namespace forge::planner
