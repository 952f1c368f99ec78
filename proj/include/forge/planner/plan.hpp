#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/common/errors.hpp"

namespace forge::planner {

struct QualityScore {
  double specificity = 0.0;
  double completeness = 0.0;
  double technical_accuracy = 0.0;
  double overall = 0.0;

  /// Builds a score whose overall is the mean of the three criteria.
  static QualityScore from_criteria(double specificity, double completeness, double technical_accuracy);

  bool operator==(const QualityScore&) const = default;
};

struct FeatureSpec {
  std::string name;
  std::string raw_description;
  std::optional<std::string> enhanced_description;
  std::vector<QualityScore> quality_history;

  bool operator==(const FeatureSpec&) const = default;
};

struct PackagePlan {
  std::string package_name;
  std::string raw_description;
  std::optional<std::string> enhanced_description;
  std::vector<FeatureSpec> features;
  std::optional<std::string> context_prompt;
  std::optional<std::string> code_template;

  bool operator==(const PackagePlan&) const = default;
};

class MissingEnhancement : public Error {
 public:
  using Error::Error;
};

class InvalidPlan : public Error {
 public:
  using Error::Error;
};

/// [a-z][a-z0-9_]*
bool is_valid_package_name(std::string_view name);

/// Throws InvalidPlan on a bad package name, an empty feature name or, when
/// require_features is set, an empty feature list.
void validate_plan(const PackagePlan& plan, bool require_features);

/// Advisory messages, e.g. an overly long feature list.
std::vector<std::string> plan_warnings(const PackagePlan& plan);

inline constexpr std::size_t kFeatureWarningThreshold = 8;

nlohmann::ordered_json to_json(const PackagePlan& plan);
PackagePlan plan_from_json(const nlohmann::json& j);

/// Header, enhanced description, one "## Feature: <name>" section per
/// feature in order, then the code template under "## Template" if set.
/// Throws MissingEnhancement when any enhanced text is absent.
std::string build_context_prompt(const PackagePlan& plan);

struct PlanFiles {
  std::filesystem::path json_path;
  std::filesystem::path text_path;
};

/// Writes plan.json and context.txt (empty when there is no context prompt).
PlanFiles persist_plan(const PackagePlan& plan, const std::filesystem::path& workspace);
PackagePlan load_plan(const std::filesystem::path& json_path);

}  // namespace forge::planner
