#include <fstream>
#include <sstream>

#include "forge/planner/plan.hpp"

namespace forge::planner {

using nlohmann::ordered_json;

QualityScore QualityScore::from_criteria(double specificity, double completeness, double technical_accuracy) {
  QualityScore q;
  q.specificity = specificity;
  q.completeness = completeness;
  q.technical_accuracy = technical_accuracy;
  q.overall = (specificity + completeness + technical_accuracy) / 3.0;
  return q;
}

bool is_valid_package_name(std::string_view name) {
  if (name.empty() || name.front() < 'a' || name.front() > 'z') return false;
  for (const char c : name) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
  }
  return true;
}

void validate_plan(const PackagePlan& plan, bool require_features) {
  if (!is_valid_package_name(plan.package_name)) {
    throw InvalidPlan("package name must match [a-z][a-z0-9_]*: '" + plan.package_name + "'");
  }
  for (const auto& f : plan.features) {
    if (f.name.empty()) throw InvalidPlan("feature name is empty");
  }
  if (require_features && plan.features.empty()) throw InvalidPlan("plan has no features");
}

std::vector<std::string> plan_warnings(const PackagePlan& plan) {
  std::vector<std::string> out;
  if (plan.features.size() > kFeatureWarningThreshold) {
    out.push_back(std::to_string(plan.features.size()) + " features requested; enhanced descriptions above " +
                  std::to_string(kFeatureWarningThreshold) + " tend to get verbose");
  }
  return out;
}

namespace {

ordered_json optional_text(const std::optional<std::string>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<std::string> read_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

ordered_json score_json(const QualityScore& q) {
  ordered_json j;
  j["specificity"] = q.specificity;
  j["completeness"] = q.completeness;
  j["technical_accuracy"] = q.technical_accuracy;
  j["overall"] = q.overall;
  return j;
}

}  // namespace

ordered_json to_json(const PackagePlan& plan) {
  ordered_json j;
  j["package_name"] = plan.package_name;
  j["raw_description"] = plan.raw_description;
  j["enhanced_description"] = optional_text(plan.enhanced_description);
  ordered_json features = ordered_json::array();
  for (const auto& f : plan.features) {
    ordered_json fj;
    fj["name"] = f.name;
    fj["raw_description"] = f.raw_description;
    fj["enhanced_description"] = optional_text(f.enhanced_description);
    ordered_json history = ordered_json::array();
    for (const auto& q : f.quality_history) history.push_back(score_json(q));
    fj["quality_history"] = std::move(history);
    features.push_back(std::move(fj));
  }
  j["features"] = std::move(features);
  j["context_prompt"] = optional_text(plan.context_prompt);
  j["code_template"] = optional_text(plan.code_template);
  return j;
}

PackagePlan plan_from_json(const nlohmann::json& j) {
  try {
    PackagePlan plan;
    plan.package_name = j.at("package_name").get<std::string>();
    plan.raw_description = j.at("raw_description").get<std::string>();
    plan.enhanced_description = read_optional(j, "enhanced_description");
    for (const auto& fj : j.at("features")) {
      FeatureSpec f;
      f.name = fj.at("name").get<std::string>();
      f.raw_description = fj.at("raw_description").get<std::string>();
      f.enhanced_description = read_optional(fj, "enhanced_description");
      if (fj.contains("quality_history")) {
        for (const auto& qj : fj.at("quality_history")) {
          QualityScore q;
          q.specificity = qj.at("specificity").get<double>();
          q.completeness = qj.at("completeness").get<double>();
          q.technical_accuracy = qj.at("technical_accuracy").get<double>();
          q.overall = qj.at("overall").get<double>();
          f.quality_history.push_back(q);
        }
      }
      plan.features.push_back(std::move(f));
    }
    plan.context_prompt = read_optional(j, "context_prompt");
    plan.code_template = read_optional(j, "code_template");
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidPlan(std::string("malformed plan JSON: ") + e.what());
  }
}

std::string build_context_prompt(const PackagePlan& plan) {
  if (!plan.enhanced_description) {
    throw MissingEnhancement("package description has not been enhanced");
  }
  for (const auto& f : plan.features) {
    if (!f.enhanced_description) throw MissingEnhancement("feature '" + f.name + "' has no enhanced description");
  }
  std::string out = "# Package: " + plan.package_name + "\n\n" + *plan.enhanced_description + "\n";
  for (const auto& f : plan.features) {
    out += "\n## Feature: " + f.name + "\n\n" + *f.enhanced_description + "\n";
  }
  if (plan.code_template) out += "\n## Template\n\n" + *plan.code_template + "\n";
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << content;
  out.close();
  if (!out) throw IoError(path, "write failed");
}

}  // namespace

PlanFiles persist_plan(const PackagePlan& plan, const std::filesystem::path& workspace) {
  std::error_code ec;
  std::filesystem::create_directories(workspace, ec);
  if (ec) throw IoError(workspace, "cannot create workspace (" + ec.message() + ")");
  PlanFiles files{workspace / "plan.json", workspace / "context.txt"};
  write_file(files.json_path, to_json(plan).dump(2) + "\n");
  write_file(files.text_path, plan.context_prompt.value_or(""));
  return files;
}

PackagePlan load_plan(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw IoError(json_path, "cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidPlan("plan.json is not valid JSON (" + json_path.string() + "): " + e.what());
  }
  return plan_from_json(j);
}

}  // namespace forge::planner
