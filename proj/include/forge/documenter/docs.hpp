#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "forge/common/package_tree.hpp"
#include "forge/common/prompts.hpp"
#include "forge/documenter/api.hpp"
#include "forge/documenter/markdown.hpp"
#include "forge/gateway/gateway.hpp"
#include "forge/planner/plan.hpp"

namespace forge::documenter {

struct DocSection {
  std::string title;
  std::string body;

  bool operator==(const DocSection&) const = default;
};

struct DocBundle {
  std::vector<DocSection> sections;
  std::string source_package;
  std::vector<LintFinding> findings;  // filled by the pipeline after rendering

  const DocSection* find(std::string_view title) const;
};

/// Section titles in their fixed order.
const std::vector<std::string>& canonical_sections();

enum class ExampleSource { example_files, model, stub };

std::string_view to_string(ExampleSource source);

struct UsageExamples {
  std::string markdown;
  ExampleSource source = ExampleSource::stub;
  int model_calls = 0;
};

/// Example files under examples/ are embedded verbatim without a model call.
/// Otherwise the model is asked for a walkthrough over the given symbols; a
/// reply needs a fenced code block and is retried up to max_retries times
/// before a stub note is used instead.
UsageExamples synthesize_examples(const gateway::ModelAccess& model, const PromptLibrary& prompts,
                                  const PackageTree& tree, std::string_view package_name,
                                  const std::vector<ApiSymbol>& symbols, int max_retries);

/// Embeds the examples/ files of a tree; empty when there are none.
std::string embed_example_files(const PackageTree& tree);

struct DocOptions {
  std::string license_name = "MIT";
};

/// Overview, Features, Installation, Usage, API Reference, Testing (only
/// when tests/ exists), Dependencies, Contributing, License. The API
/// Reference leaves out tests/, examples/ and setup.py.
DocBundle build_documentation(const PackageTree& tree, const planner::PackagePlan& plan,
                              const std::vector<ApiSymbol>& api, const std::vector<Relationship>& relationships,
                              const UsageExamples& examples, const DocOptions& options = {});

/// "# <package>" followed by one "## <title>" block per section.
std::string render_documentation(const DocBundle& bundle);

/// Renders into workspace/DOCUMENTATION.md and returns the path.
std::filesystem::path write_documentation(const DocBundle& bundle, const std::filesystem::path& workspace);

}  // namespace forge::documenter
