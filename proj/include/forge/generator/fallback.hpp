#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "forge/common/errors.hpp"
#include "forge/common/package_tree.hpp"

namespace forge::generator {

class InvalidFeatureName : public Error {
 public:
  using Error::Error;
};

struct FallbackTemplate {
  std::string package_name;
  std::vector<std::string> features;
  std::string description;  // optional summary for setup.py and README.md
};

/// Lowercased feature name with spaces replaced by underscores.
std::string feature_lower(std::string_view feature);

/// The six files every package must have.
std::vector<std::string> base_file_paths(std::string_view package_name);

/// Per-feature module, example and test paths.
std::vector<std::string> feature_file_paths(std::string_view package_name, std::string_view feature);

/// Base files plus three stubs per feature, 6 + 3F entries. Throws
/// InvalidFeatureName when a feature does not map to a fresh module name, and
/// InvalidInput for a bad package name.
PackageTree create_fallback_structure(const FallbackTemplate& tmpl);

struct MergeResult {
  PackageTree tree;
  bool used_fallback = false;
  std::vector<std::string> added_paths;
};

/// When any base file is missing from generated, adds every scaffold entry
/// generated lacks. Generated entries are never replaced.
MergeResult merge_fallback(const PackageTree& generated, const PackageTree& scaffold,
                           std::string_view package_name);

}  // namespace forge::generator
