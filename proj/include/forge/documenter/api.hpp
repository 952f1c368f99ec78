#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/common/package_tree.hpp"

namespace forge::documenter {

enum class SymbolKind { class_def, function };

std::string_view to_string(SymbolKind kind);

struct ApiSymbol {
  SymbolKind kind = SymbolKind::function;
  std::string name;
  std::string signature;             // "f(x, y=1) -> int", "Loader(Base)"
  std::optional<std::string> docstring;
  std::string module_path;           // tree path of the defining file
  std::string parent_class;          // enclosing class for methods
  int line = 1;

  /// "Class.method" for methods, the plain name otherwise.
  std::string qualified_name() const;

  bool operator==(const ApiSymbol&) const = default;
};

struct ApiExtraction {
  std::vector<ApiSymbol> symbols;  // ordered by path, then line
  std::vector<std::string> diagnostics;
};

/// Top-level classes and functions plus methods of top-level classes from
/// every *.py entry. Files with syntax errors are skipped with a diagnostic.
ApiExtraction extract_api(const PackageTree& tree);

struct Relationship {
  std::string from_module;
  std::string to_module;

  bool operator==(const Relationship&) const = default;
};

/// Intra-package import edges; external imports are left out.
std::vector<Relationship> extract_relationships(const PackageTree& tree);

/// Value of a Python string literal token (prefixes, quotes and the common
/// escapes handled; f-strings are returned unformatted).
std::string decode_string_literal(std::string_view token);

/// Docstring normalisation in the style of inspect.cleandoc.
std::string clean_docstring(std::string_view raw);

struct SetupMetadata {
  std::optional<std::string> description;
  std::vector<std::string> keywords;
};

/// description= and keywords= of the setup() call in setup.py, when they are
/// literals. nullopt when setup.py is absent or does not parse.
std::optional<SetupMetadata> read_setup_metadata(const PackageTree& tree);

}  // namespace forge::documenter
