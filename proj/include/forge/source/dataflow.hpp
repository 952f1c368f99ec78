#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "forge/source/syntax_tree.hpp"

namespace forge::source {

struct SourcePos {
  int line = 1;
  int column = 0;

  friend auto operator<=>(const SourcePos&, const SourcePos&) = default;
};

/// A definition of `variable` reaching a later read of it. scope is the
/// ordinal of the defining scope in creation order (module = 0), var_index
/// the order in which the variable was first defined in that scope and
/// def_occurrence which of its definitions this is. Together they identify
/// the edge independently of the variable's spelling.
struct DefUseEdge {
  std::string variable;
  SourcePos def_site;
  SourcePos use_site;
  int scope = 0;
  int var_index = 0;
  int def_occurrence = 0;
};

struct DefUseGraph {
  std::vector<DefUseEdge> edges;  // sorted by use site, then def site
  std::size_t unresolved_uses = 0;
};

/// Intraprocedural def-use chains. Assignments, parameters, loop targets,
/// imports, `as` bindings and def/class names are definitions; every other
/// bare name read is a use, bound to the most recent definition already seen
/// in the scope chain. Class bodies are skipped when resolving from inside
/// methods.
DefUseGraph def_use(const SyntaxTree& tree);

}  // namespace forge::source
