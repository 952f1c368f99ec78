#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "forge/common/package_tree.hpp"

namespace forge::source {

/// Dotted module name for a tree path: "pkg/a.py" -> "pkg.a",
/// "pkg/__init__.py" -> "pkg". Empty for non-Python paths.
std::string module_name_for_path(std::string_view path);

/// Intra-package import edge, aggregated over every import statement of the
/// importing module. names counts imported names (one per dotted module in
/// `import`, one per name in `from ... import`).
struct ModuleImport {
  std::string from_module;
  std::string to_module;
  std::size_t names = 0;
};

struct ImportScan {
  std::vector<ModuleImport> edges;      // sorted by (from, to)
  std::vector<std::string> diagnostics; // skipped files and the like
};

/// Resolves absolute and relative imports against the modules present in the
/// tree. External imports and self-imports are dropped. Files that do not
/// parse cleanly are skipped with a diagnostic.
ImportScan scan_imports(const PackageTree& tree);

struct StructureEdge {
  std::size_t from = 0;  // index into StructureGraph::nodes
  std::size_t to = 0;
  double weight = 0.0;
};

struct StructureGraph {
  std::vector<std::string> nodes;
  std::vector<double> complexity;  // parallel to nodes
  std::vector<StructureEdge> edges;
  double lambda = 0.5;
  std::vector<std::string> diagnostics;
};

/// sum of edge weights + lambda * sum of node complexities.
double structure_objective(const StructureGraph& graph);

/// Module-granularity graph: w(u, v) is the imported-name count and c(v) the
/// cyclomatic complexity of v. Import cycles are reported as diagnostics.
StructureGraph build_structure_graph(const PackageTree& tree, double lambda = 0.5);

}  // namespace forge::source
