#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "forge/source/metrics.hpp"
#include "forge/source/structure.hpp"
#include "forge/source/syntax_tree.hpp"

namespace forge::source {

std::string module_name_for_path(std::string_view path) {
  if (path.size() < 3 || path.substr(path.size() - 3) != ".py") return {};
  std::string stem(path.substr(0, path.size() - 3));
  constexpr std::string_view init = "__init__";
  if (stem == init) return {};
  if (stem.size() > init.size() && stem.ends_with("/__init__")) stem.resize(stem.size() - init.size() - 1);
  std::replace(stem.begin(), stem.end(), '/', '.');
  return stem;
}

namespace {

std::string dotted_text(const SyntaxTree& tree, int id) {
  std::string out;
  for (const int c : tree.node(id).children) out += tree.token_of(c).text;
  return out;
}

std::string parent_package(const std::string& module) {
  const auto dot = module.rfind('.');
  return dot == std::string::npos ? std::string{} : module.substr(0, dot);
}

class ImportResolver {
 public:
  ImportResolver(const std::set<std::string>& modules, std::string current, bool is_package)
      : modules_(modules), current_(std::move(current)), is_package_(is_package) {}

  void import_stmt(const SyntaxTree& tree, int id) {
    for (const int c : tree.node(id).children) {
      int name = -1;
      if (tree.node(c).kind == "dotted_name") name = c;
      if (tree.node(c).kind == "aliased_import") name = tree.node(c).children.front();
      if (name < 0) continue;
      // `import a.b.c` loads every prefix; credit the deepest one we own.
      std::string dotted = dotted_text(tree, name);
      while (!dotted.empty() && !modules_.contains(dotted)) dotted = parent_package(dotted);
      if (!dotted.empty()) add(dotted, 1);
    }
  }

  void import_from(const SyntaxTree& tree, int id) {
    const auto& children = tree.node(id).children;
    std::size_t dots = 0;
    std::string base;
    std::size_t i = 1;
    for (; i < children.size(); ++i) {
      const auto& k = tree.node(children[i]).kind;
      if (k == ".") {
        dots += 1;
      } else if (k == "...") {
        dots += 3;
      } else if (k == "dotted_name") {
        base = dotted_text(tree, children[i]);
      } else {
        break;
      }
    }
    if (dots > 0) {
      std::string anchor = is_package_ ? current_ : parent_package(current_);
      for (std::size_t d = 1; d < dots; ++d) {
        if (anchor.empty()) return;
        anchor = parent_package(anchor);
      }
      if (base.empty()) {
        base = anchor;
      } else if (!anchor.empty()) {
        base = anchor + "." + base;
      }
    }
    for (; i < children.size(); ++i) {
      const auto& n = tree.node(children[i]);
      if (n.kind == "*") {
        if (modules_.contains(base)) add(base, 1);
        continue;
      }
      int name = -1;
      if (n.kind == "dotted_name") name = children[i];
      if (n.kind == "aliased_import") name = n.children.front();
      if (name < 0) continue;
      const std::string imported = dotted_text(tree, name);
      const std::string submodule = base.empty() ? imported : base + "." + imported;
      if (modules_.contains(submodule)) {
        add(submodule, 1);
      } else if (modules_.contains(base)) {
        add(base, 1);
      }
    }
  }

  const std::map<std::string, std::size_t>& targets() const { return targets_; }

 private:
  void add(const std::string& target, std::size_t names) {
    if (target == current_) return;
    targets_[target] += names;
  }

  const std::set<std::string>& modules_;
  std::string current_;
  bool is_package_;
  std::map<std::string, std::size_t> targets_;
};

}  // namespace

ImportScan scan_imports(const PackageTree& tree) {
  ImportScan scan;
  std::set<std::string> modules;
  for (const auto& [path, content] : tree) {
    if (auto m = module_name_for_path(path); !m.empty()) modules.insert(std::move(m));
  }
  for (const auto& [path, content] : tree) {
    const std::string module = module_name_for_path(path);
    if (module.empty()) continue;
    const SyntaxTree syntax = parse(content);
    if (syntax.has_errors()) {
      scan.diagnostics.push_back(path + ": skipped, " + std::to_string(syntax.error_count()) + " syntax error(s)");
      continue;
    }
    ImportResolver resolver(modules, module, path.ends_with("__init__.py"));
    for (std::size_t id = 0; id < syntax.node_count(); ++id) {
      const auto& kind = syntax.node(static_cast<int>(id)).kind;
      if (kind == "import_stmt") resolver.import_stmt(syntax, static_cast<int>(id));
      if (kind == "import_from") resolver.import_from(syntax, static_cast<int>(id));
    }
    for (const auto& [target, names] : resolver.targets()) scan.edges.push_back({module, target, names});
  }
  std::sort(scan.edges.begin(), scan.edges.end(), [](const ModuleImport& a, const ModuleImport& b) {
    return std::tie(a.from_module, a.to_module) < std::tie(b.from_module, b.to_module);
  });
  return scan;
}

double structure_objective(const StructureGraph& graph) {
  double coupling = 0.0;
  for (const auto& e : graph.edges) coupling += e.weight;
  double complexity = 0.0;
  for (const double c : graph.complexity) complexity += c;
  return coupling + graph.lambda * complexity;
}

namespace {

// Tarjan's strongly connected components; every component with more than one
// node is an import cycle.
std::vector<std::vector<std::size_t>> cycles(std::size_t n, const std::vector<StructureEdge>& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& e : edges) adj[e.from].push_back(e.to);
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  int counter = 0;
  std::function<void(std::size_t)> connect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const std::size_t w : adj[v]) {
      if (index[w] < 0) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] != index[v]) return;
    std::vector<std::size_t> component;
    std::size_t w;
    do {
      w = stack.back();
      stack.pop_back();
      on_stack[w] = false;
      component.push_back(w);
    } while (w != v);
    if (component.size() > 1) {
      std::sort(component.begin(), component.end());
      out.push_back(std::move(component));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) connect(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

StructureGraph build_structure_graph(const PackageTree& tree, double lambda) {
  StructureGraph graph;
  graph.lambda = lambda;
  std::map<std::string, std::size_t> index;
  for (const auto& [path, content] : tree) {
    const std::string module = module_name_for_path(path);
    if (module.empty() || index.contains(module)) continue;
    index[module] = graph.nodes.size();
    graph.nodes.push_back(module);
    graph.complexity.push_back(static_cast<double>(code_metrics(content).cyclomatic_complexity));
  }
  ImportScan scan = scan_imports(tree);
  graph.diagnostics = std::move(scan.diagnostics);
  for (const auto& e : scan.edges) {
    graph.edges.push_back({index.at(e.from_module), index.at(e.to_module), static_cast<double>(e.names)});
  }
  for (const auto& component : cycles(graph.nodes.size(), graph.edges)) {
    std::string msg = "import cycle:";
    for (const std::size_t v : component) msg += " " + graph.nodes[v];
    graph.diagnostics.push_back(std::move(msg));
  }
  return graph;
}

}  // namespace forge::source
