#include <algorithm>
#include <map>
#include <memory>

#include "forge/source/dataflow.hpp"

namespace forge::source {
namespace {

struct Definition {
  SourcePos site;
  int var_index = 0;
  int occurrence = 0;
};

struct Scope {
  Scope* parent = nullptr;
  bool is_class = false;
  int ordinal = 0;
  std::vector<std::string> variables;
  std::map<std::string, std::vector<Definition>, std::less<>> defs;
};

class DefUseBuilder {
 public:
  explicit DefUseBuilder(const SyntaxTree& tree) : tree_(tree) {}

  DefUseGraph run() {
    Scope* module = new_scope(nullptr, false);
    if (tree_.root() >= 0) visit(tree_.root(), module);
    std::stable_sort(graph_.edges.begin(), graph_.edges.end(), [](const DefUseEdge& a, const DefUseEdge& b) {
      if (a.use_site != b.use_site) return a.use_site < b.use_site;
      return a.def_site < b.def_site;
    });
    return std::move(graph_);
  }

 private:
  const SyntaxNode& node(int id) const { return tree_.node(id); }
  const std::string& kind(int id) const { return node(id).kind; }
  const std::vector<int>& children(int id) const { return node(id).children; }

  SourcePos pos(int leaf) const {
    const Token& t = tree_.token_of(leaf);
    return {t.line, t.column};
  }

  Scope* new_scope(Scope* parent, bool is_class) {
    scopes_.push_back(std::make_unique<Scope>());
    Scope* s = scopes_.back().get();
    s->parent = parent;
    s->is_class = is_class;
    s->ordinal = static_cast<int>(scopes_.size() - 1);
    return s;
  }

  void define(int leaf, Scope* scope) {
    const std::string& name = tree_.token_of(leaf).text;
    auto& list = scope->defs[name];
    if (list.empty()) scope->variables.push_back(name);
    const auto var_it = std::find(scope->variables.begin(), scope->variables.end(), name);
    Definition d;
    d.site = pos(leaf);
    d.var_index = static_cast<int>(var_it - scope->variables.begin());
    d.occurrence = static_cast<int>(list.size());
    list.push_back(d);
  }

  void use(int leaf, Scope* scope) {
    const std::string& name = tree_.token_of(leaf).text;
    for (Scope* s = scope; s != nullptr; s = s->parent) {
      if (s != scope && s->is_class) continue;
      const auto it = s->defs.find(name);
      if (it == s->defs.end() || it->second.empty()) continue;
      const Definition& d = it->second.back();
      graph_.edges.push_back({name, d.site, pos(leaf), s->ordinal, d.var_index, d.occurrence});
      return;
    }
    ++graph_.unresolved_uses;
  }

  void visit_all(const std::vector<int>& ids, Scope* scope) {
    for (const int c : ids) visit(c, scope);
  }

  // Binds every name in an assignment target; anything that is not a plain
  // name (attribute, subscript) is evaluated as an expression.
  void bind_target(int id, Scope* scope) {
    const std::string& k = kind(id);
    if (k == "identifier") {
      define(id, scope);
    } else if (k == "pattern_list" || k == "expression_list" || k == "tuple" || k == "list" ||
               k == "parenthesized_expr") {
      for (const int c : children(id)) {
        if (!node(c).is_leaf() || kind(c) == "identifier") bind_target(c, scope);
      }
    } else if (k == "starred") {
      bind_target(children(id).back(), scope);
    } else {
      visit(id, scope);
    }
  }

  void visit_parameters(int params, Scope* outer, Scope* inner) {
    for (const int p : children(params)) {
      if (kind(p) != "parameter") continue;
      const auto& pc = children(p);
      // Annotations and defaults evaluate in the enclosing scope.
      for (std::size_t i = 0; i < pc.size(); ++i) {
        if ((kind(pc[i]) == ":" || kind(pc[i]) == "=") && i + 1 < pc.size()) visit(pc[i + 1], outer);
      }
      for (const int c : pc) {
        if (kind(c) == "identifier") {
          define(c, inner);
          break;
        }
      }
    }
  }

  void visit_function(int id, Scope* scope) {
    const auto& c = children(id);
    int name = -1;
    int params = -1;
    int body = -1;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string& k = kind(c[i]);
      if (k == "identifier" && name < 0) name = c[i];
      if (k == "parameters") params = c[i];
      if (k == "->" && i + 1 < c.size()) visit(c[i + 1], scope);
      if (k == "block") body = c[i];
    }
    Scope* inner = new_scope(scope, false);
    if (params >= 0) visit_parameters(params, scope, inner);
    if (name >= 0) define(name, scope);
    if (body >= 0) visit(body, inner);
  }

  void visit_class(int id, Scope* scope) {
    int name = -1;
    int body = -1;
    for (const int c : children(id)) {
      const std::string& k = kind(c);
      if (k == "identifier" && name < 0) name = c;
      if (k == "argument_list") visit(c, scope);
      if (k == "block") body = c;
    }
    if (name >= 0) define(name, scope);
    if (body >= 0) visit(body, new_scope(scope, true));
  }

  void visit_lambda(int id, Scope* scope) {
    Scope* inner = new_scope(scope, false);
    for (const int c : children(id)) {
      if (kind(c) == "lambda_parameters") visit_parameters(c, scope, inner);
    }
    visit(children(id).back(), inner);
  }

  void visit_import(int id, Scope* scope) {
    for (const int c : children(id)) {
      if (kind(c) == "aliased_import") {
        define(children(c).back(), scope);
      } else if (kind(c) == "dotted_name") {
        // `import a.b` binds `a`; `from m import b` binds `b`.
        define(children(c).front(), scope);
      }
    }
  }

  void visit_import_from(int id, Scope* scope) {
    bool after_import = false;
    for (const int c : children(id)) {
      if (kind(c) == "import") {
        after_import = true;
        continue;
      }
      if (!after_import) continue;
      if (kind(c) == "aliased_import") {
        define(children(c).back(), scope);
      } else if (kind(c) == "dotted_name") {
        define(children(c).front(), scope);
      }
    }
  }

  void visit(int id, Scope* scope) {
    const SyntaxNode& n = node(id);
    const std::string& k = n.kind;
    if (n.is_leaf()) {
      if (k == "identifier") use(id, scope);
      return;
    }
    const auto& c = n.children;
    if (k == "function_def") return visit_function(id, scope);
    if (k == "class_def") return visit_class(id, scope);
    if (k == "lambda") return visit_lambda(id, scope);
    if (k == "import_stmt") return visit_import(id, scope);
    if (k == "import_from") return visit_import_from(id, scope);
    if (k == "global_stmt" || k == "nonlocal_stmt") return;
    if (k == "assignment") {
      visit(c.back(), scope);
      for (std::size_t i = 0; i + 1 < c.size(); i += 2) bind_target(c[i], scope);
      return;
    }
    if (k == "augmented_assignment") {
      visit(c[2], scope);
      if (kind(c[0]) == "identifier") {
        use(c[0], scope);
        define(c[0], scope);
      } else {
        visit(c[0], scope);
      }
      return;
    }
    if (k == "annotated_assignment") {
      visit(c[2], scope);
      if (c.size() >= 5) {
        visit(c[4], scope);
        bind_target(c[0], scope);
      } else if (kind(c[0]) != "identifier") {
        visit(c[0], scope);
      }
      return;
    }
    if (k == "named_expr") {
      visit(c[2], scope);
      define(c[0], scope);
      return;
    }
    if (k == "for_stmt" || k == "comprehension_for") {
      std::size_t i = 0;
      while (i < c.size() && kind(c[i]) != "for") ++i;
      const int target = c[i + 1];
      const int iter = c[i + 3];
      visit(iter, scope);
      bind_target(target, scope);
      for (std::size_t j = i + 4; j < c.size(); ++j) visit(c[j], scope);
      return;
    }
    if (k == "with_item") {
      visit(c[0], scope);
      if (c.size() >= 3) bind_target(c[2], scope);
      return;
    }
    if (k == "except_clause") {
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (kind(c[i]) == "as" && i + 1 < c.size()) {
          define(c[i + 1], scope);
          ++i;
        } else {
          visit(c[i], scope);
        }
      }
      return;
    }
    if (k == "attribute") {
      visit(c[0], scope);
      return;
    }
    if (k == "keyword_argument") {
      visit(c[2], scope);
      return;
    }
    if (k == "decorated_definition") {
      visit_all(c, scope);
      return;
    }
    visit_all(c, scope);
  }

  const SyntaxTree& tree_;
  std::vector<std::unique_ptr<Scope>> scopes_;
  DefUseGraph graph_;
};

}  // namespace

DefUseGraph def_use(const SyntaxTree& tree) { return DefUseBuilder(tree).run(); }

}  // namespace forge::source
