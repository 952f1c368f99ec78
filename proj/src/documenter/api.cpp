#include "forge/documenter/api.hpp"

#include <algorithm>

#include "forge/common/text.hpp"
#include "forge/source/structure.hpp"
#include "forge/source/syntax_tree.hpp"

namespace forge::documenter {

using source::SyntaxTree;

std::string_view to_string(SymbolKind kind) { return kind == SymbolKind::class_def ? "class" : "function"; }

std::string ApiSymbol::qualified_name() const { return parent_class.empty() ? name : parent_class + "." + name; }

std::string decode_string_literal(std::string_view token) {
  std::size_t p = 0;
  bool raw = false;
  while (p < token.size() && token[p] != '"' && token[p] != '\'') {
    if (token[p] == 'r' || token[p] == 'R') raw = true;
    ++p;
  }
  token.remove_prefix(p);
  if (token.empty()) return {};
  const char q = token.front();
  const std::size_t quote = token.size() >= 6 && token[1] == q && token[2] == q ? 3 : 1;
  if (token.size() < 2 * quote) return std::string(token.substr(quote));
  std::string_view body = token.substr(quote, token.size() - 2 * quote);
  if (raw) return std::string(body);
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '\\' || i + 1 >= body.size()) {
      out += body[i];
      continue;
    }
    const char e = body[++i];
    switch (e) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case '\\': out += '\\'; break;
      case '\'': out += '\''; break;
      case '"': out += '"'; break;
      case '\n': break;
      default:
        out += '\\';
        out += e;
    }
  }
  return out;
}

std::string clean_docstring(std::string_view raw) {
  const std::string expanded = text::replace_all(std::string(raw), "\t", "        ");
  std::vector<std::string> lines;
  for (const auto l : text::split_lines(expanded)) lines.emplace_back(text::trim_right(l));
  if (lines.empty()) return {};
  std::size_t indent = std::string::npos;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto first = lines[i].find_first_not_of(' ');
    if (first != std::string::npos) indent = std::min(indent, first);
  }
  lines[0] = std::string(text::trim(lines[0]));
  if (indent != std::string::npos) {
    for (std::size_t i = 1; i < lines.size(); ++i) lines[i] = lines[i].size() > indent ? lines[i].substr(indent) : "";
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  while (!lines.empty() && lines.front().empty()) lines.erase(lines.begin());
  return text::join(lines, "\n");
}

namespace {

std::string collapse_space(std::string_view s) {
  std::string out;
  bool space = false;
  for (const char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = true;
      continue;
    }
    if (space && !out.empty() && out.back() != '(' && out.back() != '[' && c != ')' && c != ']') out += ' ';
    space = false;
    out += c;
  }
  return out;
}

int child_of_kind(const SyntaxTree& tree, int id, std::string_view kind) {
  for (const int c : tree.node(id).children) {
    if (tree.node(c).kind == kind) return c;
  }
  return -1;
}

std::optional<std::string> docstring_of(const SyntaxTree& tree, int block) {
  if (block < 0 || tree.node(block).children.empty()) return std::nullopt;
  int first = tree.node(block).children.front();
  if (tree.node(first).kind == "statement_list") first = tree.node(first).children.front();
  if (tree.node(first).kind != "expression_stmt") return std::nullopt;
  const int expr = tree.node(first).children.front();
  std::string value;
  if (tree.node(expr).kind == "string") {
    value = decode_string_literal(tree.token_of(expr).text);
  } else if (tree.node(expr).kind == "concatenated_string") {
    for (const int part : tree.node(expr).children) value += decode_string_literal(tree.token_of(part).text);
  } else {
    return std::nullopt;
  }
  return clean_docstring(value);
}

// Unwraps decorated definitions.
int definition_of(const SyntaxTree& tree, int stmt) {
  const auto& n = tree.node(stmt);
  if (n.kind == "function_def" || n.kind == "class_def") return stmt;
  if (n.kind == "decorated_definition") return n.children.back();
  return -1;
}

ApiSymbol symbol_for(const SyntaxTree& tree, int def, const std::string& path, const std::string& parent) {
  ApiSymbol s;
  const auto& n = tree.node(def);
  const int name = child_of_kind(tree, def, "identifier");
  s.name = tree.token_of(name).text;
  s.line = tree.token_of(name).line;
  s.module_path = path;
  s.parent_class = parent;
  s.docstring = docstring_of(tree, child_of_kind(tree, def, "block"));
  if (n.kind == "class_def") {
    s.kind = SymbolKind::class_def;
    s.signature = s.name;
    if (const int args = child_of_kind(tree, def, "argument_list"); args >= 0) {
      s.signature += collapse_space(tree.text_of(args));
    }
  } else {
    s.kind = SymbolKind::function;
    s.signature = s.name + collapse_space(tree.text_of(child_of_kind(tree, def, "parameters")));
    for (std::size_t i = 0; i + 1 < n.children.size(); ++i) {
      if (tree.node(n.children[i]).kind == "->") {
        s.signature += " -> " + collapse_space(tree.text_of(n.children[i + 1]));
      }
    }
    if (tree.node(n.children.front()).kind == "async") s.signature = "async " + s.signature;
  }
  return s;
}

}  // namespace

ApiExtraction extract_api(const PackageTree& tree) {
  ApiExtraction out;
  for (const auto& [path, content] : tree) {
    if (!path.ends_with(".py")) continue;
    const SyntaxTree syntax = source::parse(content);
    if (syntax.has_errors()) {
      out.diagnostics.push_back(path + ": skipped, " + std::to_string(syntax.error_count()) + " syntax error(s)");
      continue;
    }
    for (const int stmt : syntax.node(syntax.root()).children) {
      const int def = definition_of(syntax, stmt);
      if (def < 0) continue;
      ApiSymbol sym = symbol_for(syntax, def, path, "");
      const bool is_class = sym.kind == SymbolKind::class_def;
      const std::string class_name = sym.name;
      out.symbols.push_back(std::move(sym));
      if (!is_class) continue;
      const int block = child_of_kind(syntax, def, "block");
      for (const int member : syntax.node(block).children) {
        const int inner = definition_of(syntax, member);
        if (inner >= 0 && syntax.node(inner).kind == "function_def") {
          out.symbols.push_back(symbol_for(syntax, inner, path, class_name));
        }
      }
    }
  }
  std::stable_sort(out.symbols.begin(), out.symbols.end(), [](const ApiSymbol& a, const ApiSymbol& b) {
    return std::tie(a.module_path, a.line) < std::tie(b.module_path, b.line);
  });
  return out;
}

std::vector<Relationship> extract_relationships(const PackageTree& tree) {
  std::vector<Relationship> out;
  for (const auto& e : source::scan_imports(tree).edges) out.push_back({e.from_module, e.to_module});
  return out;
}

namespace {

std::optional<std::string> string_value(const SyntaxTree& tree, int id) {
  const auto& n = tree.node(id);
  if (n.kind == "string") return decode_string_literal(tree.token_of(id).text);
  if (n.kind == "concatenated_string") {
    std::string v;
    for (const int part : n.children) v += decode_string_literal(tree.token_of(part).text);
    return v;
  }
  return std::nullopt;
}

}  // namespace

std::optional<SetupMetadata> read_setup_metadata(const PackageTree& tree) {
  const std::string* content = tree.find("setup.py");
  if (content == nullptr) return std::nullopt;
  const SyntaxTree syntax = source::parse(*content);
  if (syntax.has_errors()) return std::nullopt;
  for (std::size_t id = 0; id < syntax.node_count(); ++id) {
    const auto& n = syntax.node(static_cast<int>(id));
    if (n.kind != "call") continue;
    const int callee = n.children.front();
    std::string name;
    if (syntax.node(callee).kind == "identifier") name = syntax.token_of(callee).text;
    if (syntax.node(callee).kind == "attribute") name = syntax.token_of(syntax.node(callee).children.back()).text;
    if (name != "setup") continue;
    SetupMetadata meta;
    for (const int arg : syntax.node(n.children.back()).children) {
      const auto& a = syntax.node(arg);
      if (a.kind != "keyword_argument") continue;
      const std::string key = syntax.token_of(a.children.front()).text;
      const int value = a.children.back();
      if (key == "description") meta.description = string_value(syntax, value);
      if (key == "keywords") {
        const auto& kind = syntax.node(value).kind;
        if (kind == "list" || kind == "tuple") {
          for (const int item : syntax.node(value).children) {
            if (auto s = string_value(syntax, item)) meta.keywords.push_back(std::move(*s));
          }
        } else if (auto s = string_value(syntax, value)) {
          // setuptools also accepts a comma or space separated string.
          std::string word;
          for (const char c : *s + ",") {
            if (c == ',') {
              if (auto t = text::trim(word); !t.empty()) meta.keywords.emplace_back(t);
              word.clear();
            } else {
              word += c;
            }
          }
        }
      }
    }
    return meta;
  }
  return std::nullopt;
}

}  // namespace forge::documenter
