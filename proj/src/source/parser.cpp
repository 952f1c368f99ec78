#include <algorithm>
#include <functional>
#include <sstream>

#include "forge/source/syntax_tree.hpp"

namespace forge::source {

SyntaxTree::SyntaxTree(std::string source, TokenStream tokens, std::vector<SyntaxNode> nodes, int root)
    : source_(std::move(source)), tokens_(std::move(tokens)), nodes_(std::move(nodes)), root_(root) {
  error_count_ = static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const SyntaxNode& n) { return n.kind == "error"; }));
}

const Token& SyntaxTree::token_of(int leaf) const {
  return tokens_.tokens.at(static_cast<std::size_t>(node(leaf).token));
}

std::string_view SyntaxTree::text_of(int id) const {
  const auto& n = node(id);
  if (n.first_token >= n.last_token) return {};
  const Token& first = tokens_.tokens.at(n.first_token);
  const Token& last = tokens_.tokens.at(n.last_token - 1);
  const std::size_t end = last.offset + last.text.size();
  return std::string_view(source_).substr(first.offset, end - first.offset);
}

std::vector<int> SyntaxTree::leaves() const {
  std::vector<int> out;
  if (root_ < 0) return out;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const auto& n = node(id);
    if (n.is_leaf()) {
      out.push_back(id);
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::string SyntaxTree::dump() const {
  std::ostringstream out;
  if (root_ < 0) return {};
  std::vector<std::pair<int, int>> stack{{root_, 0}};
  while (!stack.empty()) {
    const auto [id, depth] = stack.back();
    stack.pop_back();
    const auto& n = node(id);
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << n.kind;
    if (n.is_leaf()) {
      const Token& t = token_of(id);
      out << " " << t.line << ":" << t.column << " '" << t.text << "'";
    }
    out << '\n';
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.emplace_back(*it, depth + 1);
  }
  return out.str();
}

namespace {

struct SyntaxFailure {
  std::size_t at;
};

constexpr int kMaxDepth = 200;

class Parser {
 public:
  explicit Parser(const TokenStream& stream) : toks_(stream.tokens) {
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      if (toks_[i].kind != TokenKind::comment) idx_.push_back(i);
    }
  }

  std::pair<std::vector<SyntaxNode>, int> run() {
    std::vector<int> body;
    while (!at(TokenKind::end_marker)) {
      if (at(TokenKind::dedent) || at(TokenKind::newline)) {
        ++pos_;
        continue;
      }
      if (const int s = statement_with_recovery(); s >= 0) body.push_back(s);
    }
    const int root = make("module", body);
    if (body.empty()) {
      nodes_[static_cast<std::size_t>(root)].first_token = 0;
      nodes_[static_cast<std::size_t>(root)].last_token = 0;
    }
    return {std::move(nodes_), root};
  }

 private:
  // ---- token access -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    const std::size_t p = std::min(pos_ + k, idx_.size() - 1);
    return toks_[idx_[p]];
  }
  bool at(TokenKind kind, std::size_t k = 0) const { return peek(k).kind == kind; }
  bool at_text(std::string_view text, std::size_t k = 0) const {
    const Token& t = peek(k);
    return (t.kind == TokenKind::keyword || t.kind == TokenKind::op || t.kind == TokenKind::punctuation) &&
           t.text == text;
  }
  bool at_name(std::size_t k = 0) const { return at(TokenKind::identifier, k); }

  [[noreturn]] void fail() const { throw SyntaxFailure{pos_}; }

  int leaf() {
    const Token& t = peek();
    if (t.is_trivia()) fail();
    SyntaxNode n;
    switch (t.kind) {
      case TokenKind::identifier: n.kind = "identifier"; break;
      case TokenKind::number: n.kind = "number"; break;
      case TokenKind::string: n.kind = "string"; break;
      default: n.kind = t.text; break;
    }
    n.token = static_cast<int>(idx_[pos_]);
    n.first_token = idx_[pos_];
    n.last_token = idx_[pos_] + 1;
    ++pos_;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size() - 1);
  }

  int expect(std::string_view text) {
    if (!at_text(text)) fail();
    return leaf();
  }
  int expect_name() {
    if (!at_name()) fail();
    return leaf();
  }
  void expect_layout(TokenKind kind) {
    if (!at(kind)) fail();
    ++pos_;
  }

  int make(std::string kind, std::vector<int> children) {
    SyntaxNode n;
    n.kind = std::move(kind);
    std::size_t first = idx_[std::min(pos_, idx_.size() - 1)];
    std::size_t last = first;
    bool any = false;
    for (const int c : children) {
      const auto& child = nodes_[static_cast<std::size_t>(c)];
      if (child.first_token >= child.last_token) continue;
      if (!any) {
        first = child.first_token;
        last = child.last_token;
        any = true;
      } else {
        first = std::min(first, child.first_token);
        last = std::max(last, child.last_token);
      }
    }
    n.first_token = first;
    n.last_token = any ? last : first;
    n.children = std::move(children);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size() - 1);
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxDepth) {
        --parser.depth_;
        parser.fail();
      }
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  // ---- statements ---------------------------------------------------------

  int statement_with_recovery() {
    const std::size_t start = pos_;
    const std::size_t saved = nodes_.size();
    const int saved_depth = depth_;
    try {
      return statement();
    } catch (const SyntaxFailure&) {
      depth_ = saved_depth;
      nodes_.resize(saved);
      pos_ = start;
      return recover();
    }
  }

  int recover() {
    std::vector<int> children;
    if (at(TokenKind::indent)) {
      ++pos_;
      if (depth_ >= kMaxDepth) {
        int level = 1;
        while (level > 0 && !at(TokenKind::end_marker)) {
          if (at(TokenKind::indent)) {
            ++level;
            ++pos_;
          } else if (at(TokenKind::dedent)) {
            --level;
            ++pos_;
          } else if (at(TokenKind::newline)) {
            ++pos_;
          } else {
            children.push_back(leaf());
          }
        }
      } else {
        ++depth_;
        while (!at(TokenKind::dedent) && !at(TokenKind::end_marker)) {
          if (at(TokenKind::newline)) {
            ++pos_;
            continue;
          }
          if (const int s = statement_with_recovery(); s >= 0) children.push_back(s);
        }
        --depth_;
        if (at(TokenKind::dedent)) ++pos_;
      }
      return make("error", children);
    }
    while (!at(TokenKind::newline) && !at(TokenKind::end_marker) && !at(TokenKind::dedent) &&
           !at(TokenKind::indent)) {
      children.push_back(leaf());
    }
    if (at(TokenKind::newline)) ++pos_;
    return make("error", children);
  }

  int statement() {
    DepthGuard guard(*this);
    if (at(TokenKind::indent)) fail();
    const Token& t = peek();
    if (t.kind == TokenKind::keyword) {
      if (t.text == "def") return function_def({});
      if (t.text == "class") return class_def({});
      if (t.text == "if") return if_stmt();
      if (t.text == "for") return for_stmt({});
      if (t.text == "while") return while_stmt();
      if (t.text == "with") return with_stmt({});
      if (t.text == "try") return try_stmt();
      if (t.text == "async") {
        const int async_leaf = leaf();
        if (at_text("def")) return function_def({async_leaf});
        if (at_text("for")) return for_stmt({async_leaf});
        if (at_text("with")) return with_stmt({async_leaf});
        fail();
      }
    }
    if (at_text("@")) return decorated();
    return simple_statements();
  }

  int simple_statements() {
    std::vector<int> items{simple_statement()};
    while (at_text(";")) {
      items.push_back(leaf());
      if (at(TokenKind::newline) || at(TokenKind::end_marker)) break;
      items.push_back(simple_statement());
    }
    if (at(TokenKind::newline)) {
      ++pos_;
    } else if (!at(TokenKind::end_marker)) {
      fail();
    }
    if (items.size() == 1) return items.front();
    return make("statement_list", items);
  }

  int simple_statement() {
    const Token& t = peek();
    if (t.kind == TokenKind::keyword) {
      if (t.text == "pass") return make("pass_stmt", {leaf()});
      if (t.text == "break") return make("break_stmt", {leaf()});
      if (t.text == "continue") return make("continue_stmt", {leaf()});
      if (t.text == "return") {
        std::vector<int> c{leaf()};
        if (!at_statement_end()) c.push_back(star_expressions());
        return make("return_stmt", c);
      }
      if (t.text == "raise") {
        std::vector<int> c{leaf()};
        if (!at_statement_end()) {
          c.push_back(expression());
          if (at_text("from")) {
            c.push_back(leaf());
            c.push_back(expression());
          }
        }
        return make("raise_stmt", c);
      }
      if (t.text == "global" || t.text == "nonlocal") {
        const std::string kind = t.text + "_stmt";
        std::vector<int> c{leaf(), expect_name()};
        while (at_text(",")) {
          c.push_back(leaf());
          c.push_back(expect_name());
        }
        return make(kind, c);
      }
      if (t.text == "del") {
        std::vector<int> c{leaf(), target_list()};
        return make("delete_stmt", c);
      }
      if (t.text == "assert") {
        std::vector<int> c{leaf(), expression()};
        if (at_text(",")) {
          c.push_back(leaf());
          c.push_back(expression());
        }
        return make("assert_stmt", c);
      }
      if (t.text == "import") return import_stmt();
      if (t.text == "from") return import_from();
    }
    return expression_statement();
  }

  bool at_statement_end() const {
    return at(TokenKind::newline) || at(TokenKind::end_marker) || at_text(";");
  }

  int dotted_name() {
    std::vector<int> c{expect_name()};
    while (at_text(".")) {
      c.push_back(leaf());
      c.push_back(expect_name());
    }
    return make("dotted_name", c);
  }

  int import_stmt() {
    std::vector<int> c{leaf()};
    for (;;) {
      int name = dotted_name();
      if (at_text("as")) {
        const int as_leaf = leaf();
        name = make("aliased_import", {name, as_leaf, expect_name()});
      }
      c.push_back(name);
      if (!at_text(",")) break;
      c.push_back(leaf());
    }
    return make("import_stmt", c);
  }

  int import_from() {
    std::vector<int> c{leaf()};
    bool any_dots = false;
    while (at_text(".") || at_text("...")) {
      c.push_back(leaf());
      any_dots = true;
    }
    if (at_name()) {
      c.push_back(dotted_name());
    } else if (!any_dots) {
      fail();
    }
    c.push_back(expect("import"));
    if (at_text("*")) {
      c.push_back(leaf());
      return make("import_from", c);
    }
    const bool paren = at_text("(");
    if (paren) c.push_back(leaf());
    for (;;) {
      int name = make("dotted_name", {expect_name()});
      if (at_text("as")) {
        const int as_leaf = leaf();
        name = make("aliased_import", {name, as_leaf, expect_name()});
      }
      c.push_back(name);
      if (!at_text(",")) break;
      c.push_back(leaf());
      if (paren && at_text(")")) break;
    }
    if (paren) c.push_back(expect(")"));
    return make("import_from", c);
  }

  static bool is_augmented(std::string_view text) {
    static const char* ops[] = {"+=", "-=", "*=", "/=", "//=", "%=", "**=", ">>=", "<<=", "&=", "|=", "^=", "@="};
    return std::any_of(std::begin(ops), std::end(ops), [&](const char* op) { return text == op; });
  }

  int expression_statement() {
    const int first = at_text("yield") ? yield_expr() : star_expressions();
    if (at_text("=")) {
      std::vector<int> c{first};
      while (at_text("=")) {
        c.push_back(leaf());
        c.push_back(at_text("yield") ? yield_expr() : star_expressions());
      }
      return make("assignment", c);
    }
    if (peek().kind == TokenKind::op && is_augmented(peek().text)) {
      const int op = leaf();
      const int rhs = at_text("yield") ? yield_expr() : star_expressions();
      return make("augmented_assignment", {first, op, rhs});
    }
    if (at_text(":")) {
      std::vector<int> c{first, leaf(), expression()};
      if (at_text("=")) {
        c.push_back(leaf());
        c.push_back(at_text("yield") ? yield_expr() : star_expressions());
      }
      return make("annotated_assignment", c);
    }
    return make("expression_stmt", {first});
  }

  // ---- compound statements -----------------------------------------------

  int block() {
    std::vector<int> body;
    if (at(TokenKind::newline)) {
      ++pos_;
      expect_layout(TokenKind::indent);
      while (!at(TokenKind::dedent) && !at(TokenKind::end_marker)) {
        if (at(TokenKind::newline)) {
          ++pos_;
          continue;
        }
        if (const int s = statement_with_recovery(); s >= 0) body.push_back(s);
      }
      if (at(TokenKind::dedent)) ++pos_;
      if (body.empty()) fail();
    } else {
      body.push_back(simple_statements());
    }
    return make("block", body);
  }

  int function_def(std::vector<int> prefix) {
    std::vector<int> c = std::move(prefix);
    c.push_back(expect("def"));
    c.push_back(expect_name());
    c.push_back(parameters());
    if (at_text("->")) {
      c.push_back(leaf());
      c.push_back(expression());
    }
    c.push_back(expect(":"));
    c.push_back(block());
    return make("function_def", c);
  }

  int parameters() {
    std::vector<int> c{expect("(")};
    while (!at_text(")")) {
      c.push_back(parameter(true));
      if (!at_text(",")) break;
      c.push_back(leaf());
    }
    c.push_back(expect(")"));
    return make("parameters", c);
  }

  int parameter(bool annotated) {
    std::vector<int> c;
    if (at_text("/")) return make("parameter", {leaf()});
    if (at_text("*") || at_text("**")) {
      const bool double_star = at_text("**");
      c.push_back(leaf());
      if (!at_name()) {
        if (double_star) fail();
        return make("parameter", c);
      }
    }
    c.push_back(expect_name());
    if (annotated && at_text(":")) {
      c.push_back(leaf());
      c.push_back(expression());
    }
    if (at_text("=")) {
      c.push_back(leaf());
      c.push_back(expression());
    }
    return make("parameter", c);
  }

  int class_def(std::vector<int> prefix) {
    std::vector<int> c = std::move(prefix);
    c.push_back(expect("class"));
    c.push_back(expect_name());
    if (at_text("(")) c.push_back(argument_list());
    c.push_back(expect(":"));
    c.push_back(block());
    return make("class_def", c);
  }

  int decorated() {
    std::vector<int> c;
    while (at_text("@")) {
      const int at_leaf = leaf();
      const int expr = named_expression();
      c.push_back(make("decorator", {at_leaf, expr}));
      expect_layout(TokenKind::newline);
    }
    if (at_text("def")) {
      c.push_back(function_def({}));
    } else if (at_text("class")) {
      c.push_back(class_def({}));
    } else if (at_text("async") && at_text("def", 1)) {
      const int async_leaf = leaf();
      c.push_back(function_def({async_leaf}));
    } else {
      fail();
    }
    return make("decorated_definition", c);
  }

  int if_stmt() {
    std::vector<int> c{leaf(), named_expression(), expect(":"), block()};
    while (at_text("elif")) {
      std::vector<int> e{leaf(), named_expression(), expect(":"), block()};
      c.push_back(make("elif_clause", e));
    }
    if (at_text("else")) c.push_back(else_clause());
    return make("if_stmt", c);
  }

  int else_clause() {
    std::vector<int> e{leaf(), expect(":"), block()};
    return make("else_clause", e);
  }

  int while_stmt() {
    std::vector<int> c{leaf(), named_expression(), expect(":"), block()};
    if (at_text("else")) c.push_back(else_clause());
    return make("while_stmt", c);
  }

  int for_stmt(std::vector<int> prefix) {
    std::vector<int> c = std::move(prefix);
    c.push_back(expect("for"));
    c.push_back(target_list());
    c.push_back(expect("in"));
    c.push_back(star_expressions());
    c.push_back(expect(":"));
    c.push_back(block());
    if (at_text("else")) c.push_back(else_clause());
    return make("for_stmt", c);
  }

  int with_stmt(std::vector<int> prefix) {
    std::vector<int> c = std::move(prefix);
    c.push_back(expect("with"));
    for (;;) {
      std::vector<int> item{expression()};
      if (at_text("as")) {
        item.push_back(leaf());
        item.push_back(target());
      }
      c.push_back(make("with_item", item));
      if (!at_text(",")) break;
      c.push_back(leaf());
    }
    c.push_back(expect(":"));
    c.push_back(block());
    return make("with_stmt", c);
  }

  int try_stmt() {
    std::vector<int> c{leaf(), expect(":"), block()};
    bool handlers = false;
    while (at_text("except")) {
      std::vector<int> e{leaf()};
      if (at_text("*")) e.push_back(leaf());
      if (!at_text(":")) {
        e.push_back(expression());
        if (at_text("as")) {
          e.push_back(leaf());
          e.push_back(expect_name());
        }
      }
      e.push_back(expect(":"));
      e.push_back(block());
      c.push_back(make("except_clause", e));
      handlers = true;
    }
    if (handlers && at_text("else")) c.push_back(else_clause());
    bool final_clause = false;
    if (at_text("finally")) {
      std::vector<int> f{leaf(), expect(":"), block()};
      c.push_back(make("finally_clause", f));
      final_clause = true;
    }
    if (!handlers && !final_clause) fail();
    return make("try_stmt", c);
  }

  // ---- targets ------------------------------------------------------------

  int target() {
    if (at_text("*")) {
      const int star = leaf();
      return make("starred", {star, bitor_expr()});
    }
    return bitor_expr();
  }

  int target_list() {
    const int first = target();
    if (!at_text(",")) return first;
    std::vector<int> c{first};
    while (at_text(",")) {
      c.push_back(leaf());
      if (at_text("in") || at_text("=") || at_statement_end() || at_text(")")) break;
      c.push_back(target());
    }
    return make("pattern_list", c);
  }

  // ---- expressions --------------------------------------------------------

  bool starts_expression() const {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::identifier:
      case TokenKind::number:
      case TokenKind::string:
        return true;
      case TokenKind::keyword:
        return t.text == "not" || t.text == "lambda" || t.text == "await" || t.text == "None" ||
               t.text == "True" || t.text == "False" || t.text == "yield";
      case TokenKind::op:
        return t.text == "-" || t.text == "+" || t.text == "~" || t.text == "*" || t.text == "**";
      case TokenKind::punctuation:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "...";
      default:
        return false;
    }
  }

  int star_expression() {
    if (at_text("*")) {
      const int star = leaf();
      return make("starred", {star, bitor_expr()});
    }
    return expression();
  }

  int star_expressions() {
    const int first = star_expression();
    if (!at_text(",")) return first;
    std::vector<int> c{first};
    while (at_text(",")) {
      c.push_back(leaf());
      if (!starts_expression() || at_text("yield")) break;
      c.push_back(star_expression());
    }
    return make("expression_list", c);
  }

  int yield_expr() {
    std::vector<int> c{expect("yield")};
    if (at_text("from")) {
      c.push_back(leaf());
      c.push_back(expression());
    } else if (starts_expression()) {
      c.push_back(star_expressions());
    }
    return make("yield_expr", c);
  }

  int named_expression() {
    if (at_name() && at_text(":=", 1)) {
      std::vector<int> c{leaf(), leaf(), expression()};
      return make("named_expr", c);
    }
    return expression();
  }

  int expression() {
    DepthGuard guard(*this);
    if (at_text("lambda")) return lambda_expr();
    const int body = or_test();
    if (!at_text("if")) return body;
    std::vector<int> c{body, leaf(), or_test(), expect("else"), expression()};
    return make("conditional_expr", c);
  }

  int lambda_expr() {
    std::vector<int> c{leaf()};
    if (!at_text(":")) {
      std::vector<int> params;
      while (!at_text(":")) {
        params.push_back(parameter(false));
        if (!at_text(",")) break;
        params.push_back(leaf());
      }
      c.push_back(make("lambda_parameters", params));
    }
    c.push_back(expect(":"));
    c.push_back(expression());
    return make("lambda", c);
  }

  int or_test() {
    int left = and_test();
    while (at_text("or")) {
      const int op = leaf();
      left = make("boolean_op", {left, op, and_test()});
    }
    return left;
  }

  int and_test() {
    int left = not_test();
    while (at_text("and")) {
      const int op = leaf();
      left = make("boolean_op", {left, op, not_test()});
    }
    return left;
  }

  int not_test() {
    if (at_text("not")) {
      DepthGuard guard(*this);
      const int op = leaf();
      return make("not_op", {op, not_test()});
    }
    return comparison();
  }

  bool at_comparison_op() const {
    const Token& t = peek();
    if (t.kind == TokenKind::op) {
      return t.text == "<" || t.text == ">" || t.text == "==" || t.text == ">=" || t.text == "<=" ||
             t.text == "!=";
    }
    if (t.kind == TokenKind::keyword) {
      return t.text == "in" || t.text == "is" || (t.text == "not" && at_text("in", 1));
    }
    return false;
  }

  int comparison() {
    const int first = bitor_expr();
    if (!at_comparison_op()) return first;
    std::vector<int> c{first};
    while (at_comparison_op()) {
      if (at_text("not")) {
        c.push_back(leaf());
        c.push_back(leaf());
      } else if (at_text("is")) {
        c.push_back(leaf());
        if (at_text("not")) c.push_back(leaf());
      } else {
        c.push_back(leaf());
      }
      c.push_back(bitor_expr());
    }
    return make("comparison", c);
  }

  int binary_level(const std::function<int()>& next, std::initializer_list<std::string_view> ops) {
    int left = next();
    for (;;) {
      const Token& t = peek();
      if (t.kind != TokenKind::op) return left;
      if (std::find(ops.begin(), ops.end(), std::string_view(t.text)) == ops.end()) return left;
      const int op = leaf();
      left = make("binary_op", {left, op, next()});
    }
  }

  int bitor_expr() { return binary_level([this] { return bitxor_expr(); }, {"|"}); }
  int bitxor_expr() { return binary_level([this] { return bitand_expr(); }, {"^"}); }
  int bitand_expr() { return binary_level([this] { return shift_expr(); }, {"&"}); }
  int shift_expr() { return binary_level([this] { return arith_expr(); }, {"<<", ">>"}); }
  int arith_expr() { return binary_level([this] { return term(); }, {"+", "-"}); }
  int term() { return binary_level([this] { return factor(); }, {"*", "/", "//", "%", "@"}); }

  int factor() {
    if (at_text("+") || at_text("-") || at_text("~")) {
      DepthGuard guard(*this);
      const int op = leaf();
      return make("unary_op", {op, factor()});
    }
    return power();
  }

  int power() {
    int base;
    if (at_text("await")) {
      const int aw = leaf();
      base = make("await_expr", {aw, primary()});
    } else {
      base = primary();
    }
    if (!at_text("**")) return base;
    const int op = leaf();
    return make("binary_op", {base, op, factor()});
  }

  int primary() {
    int node = atom();
    for (;;) {
      if (at_text("(")) {
        node = make("call", {node, argument_list()});
      } else if (at_text("[")) {
        std::vector<int> c{node, leaf(), subscript_items(), expect("]")};
        node = make("subscript", c);
      } else if (at_text(".")) {
        std::vector<int> c{node, leaf(), expect_name()};
        node = make("attribute", c);
      } else {
        return node;
      }
    }
  }

  int subscript_items() {
    const int first = subscript_item();
    if (!at_text(",")) return first;
    std::vector<int> c{first};
    while (at_text(",")) {
      c.push_back(leaf());
      if (at_text("]")) break;
      c.push_back(subscript_item());
    }
    return make("expression_list", c);
  }

  int subscript_item() {
    if (at_text("*")) return star_expression();
    std::vector<int> c;
    if (!at_text(":")) {
      const int e = named_expression();
      if (!at_text(":")) return e;
      c.push_back(e);
    }
    c.push_back(leaf());
    if (!at_text(":") && !at_text("]") && !at_text(",")) c.push_back(expression());
    if (at_text(":")) {
      c.push_back(leaf());
      if (!at_text("]") && !at_text(",")) c.push_back(expression());
    }
    return make("slice", c);
  }

  int argument_list() {
    std::vector<int> c{expect("(")};
    while (!at_text(")")) {
      if (at_text("*") || at_text("**")) {
        const int star = leaf();
        c.push_back(make(peek_was_double(star) ? "dictionary_splat" : "list_splat", {star, expression()}));
      } else if (at_name() && at_text("=", 1)) {
        std::vector<int> kw{leaf(), leaf(), expression()};
        c.push_back(make("keyword_argument", kw));
      } else {
        const int e = named_expression();
        if (at_text("for") || (at_text("async") && at_text("for", 1))) {
          std::vector<int> g{e};
          comprehension_clauses(g);
          c.push_back(make("generator_exp", g));
        } else {
          c.push_back(e);
        }
      }
      if (!at_text(",")) break;
      c.push_back(leaf());
    }
    c.push_back(expect(")"));
    return make("argument_list", c);
  }

  bool peek_was_double(int star_leaf) const { return nodes_[static_cast<std::size_t>(star_leaf)].kind == "**"; }

  void comprehension_clauses(std::vector<int>& out) {
    while (at_text("for") || (at_text("async") && at_text("for", 1))) {
      std::vector<int> f;
      if (at_text("async")) f.push_back(leaf());
      f.push_back(expect("for"));
      f.push_back(target_list());
      f.push_back(expect("in"));
      f.push_back(or_test());
      out.push_back(make("comprehension_for", f));
      while (at_text("if")) {
        std::vector<int> cond{leaf(), or_test()};
        out.push_back(make("comprehension_if", cond));
      }
    }
  }

  int atom() {
    DepthGuard guard(*this);
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::identifier:
      case TokenKind::number:
        return leaf();
      case TokenKind::string: {
        const int first = leaf();
        if (!at(TokenKind::string)) return first;
        std::vector<int> c{first};
        while (at(TokenKind::string)) c.push_back(leaf());
        return make("concatenated_string", c);
      }
      case TokenKind::keyword:
        if (t.text == "None" || t.text == "True" || t.text == "False") return leaf();
        fail();
      case TokenKind::punctuation:
        if (t.text == "...") return leaf();
        if (t.text == "(") return paren_atom();
        if (t.text == "[") return list_atom();
        if (t.text == "{") return brace_atom();
        fail();
      default:
        fail();
    }
  }

  int paren_atom() {
    std::vector<int> c{leaf()};
    if (at_text(")")) {
      c.push_back(leaf());
      return make("tuple", c);
    }
    if (at_text("yield")) {
      c.push_back(yield_expr());
      c.push_back(expect(")"));
      return make("parenthesized_expr", c);
    }
    const int first = at_text("*") ? star_expression() : named_expression();
    c.push_back(first);
    if (at_text("for") || (at_text("async") && at_text("for", 1))) {
      comprehension_clauses(c);
      c.push_back(expect(")"));
      return make("generator_exp", c);
    }
    if (at_text(")")) {
      c.push_back(leaf());
      return make("parenthesized_expr", c);
    }
    while (at_text(",")) {
      c.push_back(leaf());
      if (at_text(")")) break;
      c.push_back(at_text("*") ? star_expression() : named_expression());
    }
    c.push_back(expect(")"));
    return make("tuple", c);
  }

  int list_atom() {
    std::vector<int> c{leaf()};
    if (at_text("]")) {
      c.push_back(leaf());
      return make("list", c);
    }
    c.push_back(at_text("*") ? star_expression() : named_expression());
    if (at_text("for") || (at_text("async") && at_text("for", 1))) {
      comprehension_clauses(c);
      c.push_back(expect("]"));
      return make("list_comprehension", c);
    }
    while (at_text(",")) {
      c.push_back(leaf());
      if (at_text("]")) break;
      c.push_back(at_text("*") ? star_expression() : named_expression());
    }
    c.push_back(expect("]"));
    return make("list", c);
  }

  int dict_item() {
    if (at_text("**")) {
      const int star = leaf();
      return make("dictionary_splat", {star, bitor_expr()});
    }
    std::vector<int> p{expression(), expect(":"), expression()};
    return make("pair", p);
  }

  int brace_atom() {
    std::vector<int> c{leaf()};
    if (at_text("}")) {
      c.push_back(leaf());
      return make("dictionary", c);
    }
    bool is_dict = at_text("**");
    int first;
    if (is_dict) {
      first = dict_item();
    } else {
      const int key = at_text("*") ? star_expression() : named_expression();
      if (at_text(":")) {
        is_dict = true;
        const int colon = leaf();
        first = make("pair", {key, colon, expression()});
      } else {
        first = key;
      }
    }
    c.push_back(first);
    if (at_text("for") || (at_text("async") && at_text("for", 1))) {
      comprehension_clauses(c);
      c.push_back(expect("}"));
      return make(is_dict ? "dictionary_comprehension" : "set_comprehension", c);
    }
    while (at_text(",")) {
      c.push_back(leaf());
      if (at_text("}")) break;
      if (is_dict) {
        c.push_back(dict_item());
      } else {
        c.push_back(at_text("*") ? star_expression() : named_expression());
      }
    }
    c.push_back(expect("}"));
    return make(is_dict ? "dictionary" : "set", c);
  }

  const std::vector<Token>& toks_;
  std::vector<std::size_t> idx_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<SyntaxNode> nodes_;
};

}  // namespace

SyntaxTree parse(std::string_view source) {
  TokenStream stream = tokenize(source);
  auto [nodes, root] = Parser(stream).run();
  return SyntaxTree(std::string(source), std::move(stream), std::move(nodes), root);
}

}  // namespace forge::source
