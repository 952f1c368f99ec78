#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>

#include "forge/source/tokens.hpp"

namespace forge::source {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::number: return "number";
    case TokenKind::string: return "string";
    case TokenKind::op: return "operator";
    case TokenKind::punctuation: return "punctuation";
    case TokenKind::comment: return "comment";
    case TokenKind::newline: return "newline";
    case TokenKind::indent: return "indent";
    case TokenKind::dedent: return "dedent";
    case TokenKind::end_marker: return "end_marker";
  }
  return "end_marker";
}

std::vector<const Token*> TokenStream::significant() const {
  std::vector<const Token*> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!t.is_trivia()) out.push_back(&t);
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",      "while",  "with",   "yield"};

// Longest first so maximal munch picks "**=" over "**".
constexpr std::array<std::string_view, 46> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=", ">=", "==", "!=", "+=",
    "-=",  "*=",  "/=",  "%=",  "&=",  "|=", "^=", "@=", "+",  "-",  "*",  "/",  "%",  "@",  "&",  "|",
    "^",   "~",   "<",   ">",   "=",   "(",  ")",  "[",  "]",  "{",  "}",  ",",  ":",  "."};

bool is_punctuation(std::string_view text) {
  return text == "(" || text == ")" || text == "[" || text == "]" || text == "{" || text == "}" ||
         text == "," || text == ":" || text == "." || text == ";" || text == "...";
}

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  TokenStream run() {
    indents_.push_back(0);
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (handle_line_start()) continue;
      }
      lex_one();
    }
    if (line_has_code_) emit_synthetic(TokenKind::newline);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit_synthetic(TokenKind::dedent);
    }
    emit_synthetic(TokenKind::end_marker);
    return std::move(out_);
  }

 private:
  // Measures indentation of a fresh line; returns true if the line was blank
  // or comment-only and has been consumed up to (not including) its comment.
  bool handle_line_start() {
    std::size_t p = pos_;
    int width = 0;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
      if (src_[p] == '\t') {
        width = (width / 8 + 1) * 8;
      } else if (src_[p] == ' ') {
        ++width;
      }
      ++p;
    }
    advance_to(p);
    at_line_start_ = false;
    if (p >= src_.size() || src_[p] == '\n' || src_[p] == '#' ||
        (src_[p] == '\r' && p + 1 < src_.size() && src_[p + 1] == '\n')) {
      return p < src_.size() && src_[p] != '#' ? (consume_newline(), true) : false;
    }
    if (width > indents_.back()) {
      indents_.push_back(width);
      emit_synthetic(TokenKind::indent);
    } else if (width < indents_.back()) {
      while (indents_.size() > 1 && width < indents_.back()) {
        indents_.pop_back();
        emit_synthetic(TokenKind::dedent);
      }
      if (width != indents_.back()) {
        diag("unindent does not match any outer indentation level");
        indents_.push_back(width);
        emit_synthetic(TokenKind::indent);
      }
    }
    return false;
  }

  void lex_one() {
    const char c = src_[pos_];
    if (c == '\n') {
      if (depth_ == 0 && line_has_code_) {
        emit(TokenKind::newline, pos_, 1);
        line_has_code_ = false;
      }
      consume_newline();
      return;
    }
    if (c == ' ' || c == '\t' || c == '\f' || c == '\r') {
      advance_to(pos_ + 1);
      return;
    }
    if (c == '\\' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
      advance_to(pos_ + 1);
      if (src_[pos_] == '\r') advance_to(pos_ + 1);
      if (pos_ < src_.size() && src_[pos_] == '\n') {
        ++line_;
        line_start_ = pos_ + 1;
        advance_to(pos_ + 1);
      }
      return;
    }
    if (c == '#') {
      std::size_t end = src_.find('\n', pos_);
      if (end == std::string_view::npos) end = src_.size();
      std::size_t stop = end;
      if (stop > pos_ && src_[stop - 1] == '\r') --stop;
      emit(TokenKind::comment, pos_, stop - pos_);
      advance_to(stop);
      return;
    }
    const auto uc = static_cast<unsigned char>(c);
    if (std::isdigit(uc) || (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_number();
      return;
    }
    if (ident_start(uc)) {
      std::size_t p = pos_;
      while (p < src_.size() && ident_char(static_cast<unsigned char>(src_[p]))) ++p;
      const std::string_view word = src_.substr(pos_, p - pos_);
      if (p < src_.size() && (src_[p] == '\'' || src_[p] == '"') && is_string_prefix(word)) {
        lex_string(p);
        return;
      }
      const bool kw = std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
      emit(kw ? TokenKind::keyword : TokenKind::identifier, pos_, p - pos_);
      mark_code();
      advance_to(p);
      return;
    }
    if (c == '\'' || c == '"') {
      lex_string(pos_);
      return;
    }
    if (c == ';') {
      emit(TokenKind::punctuation, pos_, 1);
      mark_code();
      advance_to(pos_ + 1);
      return;
    }
    for (const auto candidate : kOperators) {
      if (src_.substr(pos_, candidate.size()) == candidate) {
        if (candidate == "(" || candidate == "[" || candidate == "{") ++depth_;
        if ((candidate == ")" || candidate == "]" || candidate == "}") && depth_ > 0) --depth_;
        emit(is_punctuation(candidate) ? TokenKind::punctuation : TokenKind::op, pos_, candidate.size());
        mark_code();
        advance_to(pos_ + candidate.size());
        return;
      }
    }
    // Unlexable: take one whole UTF-8 sequence (or one byte) as an operator.
    std::size_t len = 1;
    if (uc >= 0x80) {
      while (pos_ + len < src_.size() && (static_cast<unsigned char>(src_[pos_ + len]) & 0xC0) == 0x80) ++len;
    }
    diag("unexpected character '" + std::string(src_.substr(pos_, len)) + "'");
    emit(TokenKind::op, pos_, len);
    mark_code();
    advance_to(pos_ + len);
  }

  static bool is_string_prefix(std::string_view word) {
    if (word.size() > 2) return false;
    std::string lower;
    for (const char ch : word) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return lower == "r" || lower == "b" || lower == "u" || lower == "f" || lower == "rb" || lower == "br" ||
           lower == "fr" || lower == "rf";
  }

  void lex_string(std::size_t quote_pos) {
    const char q = src_[quote_pos];
    const bool triple = src_.substr(quote_pos, 3) == std::string_view(std::string(3, q));
    std::size_t p = quote_pos + (triple ? 3 : 1);
    const std::size_t start_line_pos = pos_;
    bool closed = false;
    while (p < src_.size()) {
      const char ch = src_[p];
      if (ch == '\\' && p + 1 < src_.size()) {
        p += 2;
        continue;
      }
      if (!triple && ch == '\n') break;
      if (ch == q) {
        if (!triple) {
          ++p;
          closed = true;
          break;
        }
        if (src_.substr(p, 3) == std::string_view(std::string(3, q))) {
          p += 3;
          closed = true;
          break;
        }
      }
      ++p;
    }
    if (!closed) diag("unterminated string literal");
    emit(TokenKind::string, start_line_pos, p - start_line_pos);
    mark_code();
    // Keep line bookkeeping across multi-line strings.
    for (std::size_t k = start_line_pos; k < p; ++k) {
      if (src_[k] == '\n') {
        ++line_;
        line_start_ = k + 1;
      }
    }
    advance_to(p);
  }

  void lex_number() {
    std::size_t p = pos_;
    auto digit_run = [&](auto pred) {
      while (p < src_.size() && (pred(static_cast<unsigned char>(src_[p])) || src_[p] == '_')) ++p;
    };
    if (src_[p] == '0' && p + 1 < src_.size() && std::strchr("xXoObB", src_[p + 1]) != nullptr) {
      p += 2;
      digit_run([](unsigned char ch) { return std::isxdigit(ch) != 0; });
    } else {
      digit_run([](unsigned char ch) { return std::isdigit(ch) != 0; });
      if (p < src_.size() && src_[p] == '.') {
        ++p;
        digit_run([](unsigned char ch) { return std::isdigit(ch) != 0; });
      }
      if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
        std::size_t q = p + 1;
        if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
        if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
          p = q;
          digit_run([](unsigned char ch) { return std::isdigit(ch) != 0; });
        }
      }
      if (p < src_.size() && (src_[p] == 'j' || src_[p] == 'J')) ++p;
    }
    emit(TokenKind::number, pos_, p - pos_);
    mark_code();
    advance_to(p);
  }

  void consume_newline() {
    if (src_[pos_] == '\r') advance_to(pos_ + 1);
    if (pos_ < src_.size() && src_[pos_] == '\n') advance_to(pos_ + 1);
    ++line_;
    line_start_ = pos_;
    at_line_start_ = depth_ == 0;
  }

  void mark_code() { line_has_code_ = true; }

  void advance_to(std::size_t p) { pos_ = p; }

  void emit(TokenKind kind, std::size_t at, std::size_t len) {
    Token t;
    t.kind = kind;
    t.text = std::string(src_.substr(at, len));
    t.offset = at;
    t.line = line_;
    t.column = static_cast<int>(at - line_start_);
    out_.tokens.push_back(std::move(t));
  }

  void emit_synthetic(TokenKind kind) {
    Token t;
    t.kind = kind;
    t.offset = pos_;
    t.line = line_;
    t.column = static_cast<int>(pos_ - std::min(pos_, line_start_));
    t.synthetic = true;
    out_.tokens.push_back(std::move(t));
  }

  void diag(std::string message) {
    out_.diagnostics.push_back({line_, static_cast<int>(pos_ - std::min(pos_, line_start_)), std::move(message)});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_code_ = false;
  std::vector<int> indents_;
  TokenStream out_;
};

}  // namespace

bool is_python_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

TokenStream tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace forge::source
