#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace forge::source {

enum class TokenKind {
  keyword,
  identifier,
  number,
  string,
  op,  // operator
  punctuation,
  comment,
  newline,
  indent,
  dedent,
  end_marker,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::end_marker;
  std::string text;
  int line = 1;             // 1-based
  int column = 0;           // 0-based byte column
  std::size_t offset = 0;   // byte offset into the source
  bool synthetic = false;   // not present in the source text

  /// Comments, layout tokens and the end marker.
  bool is_trivia() const {
    return kind == TokenKind::comment || kind == TokenKind::newline || kind == TokenKind::indent ||
           kind == TokenKind::dedent || kind == TokenKind::end_marker;
  }
};

struct LexDiagnostic {
  int line = 1;
  int column = 0;
  std::string message;
};

struct TokenStream {
  std::vector<Token> tokens;
  std::vector<LexDiagnostic> diagnostics;

  /// Tokens that carry program content (no comments or layout).
  std::vector<const Token*> significant() const;
};

bool is_python_keyword(std::string_view word);

/// Total tokenizer for Python source. Never throws; stray characters become
/// single-character operator tokens with a diagnostic. The stream always
/// ends with a synthetic end_marker.
TokenStream tokenize(std::string_view source);

}  // namespace forge::source
