#include <set>

#include "forge/common/text.hpp"
#include "forge/source/metrics.hpp"
#include "forge/source/tokens.hpp"

namespace forge::source {

CodeMetrics code_metrics(std::string_view source) {
  CodeMetrics m;
  for (const auto& line : text::split_lines(source)) {
    if (!text::trim(line).empty()) ++m.line_count;
  }

  const TokenStream stream = tokenize(source);
  std::set<int> comment_lines;
  const auto lines = text::split_lines(source);
  for (const Token& t : stream.tokens) {
    if (t.kind == TokenKind::keyword) {
      if (t.text == "if" || t.text == "elif" || t.text == "for" || t.text == "while" || t.text == "except" ||
          t.text == "and" || t.text == "or") {
        ++m.cyclomatic_complexity;
      }
      continue;
    }
    if (t.kind != TokenKind::comment) continue;
    const auto& line = lines.at(static_cast<std::size_t>(t.line - 1));
    const auto first = line.find_first_not_of(" \t\f");
    if (first == static_cast<std::size_t>(t.column)) comment_lines.insert(t.line);
  }
  if (m.line_count > 0) {
    m.comment_density = static_cast<double>(comment_lines.size()) / static_cast<double>(m.line_count);
  }
  return m;
}

}  // namespace forge::source
