#pragma once

#include <cstddef>
#include <string_view>

namespace forge::source {

struct CodeMetrics {
  std::size_t line_count = 0;       // non-blank lines
  double comment_density = 0.0;     // comment-only lines / non-blank lines
  std::size_t cyclomatic_complexity = 1;
};

/// Decision points are the keywords if, elif, for, while, except, and, or
/// (a conditional expression counts through its `if`).
CodeMetrics code_metrics(std::string_view source);

}  // namespace forge::source
