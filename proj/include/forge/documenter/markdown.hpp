#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/common/package_tree.hpp"

namespace forge::documenter {

enum class LintRule { unbalanced_fence, heading_jump, broken_relative_link, trailing_whitespace };

std::string_view to_string(LintRule rule);

struct LintFinding {
  LintRule rule = LintRule::trailing_whitespace;
  int line = 1;
  std::string detail;

  bool operator==(const LintFinding&) const = default;
};

/// Line-by-line fenced-code tracking shared by the validator and the
/// sanitizer. A fence opens with 3+ backticks or tildes (indent up to three
/// spaces) and closes with a bare run of the same character at least as long.
class FenceTracker {
 public:
  enum class Role { text, open, code, close };

  Role feed(std::string_view line);
  bool inside() const noexcept { return open_; }
  int open_line() const noexcept { return open_line_; }

 private:
  bool open_ = false;
  char fence_char_ = '`';
  std::size_t fence_len_ = 0;
  int line_ = 0;
  int open_line_ = 0;
};

/// ATX heading level (1-6) of a line, if it is one.
std::optional<int> heading_level(std::string_view line);

/// Reports unbalanced fences (at the unmatched opener), heading jumps of two
/// or more levels between consecutive headings, relative links whose target
/// is not in the tree (only when a tree is given) and trailing whitespace.
std::vector<LintFinding> validate_markdown(std::string_view doc, const PackageTree* tree = nullptr);

/// Makes model-written Markdown safe to embed under a level-2 section:
/// headings become level 3, trailing whitespace outside code is dropped and
/// an unclosed fence is closed.
std::string sanitize_embedded_markdown(std::string_view md);

}  // namespace forge::documenter
