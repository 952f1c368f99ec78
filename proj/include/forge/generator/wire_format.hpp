#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/common/package_tree.hpp"

namespace forge::generator {

enum class ParseEventKind {
  file_opened,
  file_closed,
  duplicate_path_overwritten,
  unterminated_fence_flushed,
  stray_line_skipped,
};

std::string_view to_string(ParseEventKind kind);

struct ParseEvent {
  ParseEventKind kind = ParseEventKind::stray_line_skipped;
  std::optional<std::string> path;
  int line_number = 1;

  bool operator==(const ParseEvent&) const = default;
};

struct ParsedContent {
  PackageTree tree;
  std::vector<ParseEvent> events;
};

/// Reads "### FILE: <path>" headers, each followed by a fenced body, into a
/// tree. Total: every anomaly becomes an event. Input that is not valid
/// UTF-8 is repaired first. A body line starting with three backticks always
/// closes the file, so such lines cannot appear inside a file.
ParsedContent parse_content(std::string_view response);

/// Inverse of parse_content for trees whose lines never start with "```".
std::string render_tree(const PackageTree& tree);

}  // namespace forge::generator
