#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace forge::text {

/// Splits on '\n'. A trailing newline terminates the last line rather than
/// starting an empty one, so "a\nb\n" and "a\nb" both give {"a", "b"}.
std::vector<std::string_view> split_lines(std::string_view text);

std::string_view trim(std::string_view s);
std::string_view trim_right(std::string_view s);
std::string to_lower(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// A closed Markdown code fence.
struct FencedBlock {
  std::string info;
  std::string body;
  std::size_t open_line = 0;  // 1-based
};

/// Fences open with three or more backticks or tildes (up to three spaces of
/// indent) and close with a run of the same character at least as long.
/// Unclosed fences are not returned.
std::vector<FencedBlock> fenced_blocks(std::string_view markdown);

bool has_fenced_block(std::string_view markdown);

/// Fence string long enough to wrap body verbatim.
std::string fence_for(std::string_view body);

}  // namespace forge::text
