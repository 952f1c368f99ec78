#include "forge/common/text.hpp"

#include <algorithm>
#include <cctype>

namespace forge::text {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

namespace {
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }
}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  return trim_right(s);
}

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

namespace {

struct FenceMarker {
  char ch = 0;
  std::size_t length = 0;
  std::string_view info;
};

// Recognises a fence line: up to three spaces, then >= 3 backticks or tildes.
bool match_fence(std::string_view line, FenceMarker& out) {
  std::size_t indent = 0;
  while (indent < line.size() && indent < 4 && line[indent] == ' ') ++indent;
  if (indent > 3 || indent >= line.size()) return false;
  const char ch = line[indent];
  if (ch != '`' && ch != '~') return false;
  std::size_t run = indent;
  while (run < line.size() && line[run] == ch) ++run;
  if (run - indent < 3) return false;
  out.ch = ch;
  out.length = run - indent;
  out.info = trim(line.substr(run));
  return true;
}

}  // namespace

std::vector<FencedBlock> fenced_blocks(std::string_view markdown) {
  std::vector<FencedBlock> blocks;
  const auto lines = split_lines(markdown);
  bool open = false;
  FenceMarker opener;
  FencedBlock current;
  std::vector<std::string_view> body;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim_right(lines[i]);
    FenceMarker marker;
    if (!open) {
      if (match_fence(line, marker)) {
        open = true;
        opener = marker;
        current = FencedBlock{std::string(marker.info), {}, i + 1};
        body.clear();
      }
      continue;
    }
    if (match_fence(line, marker) && marker.ch == opener.ch && marker.length >= opener.length &&
        marker.info.empty()) {
      std::string joined;
      for (std::size_t k = 0; k < body.size(); ++k) {
        if (k > 0) joined += '\n';
        joined += body[k];
      }
      current.body = std::move(joined);
      blocks.push_back(std::move(current));
      open = false;
      continue;
    }
    body.push_back(lines[i]);
  }
  return blocks;
}

bool has_fenced_block(std::string_view markdown) { return !fenced_blocks(markdown).empty(); }

std::string fence_for(std::string_view body) {
  std::size_t longest = 0;
  for (const auto line : split_lines(body)) {
    std::size_t run = 0;
    const std::string_view t = trim(line);
    while (run < t.size() && t[run] == '`') ++run;
    longest = std::max(longest, run);
  }
  return std::string(std::max<std::size_t>(3, longest + 1), '`');
}

}  // namespace forge::text
