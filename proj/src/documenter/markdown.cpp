#include "forge/documenter/markdown.hpp"

#include <algorithm>
#include <filesystem>

#include "forge/common/text.hpp"

namespace forge::documenter {

std::string_view to_string(LintRule rule) {
  switch (rule) {
    case LintRule::unbalanced_fence: return "unbalanced_fence";
    case LintRule::heading_jump: return "heading_jump";
    case LintRule::broken_relative_link: return "broken_relative_link";
    case LintRule::trailing_whitespace: return "trailing_whitespace";
  }
  return "unknown";
}

namespace {

std::size_t leading_spaces(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && line[n] == ' ') ++n;
  return n;
}

}  // namespace

FenceTracker::Role FenceTracker::feed(std::string_view raw) {
  ++line_;
  std::string_view line = raw;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const std::size_t indent = leading_spaces(line);
  if (indent > 3) return open_ ? Role::code : Role::text;
  const std::string_view rest = line.substr(indent);
  if (rest.empty() || (rest.front() != '`' && rest.front() != '~')) return open_ ? Role::code : Role::text;
  const char c = rest.front();
  std::size_t run = 0;
  while (run < rest.size() && rest[run] == c) ++run;
  if (run < 3) return open_ ? Role::code : Role::text;
  const std::string_view info = text::trim(rest.substr(run));
  if (open_) {
    if (c == fence_char_ && run >= fence_len_ && info.empty()) {
      open_ = false;
      return Role::close;
    }
    return Role::code;
  }
  // A backtick fence's info string may not contain backticks.
  if (c == '`' && info.find('`') != std::string_view::npos) return Role::text;
  open_ = true;
  fence_char_ = c;
  fence_len_ = run;
  open_line_ = line_;
  return Role::open;
}

std::optional<int> heading_level(std::string_view line) {
  const std::size_t indent = leading_spaces(line);
  if (indent > 3) return std::nullopt;
  std::size_t n = 0;
  while (indent + n < line.size() && line[indent + n] == '#') ++n;
  if (n == 0 || n > 6) return std::nullopt;
  const std::size_t after = indent + n;
  if (after < line.size() && line[after] != ' ' && line[after] != '\t' && line[after] != '\r') return std::nullopt;
  return static_cast<int>(n);
}

namespace {

bool is_relative_target(std::string_view target) {
  if (target.empty() || target.front() == '#' || target.front() == '/') return false;
  if (target.find("://") != std::string_view::npos) return false;
  if (target.starts_with("mailto:") || target.starts_with("tel:") || target.starts_with("data:")) return false;
  return true;
}

bool target_exists(const PackageTree& tree, std::string_view target) {
  const auto cut = target.find_first_of("#?");
  if (cut != std::string_view::npos) target = target.substr(0, cut);
  if (target.empty()) return true;
  std::string normal = std::filesystem::path(std::string(target)).lexically_normal().generic_string();
  while (!normal.empty() && normal.back() == '/') normal.pop_back();
  if (normal.empty() || normal == ".") return true;
  if (normal.starts_with("..")) return false;
  return tree.contains(normal) || tree.has_directory(normal);
}

// Inline links and images, skipping code spans.
void check_links(std::string_view line, int number, const PackageTree& tree, std::vector<LintFinding>& out) {
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '`') {
      std::size_t run = 0;
      while (i + run < line.size() && line[i + run] == '`') ++run;
      const std::string ticks(run, '`');
      const auto close = line.find(ticks, i + run);
      if (close == std::string_view::npos) return;
      i = close + run;
      continue;
    }
    if (line[i] == ']' && i + 1 < line.size() && line[i + 1] == '(') {
      const auto close = line.find(')', i + 2);
      if (close == std::string_view::npos) return;
      std::string_view target = text::trim(line.substr(i + 2, close - i - 2));
      if (const auto space = target.find(' '); space != std::string_view::npos) target = target.substr(0, space);
      if (target.size() >= 2 && target.front() == '<' && target.back() == '>') {
        target = target.substr(1, target.size() - 2);
      }
      if (is_relative_target(target) && !target_exists(tree, target)) {
        out.push_back({LintRule::broken_relative_link, number, "link target not in package: " + std::string(target)});
      }
      i = close + 1;
      continue;
    }
    ++i;
  }
}

}  // namespace

std::vector<LintFinding> validate_markdown(std::string_view doc, const PackageTree* tree) {
  std::vector<LintFinding> out;
  FenceTracker fences;
  int number = 0;
  std::optional<int> previous_heading;
  for (const auto raw : text::split_lines(doc)) {
    ++number;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && (line.back() == ' ' || line.back() == '\t')) {
      out.push_back({LintRule::trailing_whitespace, number, "line ends with whitespace"});
    }
    const auto role = fences.feed(line);
    if (role != FenceTracker::Role::text) continue;
    if (const auto level = heading_level(line)) {
      if (previous_heading && *level >= *previous_heading + 2) {
        out.push_back({LintRule::heading_jump, number,
                       "heading level " + std::to_string(*level) + " follows level " +
                           std::to_string(*previous_heading)});
      }
      previous_heading = level;
      continue;
    }
    if (tree != nullptr) check_links(line, number, *tree, out);
  }
  if (fences.inside()) {
    out.push_back({LintRule::unbalanced_fence, fences.open_line(), "code fence is never closed"});
  }
  std::stable_sort(out.begin(), out.end(), [](const LintFinding& a, const LintFinding& b) { return a.line < b.line; });
  return out;
}

std::string sanitize_embedded_markdown(std::string_view md) {
  std::string out;
  FenceTracker fences;
  std::string closer;
  for (const auto raw : text::split_lines(md)) {
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto role = fences.feed(line);
    if (role == FenceTracker::Role::open) {
      const auto t = text::trim(line);
      std::size_t run = 0;
      while (run < t.size() && t[run] == t.front()) ++run;
      closer = std::string(run, t.front());
    }
    if (role == FenceTracker::Role::text || role == FenceTracker::Role::open || role == FenceTracker::Role::close) {
      line = text::trim_right(line);
    }
    if (role == FenceTracker::Role::text) {
      if (const auto level = heading_level(line)) {
        const auto body = text::trim(text::trim(line).substr(static_cast<std::size_t>(*level)));
        out += body.empty() ? std::string("###\n") : "### " + std::string(body) + "\n";
        continue;
      }
    }
    out += line;
    out += '\n';
  }
  if (fences.inside()) out += closer + "\n";
  return out;
}

}  // namespace forge::documenter
