#include "forge/generator/wire_format.hpp"

#include "forge/common/text.hpp"

namespace forge::generator {

std::string_view to_string(ParseEventKind kind) {
  switch (kind) {
    case ParseEventKind::file_opened: return "file_opened";
    case ParseEventKind::file_closed: return "file_closed";
    case ParseEventKind::duplicate_path_overwritten: return "duplicate_path_overwritten";
    case ParseEventKind::unterminated_fence_flushed: return "unterminated_fence_flushed";
    case ParseEventKind::stray_line_skipped: return "stray_line_skipped";
  }
  return "unknown";
}

namespace {

constexpr std::string_view kHeader = "### FILE: ";
constexpr std::string_view kFence = "```";

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

enum class State { expect_file, expect_open, collecting };

class ContentParser {
 public:
  ParsedContent run(std::string_view input) {
    int number = 0;
    for (const auto line : text::split_lines(input)) {
      ++number;
      step(line, number);
    }
    finish();
    return std::move(out_);
  }

 private:
  void event(ParseEventKind kind, int line, std::optional<std::string> path) {
    out_.events.push_back({kind, std::move(path), line});
  }

  void step(std::string_view raw, int number) {
    const std::string_view line = strip_cr(raw);
    switch (state_) {
      case State::expect_file:
        if (line.starts_with(kHeader)) {
          path_ = std::string(text::trim(line.substr(kHeader.size())));
          header_line_ = number;
          valid_ = is_valid_tree_path(path_);
          if (!valid_) event(ParseEventKind::stray_line_skipped, number, std::nullopt);
          state_ = State::expect_open;
        } else {
          event(ParseEventKind::stray_line_skipped, number, std::nullopt);
        }
        return;
      case State::expect_open:
        if (line.starts_with(kFence)) {
          if (valid_) event(ParseEventKind::file_opened, number, path_);
          lines_.clear();
          state_ = State::collecting;
        } else {
          event(ParseEventKind::stray_line_skipped, number, std::nullopt);
          state_ = State::expect_file;
        }
        return;
      case State::collecting:
        if (line.starts_with(kFence)) {
          store(number);
          if (valid_) event(ParseEventKind::file_closed, number, path_);
          state_ = State::expect_file;
        } else {
          lines_.emplace_back(raw);
        }
        return;
    }
  }

  void store(int number) {
    if (!valid_) return;
    std::string content;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      if (i > 0) content += '\n';
      content += lines_[i];
    }
    if (out_.tree.put(path_, std::move(content))) {
      event(ParseEventKind::duplicate_path_overwritten, number, path_);
    }
  }

  void finish() {
    if (state_ == State::expect_open) {
      // A header with no body; the header line is the stray one.
      if (valid_) event(ParseEventKind::stray_line_skipped, header_line_, std::nullopt);
    } else if (state_ == State::collecting) {
      const int last = header_line_ + 1 + static_cast<int>(lines_.size());
      store(last);
      if (valid_) event(ParseEventKind::unterminated_fence_flushed, last, path_);
    }
  }

  State state_ = State::expect_file;
  std::string path_;
  int header_line_ = 0;
  bool valid_ = false;
  std::vector<std::string> lines_;
  ParsedContent out_;
};

}  // namespace

ParsedContent parse_content(std::string_view response) {
  const std::string input = to_valid_utf8(response);
  return ContentParser().run(input);
}

std::string render_tree(const PackageTree& tree) {
  std::string out;
  for (const auto& [path, content] : tree) {
    out += kHeader;
    out += path;
    out += "\n```\n";
    out += content;
    out += "\n```\n";
  }
  return out;
}

}  // namespace forge::generator
