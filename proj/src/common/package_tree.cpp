#include "forge/common/package_tree.hpp"

#include <fstream>
#include <sstream>

#include "forge/common/errors.hpp"

namespace forge {

namespace fs = std::filesystem;

bool is_valid_tree_path(std::string_view path) {
  if (path.empty() || path.front() == '/' || path.back() == '/') return false;
  if (path.find('\\') != std::string_view::npos) return false;
  if (path.find('\0') != std::string_view::npos) return false;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t slash = path.find('/', start);
    const std::size_t end = slash == std::string_view::npos ? path.size() : slash;
    const std::string_view segment = path.substr(start, end - start);
    if (segment.empty() || segment == "." || segment == "..") return false;
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return is_valid_utf8(path);
}

namespace {

// Length of the well-formed UTF-8 sequence starting at s[i], or 0.
std::size_t utf8_sequence_length(std::string_view s, std::size_t i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char lead = byte(i);
  if (lead < 0x80) return 1;
  std::size_t len = 0;
  unsigned char lo = 0x80, hi = 0xBF;
  if (lead >= 0xC2 && lead <= 0xDF) {
    len = 2;
  } else if (lead >= 0xE0 && lead <= 0xEF) {
    len = 3;
    if (lead == 0xE0) lo = 0xA0;
    if (lead == 0xED) hi = 0x9F;
  } else if (lead >= 0xF0 && lead <= 0xF4) {
    len = 4;
    if (lead == 0xF0) lo = 0x90;
    if (lead == 0xF4) hi = 0x8F;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  if (byte(i + 1) < lo || byte(i + 1) > hi) return 0;
  for (std::size_t k = 2; k < len; ++k) {
    if (byte(i + k) < 0x80 || byte(i + k) > 0xBF) return 0;
  }
  return len;
}

}  // namespace

bool is_valid_utf8(std::string_view text) {
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t len = utf8_sequence_length(text, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

std::string to_valid_utf8(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t len = utf8_sequence_length(text, i);
    if (len == 0) {
      out += "\xEF\xBF\xBD";
      ++i;
    } else {
      out.append(text.substr(i, len));
      i += len;
    }
  }
  return out;
}

bool PackageTree::put(std::string path, std::string content) {
  if (!is_valid_tree_path(path)) throw InvalidPath("invalid package path '" + path + "'");
  if (!is_valid_utf8(content)) throw InvalidPath("content of '" + path + "' is not valid UTF-8");
  auto [it, inserted] = entries_.insert_or_assign(std::move(path), std::move(content));
  return !inserted;
}

bool PackageTree::erase(std::string_view path) {
  const auto it = entries_.find(path);
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

bool PackageTree::contains(std::string_view path) const { return entries_.find(path) != entries_.end(); }

const std::string* PackageTree::find(std::string_view path) const {
  const auto it = entries_.find(path);
  return it == entries_.end() ? nullptr : &it->second;
}

const std::string& PackageTree::at(std::string_view path) const {
  const auto* content = find(path);
  if (content == nullptr) throw InvalidPath("no entry '" + std::string(path) + "'");
  return *content;
}

std::vector<std::string> PackageTree::paths() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [path, _] : entries_) out.push_back(path);
  return out;
}

bool PackageTree::has_directory(std::string_view dir) const {
  const std::string prefix = std::string(dir) + "/";
  const auto it = entries_.lower_bound(prefix);
  return it != entries_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

PackageTree load_tree_from_directory(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError(root, "not a directory");
  PackageTree tree;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    const std::string name = it->path().filename().string();
    if (name.starts_with(".") || name == "__pycache__") {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (!it->is_regular_file()) continue;
    std::ifstream in(it->path(), std::ios::binary);
    if (!in) throw IoError(it->path(), "cannot read");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string content = buffer.str();
    if (!is_valid_utf8(content)) continue;
    const std::string rel = fs::relative(it->path(), root).generic_string();
    if (!is_valid_tree_path(rel)) continue;
    tree.put(rel, std::move(content));
  }
  return tree;
}

}  // namespace forge
