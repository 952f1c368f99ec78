#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

/// A relative, "/"-separated path with no empty, "." or ".." segments.
bool is_valid_tree_path(std::string_view path);

bool is_valid_utf8(std::string_view text);

/// Replaces every malformed UTF-8 sequence with U+FFFD.
std::string to_valid_utf8(std::string_view text);

/// Generated package before archiving: relative path -> UTF-8 text.
///
/// Entries iterate in lexicographic path order. Every mutation validates its
/// input, so a PackageTree that exists is always well formed.
class PackageTree {
 public:
  using Entries = std::map<std::string, std::string, std::less<>>;

  PackageTree() = default;

  /// Inserts or replaces an entry; returns true when a previous entry was
  /// replaced. Throws InvalidPath for a bad path or non-UTF-8 content.
  bool put(std::string path, std::string content);
  bool erase(std::string_view path);

  bool contains(std::string_view path) const;
  const std::string* find(std::string_view path) const;
  const std::string& at(std::string_view path) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Entries& entries() const noexcept { return entries_; }
  Entries::const_iterator begin() const { return entries_.begin(); }
  Entries::const_iterator end() const { return entries_.end(); }

  std::vector<std::string> paths() const;

  /// True when some entry lives under the directory prefix (e.g. "tests").
  bool has_directory(std::string_view dir) const;

  bool operator==(const PackageTree&) const = default;

 private:
  Entries entries_;
};

/// Reads every regular UTF-8 text file below root. Hidden entries,
/// __pycache__ and files that are not valid UTF-8 are skipped.
PackageTree load_tree_from_directory(const std::filesystem::path& root);

}  // namespace forge
