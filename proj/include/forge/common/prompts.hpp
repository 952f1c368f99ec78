#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "forge/common/errors.hpp"

namespace forge {

class PromptError : public Error {
 public:
  using Error::Error;
};

struct RenderedPrompt {
  std::string system;
  std::string user;
};

/// Prompt templates loaded from a versioned directory of *.txt files.
///
/// A template holds a "[system]" section followed by a "[user]" section.
/// Placeholders are written {{name}}; rendering fails on a placeholder that
/// has no value, so template edits cannot silently drop inputs.
class PromptLibrary {
 public:
  explicit PromptLibrary(std::filesystem::path dir);

  /// FORGE_PROMPT_DIR when set, otherwise the directory shipped with the
  /// source tree.
  static PromptLibrary from_default_location();

  RenderedPrompt render(std::string_view name,
                        const std::map<std::string, std::string>& vars) const;

  bool has(std::string_view name) const;
  const std::filesystem::path& directory() const noexcept { return dir_; }
  /// Name of the template directory, e.g. "v1".
  std::string version() const { return dir_.filename().string(); }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string, std::less<>> templates_;
};

/// Substitutes {{name}} placeholders. Throws PromptError on unknown names.
std::string substitute(std::string_view tmpl,
                       const std::map<std::string, std::string>& vars);

}  // namespace forge
