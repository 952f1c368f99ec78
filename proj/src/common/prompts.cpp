#include "forge/common/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "forge/common/text.hpp"

#ifndef FORGE_DEFAULT_PROMPT_DIR
#define FORGE_DEFAULT_PROMPT_DIR "prompts/v1"
#endif

namespace forge {

namespace fs = std::filesystem;

PromptLibrary::PromptLibrary(fs::path dir) : dir_(std::move(dir)) {
  if (!fs::is_directory(dir_)) throw IoError(dir_, "prompt template directory not found");
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw IoError(entry.path(), "cannot read prompt template");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    templates_.emplace(entry.path().stem().string(), buffer.str());
  }
}

PromptLibrary PromptLibrary::from_default_location() {
  if (const char* env = std::getenv("FORGE_PROMPT_DIR"); env != nullptr && *env != '\0') {
    return PromptLibrary(env);
  }
  return PromptLibrary(FORGE_DEFAULT_PROMPT_DIR);
}

bool PromptLibrary::has(std::string_view name) const { return templates_.find(name) != templates_.end(); }

RenderedPrompt PromptLibrary::render(std::string_view name,
                                     const std::map<std::string, std::string>& vars) const {
  const auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw PromptError("unknown prompt template '" + std::string(name) + "' in " + dir_.string());
  }
  const std::string& tmpl = it->second;
  const std::size_t sys = tmpl.find("[system]\n");
  const std::size_t usr = tmpl.find("[user]\n");
  if (sys == std::string::npos || usr == std::string::npos || usr < sys) {
    throw PromptError("template '" + std::string(name) + "' needs [system] then [user] sections");
  }
  const std::size_t sys_body = sys + 9;
  RenderedPrompt out;
  out.system = std::string(text::trim(substitute(tmpl.substr(sys_body, usr - sys_body), vars)));
  out.user = std::string(text::trim(substitute(tmpl.substr(usr + 7), vars)));
  return out;
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    const std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw PromptError("unterminated placeholder in prompt template");
    out.append(tmpl.substr(pos, open - pos));
    const std::string key(text::trim(tmpl.substr(open + 2, close - open - 2)));
    const auto it = vars.find(key);
    if (it == vars.end()) throw PromptError("no value for placeholder '" + key + "'");
    out += it->second;
    pos = close + 2;
  }
  return out;
}

}  // namespace forge
