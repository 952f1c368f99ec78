#include "forge/generator/generate.hpp"

#include <fstream>

#include "forge/common/text.hpp"

namespace forge::generator {

namespace fs = std::filesystem;

RenderedPrompt build_generation_prompt(const PromptLibrary& prompts, const planner::PackagePlan& plan,
                                       bool use_context) {
  std::string specification;
  if (use_context) {
    if (!plan.context_prompt) throw InvalidInput("context prompt requested but not built");
    specification = *plan.context_prompt;
  } else {
    specification = "Description:\n\n" + plan.enhanced_description.value_or(plan.raw_description) + "\n";
    for (const auto& f : plan.features) {
      specification += "\nFeature: " + f.name + "\n\n" + f.enhanced_description.value_or(f.raw_description) + "\n";
    }
  }
  return prompts.render("generate_package", {{"package_name", plan.package_name},
                                             {"base_files", text::join(base_file_paths(plan.package_name), ", ")},
                                             {"specification", specification}});
}

PackageTree fallback_for(const planner::PackagePlan& plan) {
  FallbackTemplate t;
  t.package_name = plan.package_name;
  for (const auto& f : plan.features) t.features.push_back(f.name);
  t.description = std::string(text::trim(plan.raw_description));
  return create_fallback_structure(t);
}

GenerationResult generate_package(const gateway::ModelAccess& model, const PromptLibrary& prompts,
                                  const planner::PackagePlan& plan, const GenerationOptions& options) {
  const auto prompt = build_generation_prompt(prompts, plan, options.use_context);
  auto reply = model.chat(prompt.system, prompt.user);

  GenerationResult out;
  out.attempts_used = reply.attempts_used;
  out.reply = std::move(reply.text);
  ParsedContent parsed = parse_content(out.reply);
  out.events = std::move(parsed.events);
  if (!options.fallback_enabled) {
    if (parsed.tree.empty()) throw EmptyGeneration("model reply contained no file blocks");
    out.tree = std::move(parsed.tree);
    return out;
  }
  MergeResult merged = merge_fallback(parsed.tree, fallback_for(plan), plan.package_name);
  out.tree = std::move(merged.tree);
  out.used_fallback = merged.used_fallback;
  out.fallback_paths = std::move(merged.added_paths);
  return out;
}

std::vector<fs::path> materialize(const PackageTree& tree, const fs::path& out_dir, bool force) {
  std::error_code ec;
  if (fs::exists(out_dir, ec)) {
    if (!fs::is_directory(out_dir, ec)) throw IoError(out_dir, "output path is not a directory");
    if (!force && !fs::is_empty(out_dir, ec)) throw IoError(out_dir, "output directory is not empty");
  }
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir, "cannot create output directory (" + ec.message() + ")");

  const fs::path root = fs::weakly_canonical(out_dir);
  std::vector<fs::path> written;
  for (const auto& [path, content] : tree) {
    const fs::path target = (root / fs::path(path)).lexically_normal();
    const auto rel = target.lexically_relative(root);
    if (rel.empty() || *rel.begin() == "..") throw IoError(target, "entry escapes the output directory");
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError(target.parent_path(), "cannot create directory (" + ec.message() + ")");
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(target, "cannot open for writing");
    out << content;
    out.close();
    if (!out) throw IoError(target, "write failed");
    written.push_back(target);
  }
  return written;
}

}  // namespace forge::generator
