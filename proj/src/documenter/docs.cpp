#include "forge/documenter/docs.hpp"

#include <fstream>
#include <map>

#include "forge/common/text.hpp"

namespace forge::documenter {

const DocSection* DocBundle::find(std::string_view title) const {
  for (const auto& s : sections) {
    if (s.title == title) return &s;
  }
  return nullptr;
}

const std::vector<std::string>& canonical_sections() {
  static const std::vector<std::string> titles{"Overview",      "Features", "Installation",
                                               "Usage",         "API Reference", "Testing",
                                               "Dependencies",  "Contributing",  "License"};
  return titles;
}

std::string_view to_string(ExampleSource source) {
  switch (source) {
    case ExampleSource::example_files: return "example_files";
    case ExampleSource::model: return "model";
    case ExampleSource::stub: return "stub";
  }
  return "unknown";
}

namespace {

std::string fenced(std::string_view body, std::string_view info) {
  const std::string fence = text::fence_for(body);
  std::string out = fence + std::string(info) + "\n" + std::string(body);
  if (!body.empty() && body.back() != '\n') out += '\n';
  return out + fence + "\n";
}

std::string language_for(std::string_view path) {
  if (path.ends_with(".py")) return "python";
  if (path.ends_with(".sh")) return "bash";
  if (path.ends_with(".json")) return "json";
  return "";
}

constexpr std::string_view kStubExamples =
    "No usage example is available yet. The API Reference below lists the entry points.\n";

}  // namespace

std::string embed_example_files(const PackageTree& tree) {
  std::string out;
  for (const auto& [path, content] : tree) {
    if (!path.starts_with("examples/")) continue;
    if (!out.empty()) out += "\n";
    out += "### " + path + "\n\n" + fenced(content, language_for(path));
  }
  return out;
}

UsageExamples synthesize_examples(const gateway::ModelAccess& model, const PromptLibrary& prompts,
                                  const PackageTree& tree, std::string_view package_name,
                                  const std::vector<ApiSymbol>& symbols, int max_retries) {
  UsageExamples out;
  if (auto embedded = embed_example_files(tree); !embedded.empty()) {
    out.markdown = std::move(embedded);
    out.source = ExampleSource::example_files;
    return out;
  }
  if (symbols.empty()) {
    out.markdown = std::string(kStubExamples);
    return out;
  }
  std::string listing;
  for (const auto& s : symbols) {
    listing += "- " + std::string(to_string(s.kind)) + " " +
               (s.parent_class.empty() ? "" : s.parent_class + ".") + s.signature + " in " + s.module_path;
    if (s.docstring && !s.docstring->empty()) {
      listing += ": " + std::string(text::split_lines(*s.docstring).front());
    }
    listing += "\n";
  }
  const auto prompt =
      prompts.render("usage_examples", {{"package_name", std::string(package_name)}, {"symbols", listing}});
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    const auto reply = model.chat(prompt.system, prompt.user);
    ++out.model_calls;
    if (text::has_fenced_block(reply.text)) {
      out.markdown = sanitize_embedded_markdown(reply.text);
      out.source = ExampleSource::model;
      return out;
    }
  }
  out.markdown = std::string(kStubExamples);
  return out;
}

namespace {

std::string first_paragraph(std::string_view readme) {
  FenceTracker fences;
  std::vector<std::string> para;
  for (const auto raw : text::split_lines(readme)) {
    const auto role = fences.feed(raw);
    const auto line = text::trim(raw);
    if (role != FenceTracker::Role::text || heading_level(raw) || line.empty()) {
      if (!para.empty()) break;
      continue;
    }
    // Dedenting must not turn an indented line into a heading or fence.
    if (heading_level(line) || line.starts_with("```") || line.starts_with("~~~")) {
      para.push_back("\\" + std::string(line));
    } else {
      para.emplace_back(line);
    }
  }
  return text::join(para, "\n");
}

std::string overview(const PackageTree& tree, const std::string& name) {
  if (const auto* readme = tree.find("README.md")) {
    if (auto p = first_paragraph(*readme); !p.empty()) return p;
  }
  return name + " is a Python package.";
}

std::string features(const PackageTree& tree, const planner::PackagePlan& plan) {
  std::string out;
  if (const auto meta = read_setup_metadata(tree); meta && !meta->keywords.empty()) {
    for (const auto& k : meta->keywords) out += "- " + k + "\n";
    return out;
  }
  for (const auto& f : plan.features) {
    out += "- **" + f.name + "**";
    const auto first = text::split_lines(text::trim(f.raw_description));
    if (!first.empty()) out += ": " + std::string(text::trim(first.front()));
    out += "\n";
  }
  return out.empty() ? "No features are listed.\n" : out;
}

std::string installation(const std::string& name) {
  return "Install from a source checkout:\n\n```bash\npip install .\n```\n\nOnce published, the package installs by name:\n\n```bash\npip install " +
         name + "\n```\n";
}

std::string api_reference(const std::vector<ApiSymbol>& api, const std::vector<Relationship>& relationships) {
  std::string out;
  std::map<std::string, std::vector<const ApiSymbol*>> by_module;
  for (const auto& s : api) {
    const auto& p = s.module_path;
    if (p.starts_with("tests/") || p.starts_with("examples/") || p == "setup.py") continue;
    by_module[p].push_back(&s);
  }
  for (const auto& [module, symbols] : by_module) {
    out += "### `" + module + "`\n\n";
    for (const auto* s : symbols) {
      out += "- ";
      out += s->kind == SymbolKind::class_def ? "class " : "";
      out += "`" + (s->parent_class.empty() ? "" : s->parent_class + ".") + s->signature + "`";
      if (s->docstring && !s->docstring->empty()) {
        out += ": " + std::string(text::trim(text::split_lines(*s->docstring).front()));
      }
      out += "\n";
    }
    out += "\n";
  }
  if (out.empty()) out = "No public classes or functions were found.\n\n";
  out += "### Module dependencies\n\n";
  if (relationships.empty()) {
    out += "No module imports another module of the package.\n";
  } else {
    for (const auto& r : relationships) out += "- `" + r.from_module + "` imports `" + r.to_module + "`\n";
  }
  return out;
}

std::string testing(const PackageTree& tree) {
  std::string out = "Run the test suite with pytest:\n\n```bash\npython -m pytest tests\n```\n\nTest modules:\n\n";
  for (const auto& [path, content] : tree) {
    if (path.starts_with("tests/")) out += "- `" + path + "`\n";
  }
  return out;
}

std::string dependencies(const PackageTree& tree) {
  const auto* req = tree.find("requirements.txt");
  if (req == nullptr) return "The package does not declare a requirements.txt file.\n";
  std::string out;
  for (const auto raw : text::split_lines(*req)) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    out += "- `" + std::string(line) + "`\n";
  }
  return out.empty() ? "No third-party dependencies are required.\n" : "Listed in requirements.txt:\n\n" + out;
}

std::string contributing() {
  return "Contributions are welcome. Open an issue describing the change, add tests for new behaviour and make sure "
         "the existing test suite passes before sending a pull request.\n";
}

std::string license(const std::string& name, const DocOptions& options) {
  return name + " is released under the " + options.license_name +
         " license, an open-source license that permits use, modification and redistribution.\n";
}

}  // namespace

DocBundle build_documentation(const PackageTree& tree, const planner::PackagePlan& plan,
                              const std::vector<ApiSymbol>& api, const std::vector<Relationship>& relationships,
                              const UsageExamples& examples, const DocOptions& options) {
  DocBundle b;
  b.source_package = plan.package_name;
  b.sections.push_back({"Overview", overview(tree, plan.package_name)});
  b.sections.push_back({"Features", features(tree, plan)});
  b.sections.push_back({"Installation", installation(plan.package_name)});
  b.sections.push_back({"Usage", examples.markdown});
  b.sections.push_back({"API Reference", api_reference(api, relationships)});
  if (tree.has_directory("tests")) b.sections.push_back({"Testing", testing(tree)});
  b.sections.push_back({"Dependencies", dependencies(tree)});
  b.sections.push_back({"Contributing", contributing()});
  b.sections.push_back({"License", license(plan.package_name, options)});
  return b;
}

std::string render_documentation(const DocBundle& bundle) {
  std::string out = "# " + bundle.source_package + "\n";
  for (const auto& s : bundle.sections) {
    out += "\n## " + s.title + "\n\n";
    std::string body(text::trim(s.body));
    if (body.empty()) body = "_No content._";
    out += body + "\n";
  }
  return out;
}

std::filesystem::path write_documentation(const DocBundle& bundle, const std::filesystem::path& workspace) {
  std::error_code ec;
  std::filesystem::create_directories(workspace, ec);
  if (ec) throw IoError(workspace, "cannot create workspace (" + ec.message() + ")");
  const auto path = workspace / "DOCUMENTATION.md";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << render_documentation(bundle);
  out.close();
  if (!out) throw IoError(path, "write failed");
  return path;
}

}  // namespace forge::documenter
