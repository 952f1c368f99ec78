#include "forge/generator/fallback.hpp"

#include <set>

#include <json.hpp>

#include "forge/common/text.hpp"
#include "forge/planner/plan.hpp"
#include "forge/source/tokens.hpp"

namespace forge::generator {

std::string feature_lower(std::string_view feature) {
  std::string out = text::to_lower(text::trim(feature));
  for (char& c : out) {
    if (c == ' ') c = '_';
  }
  return out;
}

std::vector<std::string> base_file_paths(std::string_view package_name) {
  const std::string name(package_name);
  return {name + "/__init__.py", name + "/main.py",  "setup.py",
          "README.md",           "requirements.txt", "tests/test_" + name + ".py"};
}

std::vector<std::string> feature_file_paths(std::string_view package_name, std::string_view feature) {
  const std::string name(package_name);
  const std::string lower = feature_lower(feature);
  return {name + "/" + lower + ".py", "examples/example_" + lower + ".py", "tests/test_" + lower + ".py"};
}

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const auto first = static_cast<unsigned char>(s.front());
  if (!(std::islower(first) || first == '_')) return false;
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (!(std::islower(c) || std::isdigit(c) || c == '_')) return false;
  }
  return !source::is_python_keyword(s);
}

// JSON string syntax is also valid Python string syntax.
std::string py_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

std::string init_stub(const FallbackTemplate& t) {
  const std::string summary = t.description.empty() ? t.package_name + " package." : t.description;
  return py_string(summary) + "\n\n__version__ = \"0.1.0\"\n";
}

std::string main_stub(const FallbackTemplate& t) {
  return "\"\"\"Command-line entry point for " + t.package_name +
         ".\"\"\"\n\n\n"
         "def main():\n"
         "    \"\"\"Run the package.\"\"\"\n"
         "    # TODO: call the feature modules\n"
         "    return 0\n\n\n"
         "if __name__ == \"__main__\":\n"
         "    main()\n";
}

std::string setup_stub(const FallbackTemplate& t) {
  std::string keywords;
  for (std::size_t i = 0; i < t.features.size(); ++i) {
    if (i > 0) keywords += ", ";
    keywords += py_string(text::trim(t.features[i]));
  }
  const std::string summary = t.description.empty() ? t.package_name + " package" : t.description;
  return "from setuptools import find_packages, setup\n\n"
         "setup(\n"
         "    name=" + py_string(t.package_name) + ",\n"
         "    version=\"0.1.0\",\n"
         "    description=" + py_string(summary) + ",\n"
         "    keywords=[" + keywords + "],\n"
         "    packages=find_packages(exclude=[\"tests\", \"examples\"]),\n"
         "    install_requires=[],\n"
         "    python_requires=\">=3.8\",\n"
         ")\n";
}

std::string readme_stub(const FallbackTemplate& t) {
  std::string out = "# " + t.package_name + "\n\n";
  out += (t.description.empty() ? "Python package " + t.package_name + "." : t.description) + "\n";
  if (!t.features.empty()) {
    out += "\n## Features\n\n";
    for (const auto& f : t.features) out += "- " + std::string(text::trim(f)) + "\n";
  }
  return out;
}

std::string import_test_stub(std::string_view module, std::string_view test_name) {
  return "import importlib\n\n\n"
         "def test_" + std::string(test_name) + "_importable():\n"
         "    module = importlib.import_module(" + py_string(module) + ")\n"
         "    assert module is not None\n";
}

std::string feature_stub(std::string_view feature) {
  const std::string name(text::trim(feature));
  return "\"\"\"" + name + ".\"\"\"\n\n\n"
         "def run(*args, **kwargs):\n"
         "    \"\"\"Entry point for " + name + ".\"\"\"\n"
         "    # TODO: implement " + name + "\n"
         "    raise NotImplementedError(" + py_string(name + " is not implemented yet") + ")\n";
}

std::string example_stub(std::string_view module, std::string_view feature) {
  return "\"\"\"Example usage of " + std::string(text::trim(feature)) + ".\"\"\"\n"
         "import importlib\n\n\n"
         "def main():\n"
         "    module = importlib.import_module(" + py_string(module) + ")\n"
         "    print(module.__doc__)\n\n\n"
         "if __name__ == \"__main__\":\n"
         "    main()\n";
}

}  // namespace

PackageTree create_fallback_structure(const FallbackTemplate& t) {
  if (!planner::is_valid_package_name(t.package_name)) {
    throw InvalidInput("package name must match [a-z][a-z0-9_]*: '" + t.package_name + "'");
  }
  const std::string& name = t.package_name;
  PackageTree tree;
  tree.put(name + "/__init__.py", init_stub(t));
  tree.put(name + "/main.py", main_stub(t));
  tree.put("setup.py", setup_stub(t));
  tree.put("README.md", readme_stub(t));
  tree.put("requirements.txt", "");
  tree.put("tests/test_" + name + ".py", import_test_stub(name, name));

  std::set<std::string> taken{"__init__", "main", name};
  for (const auto& feature : t.features) {
    if (text::trim(feature).empty()) throw InvalidFeatureName("feature name is empty");
    const std::string lower = feature_lower(feature);
    if (!is_identifier(lower)) {
      throw InvalidFeatureName("feature '" + feature + "' does not map to a module name ('" + lower + "')");
    }
    if (!taken.insert(lower).second) {
      throw InvalidFeatureName("feature '" + feature + "' collides with another file ('" + lower + "')");
    }
    const auto paths = feature_file_paths(name, feature);
    const std::string module = name + "." + lower;
    tree.put(paths[0], feature_stub(feature));
    tree.put(paths[1], example_stub(module, feature));
    tree.put(paths[2], import_test_stub(module, lower));
  }
  return tree;
}

MergeResult merge_fallback(const PackageTree& generated, const PackageTree& scaffold,
                           std::string_view package_name) {
  MergeResult out{generated, false, {}};
  bool missing = false;
  for (const auto& p : base_file_paths(package_name)) missing = missing || !generated.contains(p);
  if (!missing) return out;
  out.used_fallback = true;
  for (const auto& [path, content] : scaffold) {
    if (out.tree.contains(path)) continue;
    out.tree.put(path, content);
    out.added_paths.push_back(path);
  }
  return out;
}

}  // namespace forge::generator
