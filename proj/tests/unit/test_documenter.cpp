#include <catch_amalgamated.hpp>

#include <fstream>

#include "fixtures.hpp"
#include "forge/documenter/api.hpp"
#include "forge/documenter/docs.hpp"
#include "forge/documenter/markdown.hpp"
#include "forge/generator/wire_format.hpp"

using namespace forge;
using namespace forge::documenter;

namespace {

PackageTree sample_tree() { return generator::parse_content(testing::sample_generation_reply()).tree; }

planner::PackagePlan sample_plan() {
  planner::PackagePlan p;
  p.package_name = "mypkg";
  p.raw_description = "Data tools.";
  p.features = {{"Data Loader", "load CSV data\nsecond line", std::nullopt, {}}};
  return p;
}

std::vector<std::string> titles(const DocBundle& b) {
  std::vector<std::string> out;
  for (const auto& s : b.sections) out.push_back(s.title);
  return out;
}

DocBundle document(const PackageTree& tree) {
  const auto api = extract_api(tree);
  UsageExamples ex{"```python\nimport mypkg\n```\n", ExampleSource::model, 1};
  return build_documentation(tree, sample_plan(), api.symbols, extract_relationships(tree), ex);
}

}  // namespace

TEST_CASE("api extraction: signatures, docstrings and methods") {
  PackageTree t;
  t.put("pkg/a.py",
        "\"\"\"Module doc.\"\"\"\n\n\nclass Loader(Base):\n    '''Loads things.\n\n    More text.\n    '''\n\n"
        "    def load(self, path: str, *, retries=3) -> list:\n        \"\"\"Read path.\"\"\"\n        return []\n\n"
        "    def _private(self):\n        pass\n\n\ndef helper(x, y=1, *args, **kw):\n    return x\n\n\n"
        "async def fetch(url):\n    pass\n\n\ndef _hidden():\n    pass\n");
  const auto api = extract_api(t);
  REQUIRE(api.symbols.size() == 6);
  CHECK(api.symbols[0].kind == SymbolKind::class_def);
  CHECK(api.symbols[0].signature == "Loader(Base)");
  CHECK(api.symbols[0].docstring == "Loads things.\n\nMore text.");
  CHECK(api.symbols[1].qualified_name() == "Loader.load");
  CHECK(api.symbols[1].signature == "load(self, path: str, *, retries=3) -> list");
  CHECK(api.symbols[1].docstring == "Read path.");
  CHECK(api.symbols[2].qualified_name() == "Loader._private");
  CHECK(api.symbols[3].signature == "helper(x, y=1, *args, **kw)");
  CHECK_FALSE(api.symbols[3].docstring.has_value());
  CHECK(api.symbols[4].name == "fetch");
  CHECK(api.symbols[4].line == 22);
  CHECK(api.symbols[5].name == "_hidden");
}

TEST_CASE("api extraction skips broken files with a diagnostic") {
  PackageTree t;
  t.put("a.py", "def f(:\n");
  t.put("b.py", "def g():\n    pass\n");
  const auto api = extract_api(t);
  CHECK(api.symbols.size() == 1);
  CHECK(api.diagnostics.size() == 1);
}

TEST_CASE("string literal decoding and docstring cleaning") {
  CHECK(decode_string_literal("'a\\nb'") == "a\nb");
  CHECK(decode_string_literal("r'a\\nb'") == "a\\nb");
  CHECK(decode_string_literal("\"\"\"x\"\"\"") == "x");
  CHECK(decode_string_literal("f\"{x}\"") == "{x}");
  CHECK(decode_string_literal("'\\x41\\t'") == "\\x41\t");
  CHECK(clean_docstring("First.\n\n    Indented more.\n      Deeper.\n    ") == "First.\n\nIndented more.\n  Deeper.");
  CHECK(clean_docstring("\n\n  Only.\n") == "Only.");
}

TEST_CASE("setup.py metadata") {
  const auto meta = read_setup_metadata(sample_tree());
  REQUIRE(meta);
  CHECK(meta->description == "Data loading tools");
  CHECK(meta->keywords == std::vector<std::string>{"data", "csv"});
  CHECK_FALSE(read_setup_metadata(PackageTree{}).has_value());
}

TEST_CASE("relationships are intra-package imports") {
  const auto rel = extract_relationships(sample_tree());
  CHECK(rel == std::vector<Relationship>{{"mypkg", "mypkg.data_loader"}, {"mypkg.main", "mypkg.data_loader"},
                                         {"tests.test_mypkg", "mypkg.data_loader"}});
}

TEST_CASE("documentation has every section in order") {
  const auto doc = document(sample_tree());
  CHECK(titles(doc) == canonical_sections());
  CHECK(doc.find("Overview")->body == "Small helpers for loading CSV data into Python lists.");
  CHECK(doc.find("Features")->body == "- data\n- csv\n");
  const auto api = doc.find("API Reference")->body;
  CHECK(api.find("mypkg/data_loader.py") != std::string::npos);
  CHECK(api.find("tests/") == std::string::npos);
  CHECK(api.find("`mypkg.main` imports `mypkg.data_loader`") != std::string::npos);
  CHECK(doc.find("Testing")->body.find("tests/test_mypkg.py") != std::string::npos);
  CHECK(doc.find("Dependencies")->body == "No third-party dependencies are required.\n");
}

TEST_CASE("removing tests/ removes only the Testing section") {
  auto tree = sample_tree();
  tree.erase("tests/test_mypkg.py");
  auto expected = canonical_sections();
  expected.erase(std::find(expected.begin(), expected.end(), "Testing"));
  CHECK(titles(document(tree)) == expected);
}

TEST_CASE("features fall back to the plan without setup keywords") {
  auto tree = sample_tree();
  tree.erase("setup.py");
  tree.erase("README.md");
  const auto doc = document(tree);
  CHECK(doc.find("Features")->body == "- **Data Loader**: load CSV data\n");
  CHECK(doc.find("Overview")->body == "mypkg is a Python package.");
}

TEST_CASE("rendered documentation passes its own validator") {
  const auto md = render_documentation(document(sample_tree()));
  CHECK(md.starts_with("# mypkg\n\n## Overview\n"));
  CHECK(validate_markdown(md, nullptr).empty());
  testing::TempDir dir;
  const auto path = write_documentation(document(sample_tree()), dir.path());
  std::ifstream in(path);
  CHECK(std::string(std::istreambuf_iterator<char>(in), {}) == md);
}

TEST_CASE("usage examples: files first, then the model, then a stub") {
  const auto prompts = PromptLibrary::from_default_location();
  auto m = testing::scripted_model(gateway::ScriptedBehavior{{"no code", "# Demo\n```python\nrun()\n```"}, {}, {}, {}, {}, {}});
  auto tree = sample_tree();
  const auto symbols = extract_api(tree).symbols;

  auto with_files = tree;
  with_files.put("examples/demo.py", "print(1)\n");
  const auto embedded = synthesize_examples(m.access(), prompts, with_files, "mypkg", symbols, 2);
  CHECK(embedded.source == ExampleSource::example_files);
  CHECK(embedded.markdown == "### examples/demo.py\n\n```python\nprint(1)\n```\n");
  CHECK(m.provider->calls() == 0);

  const auto model = synthesize_examples(m.access(), prompts, tree, "mypkg", symbols, 2);
  CHECK(model.source == ExampleSource::model);
  CHECK(model.model_calls == 2);
  CHECK(model.markdown.starts_with("### Demo"));

  auto never = testing::scripted_model(gateway::ScriptedBehavior{{"prose only"}, {}, {}, {}, {}, {}});
  const auto stub = synthesize_examples(never.access(), prompts, tree, "mypkg", symbols, 1);
  CHECK(stub.source == ExampleSource::stub);
  CHECK(stub.model_calls == 2);
  CHECK(synthesize_examples(never.access(), prompts, tree, "mypkg", {}, 1).model_calls == 0);
}

TEST_CASE("markdown validator findings") {
  const std::string md = "# T\n\n### Skip\n\ntext  \n\n[link](docs/missing.md) [ok](README.md) [web](https://x.y)\n\n```\nopen";
  PackageTree tree;
  tree.put("README.md", "x");
  const auto f = validate_markdown(md, &tree);
  std::vector<LintRule> rules;
  for (const auto& x : f) rules.push_back(x.rule);
  CHECK(std::count(rules.begin(), rules.end(), LintRule::heading_jump) == 1);
  CHECK(std::count(rules.begin(), rules.end(), LintRule::trailing_whitespace) == 1);
  CHECK(std::count(rules.begin(), rules.end(), LintRule::broken_relative_link) == 1);
  CHECK(std::count(rules.begin(), rules.end(), LintRule::unbalanced_fence) == 1);
  for (const auto& x : f) {
    if (x.rule == LintRule::unbalanced_fence) CHECK(x.line == 9);
  }
  // Links are only checked against a tree.
  CHECK(validate_markdown("[a](missing.md)\n").empty());
  // Headings inside code do not count.
  CHECK(validate_markdown("# A\n```\n#### not a heading\n```\n## B\n").empty());
}

TEST_CASE("heading levels") {
  CHECK(heading_level("## x") == 2);
  CHECK(heading_level("   # x") == 1);
  CHECK_FALSE(heading_level("    # code"));
  CHECK_FALSE(heading_level("#nospace"));
  CHECK(heading_level("#") == 1);
  CHECK_FALSE(heading_level("####### seven"));
}

TEST_CASE("sanitizing embedded markdown") {
  const auto s = sanitize_embedded_markdown("# Title  \ntext\n## Sub\n```\n# code  \n");
  CHECK(s == "### Title\ntext\n### Sub\n```\n# code  \n```\n");
  CHECK(validate_markdown("## Usage\n\n" + s).empty() == false);  // trailing space inside code is still reported
  const auto clean = sanitize_embedded_markdown("# A\n\n~~~~\nx\n~~~~\n");
  CHECK(validate_markdown("# Doc\n\n## Usage\n\n" + clean).empty());
}
