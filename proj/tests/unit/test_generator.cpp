#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "forge/common/errors.hpp"
#include "forge/generator/fallback.hpp"
#include "forge/generator/generate.hpp"
#include "forge/generator/wire_format.hpp"
#include "forge/generator/zip.hpp"
#include "forge/source/syntax_tree.hpp"
#include "zip_reader.hpp"

using namespace forge;
using namespace forge::generator;

namespace {

std::vector<ParseEventKind> event_kinds(const ParsedContent& p) {
  std::vector<ParseEventKind> out;
  for (const auto& e : p.events) out.push_back(e.kind);
  return out;
}

planner::PackagePlan mypkg_plan() {
  planner::PackagePlan p;
  p.package_name = "mypkg";
  p.raw_description = "Data tools.";
  p.features = {{"Data Loader", "load CSV data", "Loads.\n```\nx\n```", {}}};
  p.enhanced_description = "Data tools, enhanced.";
  p.context_prompt = "CONTEXT";
  return p;
}

}  // namespace

TEST_CASE("parse_content reads headers and fenced bodies") {
  const auto p = parse_content("intro\n### FILE: a.py\n```python\nx = 1\n\ny = 2\n```\n### FILE: b/c.txt\n```\n```\n");
  CHECK(p.tree.at("a.py") == "x = 1\n\ny = 2");
  CHECK(p.tree.at("b/c.txt") == "");
  CHECK(event_kinds(p) == std::vector<ParseEventKind>{ParseEventKind::stray_line_skipped, ParseEventKind::file_opened,
                                                      ParseEventKind::file_closed, ParseEventKind::file_opened,
                                                      ParseEventKind::file_closed});
  CHECK(p.events[1].path == "a.py");
  CHECK(p.events[1].line_number == 3);
}

TEST_CASE("parse_content anomalies") {
  SECTION("duplicate path keeps the later body") {
    const auto p = parse_content("### FILE: a.py\n```\n1\n```\n### FILE: a.py\n```\n2\n```\n");
    CHECK(p.tree.at("a.py") == "2");
    const auto kinds = event_kinds(p);
    CHECK(kinds.back() == ParseEventKind::file_closed);
    CHECK(std::count(kinds.begin(), kinds.end(), ParseEventKind::duplicate_path_overwritten) == 1);
  }
  SECTION("unterminated fence is flushed") {
    const auto p = parse_content("### FILE: a.py\n```\nx = 1\ny = 2");
    CHECK(p.tree.at("a.py") == "x = 1\ny = 2");
    CHECK(event_kinds(p).back() == ParseEventKind::unterminated_fence_flushed);
  }
  SECTION("escaping paths are dropped") {
    const auto p = parse_content("### FILE: ../evil.py\n```\nboom\n```\n### FILE: /abs\n```\n```\n");
    CHECK(p.tree.empty());
  }
  SECTION("header without a fence") {
    const auto p = parse_content("### FILE: a.py\nprint(1)\n### FILE: b.py\n```\nok\n```\n### FILE: c.py\n");
    CHECK(p.tree.paths() == std::vector<std::string>{"b.py"});
    CHECK(event_kinds(p).back() == ParseEventKind::stray_line_skipped);
  }
  SECTION("CRLF line endings") {
    const auto p = parse_content("### FILE: a.py\r\n```\r\nx\r\n```\r\n");
    CHECK(p.tree.at("a.py") == "x\r");
  }
  SECTION("invalid UTF-8 is repaired") {
    const auto p = parse_content("### FILE: a.py\n```\nbad \xff byte\n```\n");
    CHECK(p.tree.at("a.py") == "bad \xef\xbf\xbd byte");
  }
}

TEST_CASE("render_tree round-trips random trees") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto tree = testing::random_tree(rng);
    const auto parsed = parse_content(render_tree(tree));
    REQUIRE(parsed.tree == tree);
  }
}

TEST_CASE("parse_content is total on fuzz input") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const auto input = testing::random_wire_input(rng);
    ParsedContent p;
    REQUIRE_NOTHROW(p = parse_content(input));
    for (const auto& [path, content] : p.tree) {
      CHECK(is_valid_tree_path(path));
      CHECK(is_valid_utf8(content));
    }
  }
}

TEST_CASE("fallback scaffold for mypkg with one feature") {
  const auto tree = create_fallback_structure({"mypkg", {"Data Loader"}, ""});
  CHECK(tree.paths() == std::vector<std::string>{"README.md", "examples/example_data_loader.py", "mypkg/__init__.py",
                                                 "mypkg/data_loader.py", "mypkg/main.py", "requirements.txt",
                                                 "setup.py", "tests/test_data_loader.py", "tests/test_mypkg.py"});
  CHECK(tree.at("requirements.txt").empty());
  CHECK(tree.at("setup.py").find("keywords=[\"Data Loader\"]") != std::string::npos);
  CHECK(tree.at("mypkg/data_loader.py").find("NotImplementedError") != std::string::npos);
}

TEST_CASE("fallback scaffold rejects bad names") {
  CHECK_THROWS_AS(create_fallback_structure({"Bad", {}, ""}), InvalidInput);
  CHECK_THROWS_AS(create_fallback_structure({"p", {"  "}, ""}), InvalidFeatureName);
  CHECK_THROWS_AS(create_fallback_structure({"p", {"2fast"}, ""}), InvalidFeatureName);
  CHECK_THROWS_AS(create_fallback_structure({"p", {"Data-Loader"}, ""}), InvalidFeatureName);
  CHECK_THROWS_AS(create_fallback_structure({"p", {"class"}, ""}), InvalidFeatureName);
  CHECK_THROWS_AS(create_fallback_structure({"p", {"A B", "a b"}, ""}), InvalidFeatureName);
  CHECK_THROWS_AS(create_fallback_structure({"p", {"Main"}, ""}), InvalidFeatureName);
  CHECK_THROWS_AS(create_fallback_structure({"p", {"P"}, ""}), InvalidFeatureName);
  CHECK(create_fallback_structure({"p", {}, ""}).size() == 6);
}

TEST_CASE("fallback stubs are valid Python") {
  const auto tree = create_fallback_structure({"pkg", {"Alpha", "Beta Gamma"}, "Says \"hi\" \\ there"});
  for (const auto& [path, content] : tree) {
    if (!path.ends_with(".py")) continue;
    INFO(path);
    CHECK_FALSE(source::parse(content).has_errors());
  }
}

TEST_CASE("merge_fallback fills gaps without replacing") {
  const auto scaffold = create_fallback_structure({"mypkg", {"Data Loader"}, ""});
  PackageTree generated;
  generated.put("mypkg/__init__.py", "# mine\n");
  const auto merged = merge_fallback(generated, scaffold, "mypkg");
  CHECK(merged.used_fallback);
  CHECK(merged.tree.at("mypkg/__init__.py") == "# mine\n");
  CHECK(merged.added_paths.size() == 8);
  CHECK(merged.tree.size() == 9);

  const auto complete = merge_fallback(scaffold, create_fallback_structure({"mypkg", {}, ""}), "mypkg");
  CHECK_FALSE(complete.used_fallback);
  CHECK(complete.tree == scaffold);
}

TEST_CASE("generation with a complete reply") {
  auto m = testing::scripted_model(
      gateway::ScriptedBehavior{{testing::sample_generation_reply()}, {}, {}, {}, {}, {}});
  const auto r = generate_package(m.access(), PromptLibrary::from_default_location(), mypkg_plan(), {});
  CHECK_FALSE(r.used_fallback);
  CHECK(r.tree.size() == 7);
  CHECK(r.tree.contains("mypkg/data_loader.py"));
  CHECK(r.attempts_used == 1);
}

TEST_CASE("generation falls back on garbage and fails without fallback") {
  auto m = testing::scripted_model(gateway::ScriptedBehavior{{"I cannot help with that."}, {}, {}, {}, {}, {}});
  const auto prompts = PromptLibrary::from_default_location();
  const auto r = generate_package(m.access(), prompts, mypkg_plan(), {});
  CHECK(r.used_fallback);
  CHECK(r.tree == fallback_for(mypkg_plan()));
  CHECK(r.fallback_paths.size() == 9);
  GenerationOptions strict;
  strict.fallback_enabled = false;
  CHECK_THROWS_AS(generate_package(m.access(), prompts, mypkg_plan(), strict), EmptyGeneration);
}

TEST_CASE("generation prompt with and without context") {
  const auto prompts = PromptLibrary::from_default_location();
  auto plan = mypkg_plan();
  const auto with = build_generation_prompt(prompts, plan, true);
  CHECK(with.user.find("CONTEXT") != std::string::npos);
  const auto without = build_generation_prompt(prompts, plan, false);
  CHECK(without.user.find("CONTEXT") == std::string::npos);
  CHECK(without.user.find("Feature: Data Loader") != std::string::npos);
  plan.context_prompt.reset();
  CHECK_THROWS_AS(build_generation_prompt(prompts, plan, true), InvalidInput);
}

TEST_CASE("materialize writes files and refuses to clobber") {
  testing::TempDir dir;
  const auto tree = create_fallback_structure({"mypkg", {"Data Loader"}, ""});
  const auto out = dir.path() / "pkg";
  const auto written = materialize(tree, out);
  CHECK(written.size() == 9);
  CHECK(load_tree_from_directory(out) == tree);
  CHECK_THROWS_AS(materialize(tree, out), IoError);
  CHECK_NOTHROW(materialize(tree, out, true));
  std::ofstream(dir.path() / "file") << "x";
  CHECK_THROWS_AS(materialize(tree, dir.path() / "file", true), IoError);
}

TEST_CASE("zip archives are deterministic and well formed") {
  const auto tree = create_fallback_structure({"mypkg", {"Data Loader"}, ""});
  const auto bytes = zip_bytes(tree);
  CHECK(bytes == zip_bytes(tree));
  const auto entries = testing::read_zip(bytes);
  REQUIRE(entries.size() == tree.size());
  auto it = tree.begin();
  for (const auto& e : entries) {
    CHECK(e.name == it->first);
    CHECK(e.content == it->second);
    CHECK(e.time == 0);
    CHECK(e.date == ((0 << 9) | (1 << 5) | 1));
    CHECK((e.flags & 0x0800) != 0);
    CHECK(e.extra_length == 0);
    ++it;
  }
  CHECK(zip_bytes(PackageTree{}).size() == 22);
  CHECK(testing::read_zip(zip_bytes(PackageTree{})).empty());

  testing::TempDir dir;
  const auto n = export_zip(tree, dir.path() / "out.zip");
  CHECK(n == bytes.size());
}

TEST_CASE("zip round-trips random trees") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const auto tree = testing::random_tree(rng);
    PackageTree back;
    for (const auto& e : testing::read_zip(zip_bytes(tree))) back.put(e.name, e.content);
    REQUIRE(back == tree);
  }
}
