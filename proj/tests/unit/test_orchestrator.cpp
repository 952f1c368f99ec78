#include <catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <thread>

#include "fixtures.hpp"
#include "forge/common/errors.hpp"
#include "forge/generator/fallback.hpp"
#include "forge/orchestrator/config.hpp"
#include "forge/orchestrator/job.hpp"
#include "forge/orchestrator/pipeline.hpp"
#include "forge/orchestrator/workspace.hpp"
#include "forge/planner/plan.hpp"
#include "zip_reader.hpp"

using namespace forge;
using namespace forge::orchestrator;
namespace fs = std::filesystem;

namespace {

PackageRequest mypkg_request() {
  PackageRequest r;
  r.name = "mypkg";
  r.description = "Tools for loading CSV data.";
  r.features = {parse_feature_arg("Data Loader: load CSV data into rows")};
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

RunOptions batch() {
  RunOptions o;
  o.non_interactive = true;
  return o;
}

}  // namespace

TEST_CASE("default config and validation") {
  testing::TempDir dir;
  auto c = default_config();
  CHECK(c.provider == "groq");
  CHECK(c.profiles.at("groq").api_key_ref == "GROQ_API_KEY");
  CHECK(c.profiles.at("gemini").kind == gateway::ProviderKind::gemini_style);
  CHECK(c.profiles.at("ollama").kind == gateway::ProviderKind::local_host);
  c.workspace_root = dir.path() / "ws";
  CHECK_NOTHROW(c.validate());
  CHECK(fs::is_directory(c.workspace_root));
  c.provider = "scripted";
  CHECK_THROWS_AS(c.validate(), InvalidInput);  // no script
  c.script = testing::pipeline_script();
  CHECK_NOTHROW(c.validate());
  c.provider = "nope";
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.provider = "groq";
  c.refinement_iterations = 0;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
}

TEST_CASE("config JSON merges over defaults and round-trips") {
  const auto j = nlohmann::json::parse(R"({
    "provider": "local", "profiles": {"local": {"kind": "local_host", "base_url": "http://127.0.0.1:9",
    "default_model": "tiny"}, "groq": {"default_model": "other"}},
    "retry": {"max_retries": 2}, "refinement_iterations": 5, "fallback_enabled": false})");
  const auto c = config_from_json(j);
  CHECK(c.provider == "local");
  CHECK(c.active_profile().default_model == "tiny");
  CHECK(c.profiles.at("groq").default_model == "other");
  CHECK(c.profiles.at("groq").base_url == "https://api.groq.com/openai/v1");
  CHECK(c.retry.max_retries == 2);
  CHECK(c.retry.initial_wait.count() == 1.0);
  CHECK(c.refinement_iterations == 5);
  CHECK_FALSE(c.fallback_enabled);
  const auto back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
  CHECK(to_json(back) == to_json(c));
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"refinement_iterations": "many"})")), InvalidInput);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), InvalidInput);
}

TEST_CASE("config files and environment overrides") {
  testing::TempDir dir;
  std::ofstream(dir.path() / "c.json") << R"({"provider": "ollama"})";
  auto c = load_config(dir.path() / "c.json");
  apply_env_overrides(c, [](std::string_view name) -> std::optional<std::string> {
    if (name == "FORGE_MODEL") return "llama-x";
    if (name == "FORGE_BASE_URL") return "http://gpu:1234";
    return std::nullopt;
  });
  CHECK(c.active_profile().default_model == "llama-x");
  CHECK(c.active_profile().base_url == "http://gpu:1234");
  CHECK(c.profiles.at("groq").default_model == "llama-3.1-70b-versatile");
  std::ofstream(dir.path() / "bad.json") << "{";
  CHECK_THROWS_AS(load_config(dir.path() / "bad.json"), InvalidInput);
  CHECK_THROWS_AS(load_config(dir.path() / "missing.json"), IoError);
}

TEST_CASE("transition table") {
  using S = JobState;
  const std::vector<S> all{S::planning,   S::awaiting_refinement, S::awaiting_confirmation, S::generating,
                           S::documenting, S::done,               S::failed};
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      const bool forward = j == i + 1 && all[j] != S::failed;
      const bool fail = all[j] == S::failed && !is_terminal(all[i]);
      INFO(to_string(all[i]) << " -> " << to_string(all[j]));
      CHECK(transition_allowed(all[i], all[j]) == (forward || fail));
    }
  }
}

TEST_CASE("random call sequences never reach a forbidden state") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> op(0, 6);
  PackageTree tree;
  tree.put("a.py", "x = 1\n");
  for (int run = 0; run < 300; ++run) {
    Job job("j", {}, "/tmp/unused");
    std::vector<JobState> seen{job.state()};
    for (int step = 0; step < 12; ++step) {
      const auto before = job.state();
      const auto target = static_cast<JobState>(op(rng));
      if (std::bernoulli_distribution(0.3)(rng)) job.set_tree(tree, false);
      try {
        job.transition(target, "step");
        REQUIRE(transition_allowed(before, target));
      } catch (const InvalidTransition&) {
        REQUIRE(job.state() == before);
      }
      seen.push_back(job.state());
    }
    for (std::size_t i = 1; i < seen.size(); ++i) {
      if (seen[i] != seen[i - 1]) REQUIRE(transition_allowed(seen[i - 1], seen[i]));
    }
    const auto events = job.snapshot().events;
    for (std::size_t i = 0; i < events.size(); ++i) REQUIRE(events[i].seq == i);
  }
}

TEST_CASE("documenting needs a tree; failures record the cause") {
  Job job("j", {}, "/tmp/unused");
  job.transition(JobState::awaiting_refinement, "x");
  job.transition(JobState::awaiting_confirmation, "x");
  job.transition(JobState::generating, "x");
  CHECK_THROWS_AS(job.transition(JobState::documenting, "x"), InvalidTransition);
  job.fail("generating", "boom");
  const auto s = job.snapshot();
  CHECK(s.state == JobState::failed);
  CHECK(s.error == "generating: boom");
  CHECK(s.events.back().phase == "failed");
  CHECK_THROWS_AS(job.transition(JobState::failed, "again"), InvalidTransition);
}

TEST_CASE("busy flag and event waiting") {
  Job job("j", {}, "/tmp/unused");
  CHECK(job.try_acquire());
  CHECK_FALSE(job.try_acquire());
  job.release();
  CHECK(job.try_acquire());
  job.release();
  const auto n = job.event_count();
  CHECK_FALSE(job.wait_for_events(n, std::chrono::milliseconds(10)));
  std::thread t([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    job.log("planning", "hello");
  });
  CHECK(job.wait_for_events(n, std::chrono::seconds(5)));
  t.join();
  CHECK(job.events_since(n).front().message == "hello");
}

TEST_CASE("timestamps are UTC ISO-8601 with milliseconds") {
  const auto t = std::chrono::system_clock::time_point(std::chrono::milliseconds(86400123));
  CHECK(utc_timestamp(t) == "1970-01-02T00:00:00.123Z");
}

TEST_CASE("workspace confines paths") {
  testing::TempDir dir;
  const auto id = new_job_id();
  CHECK(id.size() == 16);
  CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(new_job_id() != id);
  Workspace ws(dir.path(), id);
  CHECK(fs::is_directory(ws.dir()));
  const auto p = ws.write_file("a/b.txt", "hi");
  CHECK(slurp(p) == "hi");
  CHECK_THROWS_AS(ws.resolve("../escape"), InvalidPath);
  CHECK_THROWS_AS(ws.resolve("/etc/passwd"), InvalidPath);
  CHECK_THROWS_AS(ws.record(dir.path() / "other"), InvalidPath);
  CHECK(ws.written().size() == 1);
  CHECK(path_within(dir.path(), dir.path() / "x" / ".." / "y"));
  CHECK_FALSE(path_within(dir.path() / "a", dir.path() / "ab"));
}

TEST_CASE("feature arguments") {
  const auto f = parse_feature_arg("Data Loader: load CSV data");
  CHECK(f.name == "Data Loader");
  CHECK(f.raw_description == "load CSV data");
  const auto bare = parse_feature_arg("Plotter");
  CHECK(bare.name == "Plotter");
  CHECK(bare.raw_description == "Plotter");
}

TEST_CASE("full scripted pipeline") {
  testing::TempDir dir;
  const auto r = run_pipeline(testing::scripted_config(dir.path()), mypkg_request(), batch());
  REQUIRE(r.state == JobState::done);
  CHECK_FALSE(r.error);
  CHECK(r.workspace == dir.path() / r.job_id);
  for (const char* f : {"job.json", "plan.json", "context.txt", "DOCUMENTATION.md", "package.zip", "report.json"}) {
    INFO(f);
    CHECK(fs::exists(r.workspace / f));
  }
  CHECK(fs::exists(r.workspace / "package" / "mypkg" / "data_loader.py"));

  const auto entries = testing::read_zip(slurp(r.zip_path));
  std::vector<std::string> names;
  for (const auto& e : entries) names.push_back(e.name);
  CHECK(std::find(names.begin(), names.end(), "DOCUMENTATION.md") != names.end());
  CHECK(std::find(names.begin(), names.end(), "mypkg/data_loader.py") != names.end());

  const auto report = r.report;
  CHECK(report["used_fallback"] == false);
  CHECK(report["quality_history"].size() == 3);
  CHECK(report["codebleu"]["reference"] == "fallback scaffold");
  CHECK(report["codebleu"]["aggregate"]["composite"].get<double>() > 0.0);
  CHECK(report["docs"]["flesch"].is_number());
  CHECK(report["structure"]["nodes"].size() >= 3);

  const auto plan = planner::load_plan(r.workspace / "plan.json");
  CHECK(plan.enhanced_description == "A package that loads CSV data into Python lists of rows.");
  CHECK(plan.context_prompt.has_value());

  const auto job = nlohmann::json::parse(slurp(r.workspace / "job.json"));
  CHECK(job["state"] == "done");
}

TEST_CASE("garbage generation falls back to the scaffold") {
  testing::TempDir dir;
  auto c = testing::scripted_config(dir.path(), testing::pipeline_script("Sorry, no files today."));
  const auto r = run_pipeline(c, mypkg_request(), batch());
  REQUIRE(r.state == JobState::done);
  CHECK(r.report["used_fallback"] == true);
  CHECK(r.report["fallback_paths"].size() == 9);
  CHECK(r.report["codebleu"]["aggregate"]["composite"].get<double>() == Catch::Approx(1.0));

  c.fallback_enabled = false;
  const auto strict = run_pipeline(c, mypkg_request(), batch());
  CHECK(strict.state == JobState::failed);
  REQUIRE(strict.error);
  CHECK(strict.error->find("generating: model reply contained no file blocks") == 0);
  CHECK_FALSE(fs::exists(strict.workspace / "package.zip"));
  CHECK(fs::exists(strict.workspace / "plan.json"));
}

TEST_CASE("partial generation is completed from the scaffold") {
  testing::TempDir dir;
  const std::string reply = "### FILE: mypkg/data_loader.py\n```\ndef load(p):\n    return []\n```\n";
  const auto r = run_pipeline(testing::scripted_config(dir.path(), testing::pipeline_script(reply)),
                              mypkg_request(), batch());
  REQUIRE(r.state == JobState::done);
  CHECK(r.report["used_fallback"] == true);
  CHECK(r.report["fallback_paths"].size() == 8);
  CHECK(slurp(r.workspace / "package" / "mypkg" / "data_loader.py") == "def load(p):\n    return []");
}

TEST_CASE("runs are byte-for-byte deterministic") {
  testing::TempDir a, b;
  const auto ra = run_pipeline(testing::scripted_config(a.path()), mypkg_request(), batch());
  const auto rb = run_pipeline(testing::scripted_config(b.path()), mypkg_request(), batch());
  REQUIRE(ra.state == JobState::done);
  REQUIRE(rb.state == JobState::done);
  CHECK(slurp(ra.zip_path) == slurp(rb.zip_path));
  CHECK(slurp(ra.doc_path) == slurp(rb.doc_path));
  CHECK(slurp(ra.workspace / "report.json") == slurp(rb.workspace / "report.json"));
}

TEST_CASE("interactive confirmation sees the planned files") {
  testing::TempDir dir;
  std::vector<std::string> proposed;
  RunOptions o;
  o.confirm = [&](const std::vector<std::string>& files) {
    proposed = files;
    return false;
  };
  const auto r = run_pipeline(testing::scripted_config(dir.path()), mypkg_request(), o);
  CHECK(r.state == JobState::failed);
  CHECK(r.error == "awaiting_confirmation: file structure was not confirmed");
  CHECK(proposed.size() == 9);
  CHECK_FALSE(fs::exists(r.workspace / "package"));
  CHECK_THROWS_AS(run_pipeline(testing::scripted_config(dir.path()), mypkg_request(), RunOptions{}), InvalidInput);
}

TEST_CASE("phase by phase with refinement feedback") {
  testing::TempDir dir;
  auto engine = Engine::from_config(testing::scripted_config(dir.path()));
  auto job = engine->create_job(mypkg_request());
  CHECK(job->state() == JobState::planning);
  CHECK_THROWS_AS(engine->approve_plan(*job), InvalidTransition);
  engine->plan(*job);
  REQUIRE(job->state() == JobState::awaiting_refinement);
  CHECK(job->snapshot().quality_history.size() == 3);
  CHECK_THROWS_AS(engine->refine(*job, "   "), InvalidInput);
  engine->refine(*job, "mention pandas support");
  CHECK(job->state() == JobState::awaiting_refinement);
  CHECK_THROWS_AS(engine->build(*job), InvalidTransition);
  engine->approve_plan(*job);
  CHECK(job->snapshot().proposed_files == planned_files(job->plan()));
  engine->confirm_files(*job);
  engine->build(*job);
  CHECK(job->state() == JobState::done);
  CHECK(job->snapshot().doc.has_value());
}

TEST_CASE("request validation happens before any model call") {
  testing::TempDir dir;
  auto engine = Engine::from_config(testing::scripted_config(dir.path()));
  auto bad = mypkg_request();
  bad.description = "  ";
  CHECK_THROWS_AS(engine->create_job(bad), InvalidInput);
  bad = mypkg_request();
  bad.name = "My-Pkg";
  CHECK_THROWS_AS(engine->create_job(bad), planner::InvalidPlan);
  bad = mypkg_request();
  bad.features.push_back(parse_feature_arg("data loader"));
  CHECK_THROWS_AS(engine->create_job(bad), generator::InvalidFeatureName);
  CHECK(engine->gateway().scripted("scripted")->calls() == 0);
}

TEST_CASE("transient provider failures are retried inside the pipeline") {
  testing::TempDir dir;
  auto script = testing::pipeline_script();
  script["failure_mask"] = {true, false, true, true, false};
  const auto r = run_pipeline(testing::scripted_config(dir.path(), script), mypkg_request(), batch());
  CHECK(r.state == JobState::done);
}

TEST_CASE("exhausted retries fail the job in the planning phase") {
  testing::TempDir dir;
  auto script = testing::pipeline_script();
  script["failure_mask"] = std::vector<bool>(20, true);
  auto c = testing::scripted_config(dir.path(), script);
  c.retry.max_retries = 2;
  const auto r = run_pipeline(c, mypkg_request(), batch());
  CHECK(r.state == JobState::failed);
  REQUIRE(r.error);
  CHECK(r.error->find("planning: gave up after 3 attempts") == 0);
}

TEST_CASE("concurrent jobs write only inside their own directories") {
  testing::TempDir dir;
  const auto engine = Engine::from_config(testing::scripted_config(dir.path()));
  PipelineResult ra, rb;
  auto other = mypkg_request();
  other.name = "otherpkg";
  std::thread ta([&] { ra = engine->run_pipeline(mypkg_request(), batch()); });
  std::thread tb([&] { rb = engine->run_pipeline(other, batch()); });
  ta.join();
  tb.join();
  REQUIRE(ra.state == JobState::done);
  REQUIRE(rb.state == JobState::done);
  CHECK(ra.job_id != rb.job_id);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path())) {
    if (!e.is_regular_file()) continue;
    ++files;
    const bool in_a = path_within(ra.workspace, e.path());
    const bool in_b = path_within(rb.workspace, e.path());
    INFO(e.path());
    CHECK(in_a != in_b);
  }
  CHECK(files > 20);
  CHECK(fs::exists(ra.workspace / "package" / "mypkg"));
  CHECK_FALSE(fs::exists(ra.workspace / "package" / "otherpkg"));
  CHECK(fs::exists(rb.workspace / "package" / "otherpkg"));
}

TEST_CASE("model reviews are added to the report when enabled") {
  testing::TempDir dir;
  auto c = testing::scripted_config(dir.path());
  c.model_review = true;
  const auto r = run_pipeline(c, mypkg_request(), batch());
  REQUIRE(r.state == JobState::done);
  REQUIRE(r.report.contains("reviews"));
  CHECK(r.report["reviews"].size() == 3);
}
