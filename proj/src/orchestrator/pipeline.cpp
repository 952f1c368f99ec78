#include "forge/orchestrator/pipeline.hpp"

#include <fstream>
#include <set>

#include "forge/common/text.hpp"
#include "forge/documenter/api.hpp"
#include "forge/documenter/docs.hpp"
#include "forge/documenter/markdown.hpp"
#include "forge/evaluator/codebleu.hpp"
#include "forge/evaluator/doc_metrics.hpp"
#include "forge/evaluator/review.hpp"
#include "forge/generator/fallback.hpp"
#include "forge/generator/generate.hpp"
#include "forge/generator/wire_format.hpp"
#include "forge/generator/zip.hpp"
#include "forge/planner/refine.hpp"
#include "forge/source/structure.hpp"

namespace forge::orchestrator {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

planner::FeatureSpec parse_feature_arg(std::string_view arg) {
  planner::FeatureSpec f;
  const auto colon = arg.find(':');
  if (colon == std::string_view::npos) {
    f.name = std::string(text::trim(arg));
    f.raw_description = f.name;
  } else {
    f.name = std::string(text::trim(arg.substr(0, colon)));
    f.raw_description = std::string(text::trim(arg.substr(colon + 1)));
    if (f.raw_description.empty()) f.raw_description = f.name;
  }
  if (f.name.empty()) throw InvalidInput("feature '" + std::string(arg) + "' has no name");
  return f;
}

std::vector<std::string> planned_files(const planner::PackagePlan& plan) {
  std::set<std::string> paths;
  for (auto& p : generator::base_file_paths(plan.package_name)) paths.insert(std::move(p));
  for (const auto& f : plan.features) {
    for (auto& p : generator::feature_file_paths(plan.package_name, f.name)) paths.insert(std::move(p));
  }
  return {paths.begin(), paths.end()};
}

Engine::Engine(EngineConfig config, std::shared_ptr<gateway::Gateway> gateway, PromptLibrary prompts)
    : config_(std::move(config)), gateway_(std::move(gateway)), prompts_(std::move(prompts)) {
  config_.validate();
}

std::unique_ptr<Engine> Engine::from_config(EngineConfig config) {
  auto gw = std::make_shared<gateway::Gateway>();
  if (config.script) {
    std::shared_ptr<gateway::ScriptedProvider> provider;
    try {
      provider = std::make_shared<gateway::ScriptedProvider>(gateway::ScriptedProvider::behavior_from_json(*config.script));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("bad provider script: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw InvalidInput(std::string("bad provider script: ") + e.what());
    }
    for (const auto& [name, profile] : config.profiles) {
      if (profile.kind == gateway::ProviderKind::scripted) gw->register_scripted(name, provider);
    }
  }
  PromptLibrary prompts =
      config.prompt_dir ? PromptLibrary(*config.prompt_dir) : PromptLibrary::from_default_location();
  return std::make_unique<Engine>(std::move(config), std::move(gw), std::move(prompts));
}

gateway::ModelAccess Engine::writer() const {
  return {*gateway_, config_.active_profile(), config_.retry, config_.temperature, config_.max_tokens};
}

gateway::ModelAccess Engine::judge() const {
  return {*gateway_, config_.judge_profile(), config_.retry, config_.judge_temperature, config_.max_tokens};
}

std::shared_ptr<Job> Engine::create_job(const PackageRequest& request) const {
  planner::PackagePlan plan;
  plan.package_name = std::string(text::trim(request.name));
  plan.raw_description = std::string(text::trim(request.description));
  plan.features = request.features;
  plan.code_template = request.code_template;
  if (plan.raw_description.empty()) throw InvalidInput("package description is empty");
  planner::validate_plan(plan, /*require_features=*/false);
  // Feature names must map to distinct module files before any model call.
  generator::fallback_for(plan);

  std::string id;
  for (;;) {
    id = new_job_id();
    if (!fs::exists(config_.workspace_root / id)) break;
  }
  Workspace ws(config_.workspace_root, id);
  auto job = std::make_shared<Job>(id, std::move(plan), ws.dir());
  for (const auto& w : planner::plan_warnings(job->plan())) job->log("planning", "warning: " + w);
  persist_job(*job);
  return job;
}

template <typename F>
void Engine::guarded(Job& job, const char* phase, F&& body) const {
  try {
    body();
  } catch (const InvalidTransition&) {
    throw;
  } catch (const std::exception& e) {
    job.fail(phase, e.what());
  }
  persist_job(job);
}

void Engine::persist_job(const Job& job) const {
  Workspace ws(config_.workspace_root, job.id());
  ws.write_file("job.json", to_json(job.snapshot()).dump(2) + "\n");
}

namespace {

void require_state(const Job& job, JobState expected) {
  const JobState s = job.state();
  if (s != expected) {
    throw InvalidTransition("job " + job.id() + " is " + std::string(to_string(s)) + ", expected " +
                            std::string(to_string(expected)));
  }
}

std::string describe(const planner::QualityScore& q) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", q.overall);
  return buf;
}

void record_plan(Workspace& ws, const planner::PackagePlan& plan) {
  const auto files = planner::persist_plan(plan, ws.dir());
  ws.record(files.json_path);
  ws.record(files.text_path);
}

}  // namespace

void Engine::plan(Job& job) const {
  require_state(job, JobState::planning);
  guarded(job, "planning", [&] {
    auto plan = job.plan();
    if (!plan.features.empty()) {
      job.log("planning", "enhancing " + std::to_string(plan.features.size()) + " feature descriptions");
      plan = planner::enhance_features(writer(), prompts_, plan, config_.format_retries);
    }
    planner::RefinementOptions options;
    options.iterations = config_.refinement_iterations;
    options.judge_max_retries = config_.format_retries;
    const auto outcome = planner::refine_description({judge(), writer()}, prompts_, plan, options);
    plan = outcome.plan;
    job.log("planning", "refined description over " + std::to_string(outcome.quality_history.size()) +
                            " iterations, kept iterate " + std::to_string(outcome.chosen_index) + " (Q = " +
                            describe(outcome.quality_history[outcome.chosen_index]) + ")");
    plan.context_prompt = planner::build_context_prompt(plan);
    Workspace ws(config_.workspace_root, job.id());
    record_plan(ws, plan);
    job.set_plan(plan);
    job.set_quality_history(outcome.quality_history);
    job.set_proposed_files(planned_files(plan));
    job.transition(JobState::awaiting_refinement, "plan ready for review");
  });
}

void Engine::refine(Job& job, const std::string& feedback) const {
  require_state(job, JobState::awaiting_refinement);
  if (text::trim(feedback).empty()) throw InvalidInput("feedback is empty");
  guarded(job, "planning", [&] {
    job.log("awaiting_refinement", "refining with user feedback");
    planner::RefinementOptions options;
    options.iterations = config_.refinement_iterations;
    options.judge_max_retries = config_.format_retries;
    options.feedback = feedback;
    const auto outcome = planner::refine_description({judge(), writer()}, prompts_, job.plan(), options);
    auto plan = outcome.plan;
    plan.context_prompt = planner::build_context_prompt(plan);
    Workspace ws(config_.workspace_root, job.id());
    record_plan(ws, plan);
    job.set_plan(plan);
    job.set_quality_history(outcome.quality_history);
    job.log("awaiting_refinement",
            "refinement kept iterate " + std::to_string(outcome.chosen_index) + " (Q = " +
                describe(outcome.quality_history[outcome.chosen_index]) + ")");
  });
}

void Engine::approve_plan(Job& job) const {
  require_state(job, JobState::awaiting_refinement);
  const auto files = planned_files(job.plan());
  job.set_proposed_files(files);
  job.transition(JobState::awaiting_confirmation,
                 "plan accepted; " + std::to_string(files.size()) + " files proposed");
  persist_job(job);
}

void Engine::confirm_files(Job& job) const {
  require_state(job, JobState::awaiting_confirmation);
  job.transition(JobState::generating, "file structure confirmed");
  persist_job(job);
}

namespace {

ordered_json codebleu_json(const evaluator::CodeBleuReport& r) {
  return {{"ngram", r.ngram},
          {"weighted_ngram", r.weighted_ngram},
          {"syntax", r.syntax},
          {"dataflow", r.dataflow},
          {"token_match", r.token_match},
          {"identifier_match", r.identifier_match},
          {"weights", {r.weights.alpha, r.weights.beta, r.weights.gamma, r.weights.delta}},
          {"composite", r.composite},
          {"candidate_tokens", r.candidate_tokens},
          {"reference_tokens", r.reference_tokens}};
}

ordered_json docs_json(const evaluator::DocMetricsReport& m) {
  ordered_json coherence = ordered_json::array();
  for (const auto& b : m.coherence) coherence.push_back({{"boundary", {b.first, b.first + 1}}, {"score", b.score}});
  return {{"flesch", m.flesch},
          {"consistency", m.consistency},
          {"cosine_similarity", m.cosine_similarity},
          {"coherence", coherence},
          {"mean_coherence", m.mean_coherence},
          {"diagnostics", m.diagnostics}};
}

ordered_json review_json(const evaluator::ReviewScore& r) {
  ordered_json scores = ordered_json::object();
  for (const auto& [name, value] : r.scores) scores[name] = value;
  return {{"rubric", evaluator::to_string(r.rubric)}, {"reviewer_model", r.reviewer_model}, {"scores", scores}};
}

}  // namespace

void Engine::build(Job& job) const {
  require_state(job, JobState::generating);
  guarded(job, "generating", [&] {
    Workspace ws(config_.workspace_root, job.id());
    const auto plan = job.plan();

    generator::GenerationOptions gen_options{config_.use_context, config_.fallback_enabled};
    auto gen = generator::generate_package(writer(), prompts_, plan, gen_options);
    job.log("generating", "model reply parsed into " + std::to_string(gen.tree.size() - gen.fallback_paths.size()) +
                              " files");
    std::size_t shown = 0;
    for (const auto& e : gen.events) {
      if (e.kind == generator::ParseEventKind::file_opened || e.kind == generator::ParseEventKind::file_closed) {
        continue;
      }
      if (++shown > 20) continue;
      job.log("generating", std::string(generator::to_string(e.kind)) + " at line " + std::to_string(e.line_number) +
                                (e.path ? " (" + *e.path + ")" : ""));
    }
    if (shown > 20) job.log("generating", std::to_string(shown - 20) + " more parse anomalies");
    if (gen.used_fallback) {
      job.log("generating", "used_fallback: merged " + std::to_string(gen.fallback_paths.size()) + " scaffold files");
    }
    for (const auto& p : generator::materialize(gen.tree, ws.resolve("package"))) ws.record(p);
    job.set_tree(gen.tree, gen.used_fallback);
    job.transition(JobState::documenting, "materialized " + std::to_string(gen.tree.size()) + " files");

    const auto api = documenter::extract_api(gen.tree);
    for (const auto& d : api.diagnostics) job.log("documenting", d);
    const auto relationships = documenter::extract_relationships(gen.tree);
    const auto examples =
        documenter::synthesize_examples(writer(), prompts_, gen.tree, plan.package_name, api.symbols,
                                        config_.format_retries);
    job.log("documenting", "usage examples from " + std::string(documenter::to_string(examples.source)));
    auto bundle = documenter::build_documentation(gen.tree, plan, api.symbols, relationships, examples,
                                                  {config_.license});
    const std::string doc_text = documenter::render_documentation(bundle);
    bundle.findings = documenter::validate_markdown(doc_text, &gen.tree);
    for (const auto& f : bundle.findings) {
      job.log("documenting", "lint " + std::string(documenter::to_string(f.rule)) + " at line " +
                                 std::to_string(f.line) + ": " + f.detail);
    }
    ws.write_file("DOCUMENTATION.md", doc_text);
    job.set_doc(bundle);

    ordered_json report;
    report["package_name"] = plan.package_name;
    report["used_fallback"] = gen.used_fallback;
    report["fallback_paths"] = gen.fallback_paths;
    report["files"] = gen.tree.paths();
    auto& events = report["parse_events"] = ordered_json::array();
    for (const auto& e : gen.events) {
      events.push_back({{"kind", generator::to_string(e.kind)},
                        {"path", e.path ? ordered_json(*e.path) : ordered_json()},
                        {"line", e.line_number}});
    }
    auto& history = report["quality_history"] = ordered_json::array();
    for (const auto& q : job.snapshot().quality_history) history.push_back(q.overall);

    const auto graph = source::build_structure_graph(gen.tree, config_.lambda);
    ordered_json nodes = ordered_json::array();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
      nodes.push_back({{"module", graph.nodes[i]}, {"complexity", graph.complexity[i]}});
    }
    ordered_json edges = ordered_json::array();
    for (const auto& e : graph.edges) {
      edges.push_back({{"from", graph.nodes[e.from]}, {"to", graph.nodes[e.to]}, {"weight", e.weight}});
    }
    report["structure"] = {{"lambda", graph.lambda},
                           {"objective", source::structure_objective(graph)},
                           {"nodes", nodes},
                           {"edges", edges},
                           {"diagnostics", graph.diagnostics}};

    const auto bleu = evaluator::codebleu_package(gen.tree, generator::fallback_for(plan));
    ordered_json per_file = ordered_json::object();
    for (const auto& [path, r] : bleu.files) per_file[path] = codebleu_json(r);
    report["codebleu"] = {{"reference", "fallback scaffold"},
                          {"aggregate", codebleu_json(bleu.aggregate)},
                          {"files", per_file},
                          {"diagnostics", bleu.diagnostics}};
    report["docs"] = docs_json(evaluator::doc_metrics(bundle));
    auto& lint = report["lint"] = ordered_json::array();
    for (const auto& f : bundle.findings) {
      lint.push_back({{"rule", documenter::to_string(f.rule)}, {"line", f.line}, {"detail", f.detail}});
    }
    if (config_.model_review) {
      auto& reviews = report["reviews"] = ordered_json::object();
      const std::pair<evaluator::Rubric, std::string> artifacts[] = {
          {evaluator::Rubric::package, generator::render_tree(gen.tree)},
          {evaluator::Rubric::documentation, doc_text},
          {evaluator::Rubric::enhancement, plan.context_prompt.value_or(plan.raw_description)}};
      for (const auto& [rubric, artifact] : artifacts) {
        try {
          reviews[std::string(evaluator::to_string(rubric))] =
              review_json(evaluator::model_review(judge(), prompts_, rubric, artifact, config_.format_retries));
        } catch (const std::exception& e) {
          job.log("documenting", "review '" + std::string(evaluator::to_string(rubric)) + "' skipped: " + e.what());
        }
      }
    }

    PackageTree full = gen.tree;
    full.put("DOCUMENTATION.md", doc_text);
    ws.write_file("package.zip", generator::zip_bytes(full));
    ws.write_file("report.json", report.dump(2) + "\n");
    job.transition(JobState::done, "package.zip, DOCUMENTATION.md and report.json written");
  });
}

PipelineResult Engine::result_of(const Job& job) const {
  PipelineResult r;
  const auto snap = job.snapshot();
  r.job_id = snap.id;
  r.state = snap.state;
  r.workspace = snap.workspace;
  r.error = snap.error;
  if (fs::exists(snap.workspace / "package.zip")) r.zip_path = snap.workspace / "package.zip";
  if (fs::exists(snap.workspace / "DOCUMENTATION.md")) r.doc_path = snap.workspace / "DOCUMENTATION.md";
  if (fs::exists(snap.workspace / "report.json")) {
    std::ifstream in(snap.workspace / "report.json");
    r.report = ordered_json::parse(in, nullptr, /*allow_exceptions=*/false);
  }
  return r;
}

PipelineResult Engine::run_pipeline(const PackageRequest& request, const RunOptions& options) const {
  if (!options.non_interactive && !options.confirm) {
    throw InvalidInput("interactive runs need a confirmation callback");
  }
  auto job = create_job(request);
  plan(*job);
  if (job->state() == JobState::awaiting_refinement) approve_plan(*job);
  if (job->state() == JobState::awaiting_confirmation) {
    const bool confirmed = options.non_interactive || options.confirm(job->snapshot().proposed_files);
    if (confirmed) {
      confirm_files(*job);
      build(*job);
    } else {
      job->fail("awaiting_confirmation", "file structure was not confirmed");
      persist_job(*job);
    }
  }
  return result_of(*job);
}

PipelineResult run_pipeline(const EngineConfig& config, const PackageRequest& request, const RunOptions& options) {
  return Engine::from_config(config)->run_pipeline(request, options);
}

}  // namespace forge::orchestrator
