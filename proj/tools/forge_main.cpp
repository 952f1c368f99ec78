#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "forge/common/package_tree.hpp"
#include "forge/common/text.hpp"
#include "forge/documenter/api.hpp"
#include "forge/documenter/docs.hpp"
#include "forge/documenter/markdown.hpp"
#include "forge/evaluator/codebleu.hpp"
#include "forge/evaluator/doc_metrics.hpp"
#include "forge/gateway/gateway.hpp"
#include "forge/orchestrator/pipeline.hpp"
#include "forge/orchestrator/server.hpp"
#include "forge/planner/plan.hpp"
#include "forge/source/dataflow.hpp"
#include "forge/source/metrics.hpp"
#include "forge/source/structure.hpp"

namespace fs = std::filesystem;
using namespace forge;
using namespace forge::orchestrator;
using nlohmann::ordered_json;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string provider;
  std::string model;
  std::string script_path;
  std::string workspace;
  bool no_context = false;
  bool no_fallback = false;
  int iterations = 0;
  bool verbose = false;
};

struct PackageFlags {
  std::string name;
  std::string description;
  std::vector<std::string> features;
};

void add_common(CLI::App& cmd, CommonFlags& f) {
  cmd.add_option("--config", f.config_path, "Engine config (JSON)");
  cmd.add_option("--provider", f.provider, "Provider profile: groq, gemini, ollama, scripted or a configured name");
  cmd.add_option("--model", f.model, "Model id for the active profile");
  cmd.add_option("--script", f.script_path, "Scripted provider behaviour (JSON); selects the scripted profile");
  cmd.add_option("--workspace", f.workspace, "Workspace root for job directories");
  cmd.add_option("--iterations", f.iterations, "Refinement iterations")->check(CLI::PositiveNumber);
  cmd.add_flag("--no-context", f.no_context, "Generate from enhanced descriptions instead of the context prompt");
  cmd.add_flag("--no-fallback", f.no_fallback, "Fail instead of merging the fallback scaffold");
  cmd.add_flag("-v,--verbose", f.verbose, "Debug logging");
}

void add_package(CLI::App& cmd, PackageFlags& p) {
  cmd.add_option("--name", p.name, "Package name")->required();
  cmd.add_option("--description", p.description, "Package description")->required();
  cmd.add_option("--feature", p.features, "Feature as 'Name: description' (repeatable)");
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open");
  auto j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw InvalidInput("not valid JSON: " + path.string());
  return j;
}

EngineConfig build_config(const CommonFlags& f) {
  EngineConfig c = f.config_path.empty() ? default_config() : load_config(f.config_path);
  if (!f.script_path.empty()) {
    c.script = read_json_file(f.script_path);
    c.provider = "scripted";
  }
  if (!f.provider.empty()) c.provider = f.provider;
  apply_env_overrides(c, &gateway::Gateway::process_env);
  if (!f.model.empty()) {
    auto it = c.profiles.find(c.provider);
    if (it != c.profiles.end()) it->second.default_model = f.model;
  }
  if (!f.workspace.empty()) c.workspace_root = f.workspace;
  if (f.iterations > 0) c.refinement_iterations = f.iterations;
  if (f.no_context) c.use_context = false;
  if (f.no_fallback) c.fallback_enabled = false;
  return c;
}

PackageRequest build_request(const PackageFlags& p) {
  PackageRequest r;
  r.name = p.name;
  r.description = p.description;
  for (const auto& f : p.features) r.features.push_back(parse_feature_arg(f));
  return r;
}

bool ask_confirmation(const std::vector<std::string>& files) {
  std::cout << "Proposed files:\n";
  for (const auto& f : files) std::cout << "  " << f << "\n";
  std::cout << "Create these files? [y/N] " << std::flush;
  std::string answer;
  if (!std::getline(std::cin, answer)) return false;
  return answer == "y" || answer == "Y" || answer == "yes";
}

void copy_file_to(const fs::path& from, const fs::path& to) {
  if (to.has_parent_path()) fs::create_directories(to.parent_path());
  fs::copy_file(from, to, fs::copy_options::overwrite_existing);
}

int cmd_plan(const CommonFlags& common, const PackageFlags& pkg, const std::string& out) {
  auto engine = Engine::from_config(build_config(common));
  auto job = engine->create_job(build_request(pkg));
  engine->plan(*job);
  const auto snap = job->snapshot();
  if (snap.state == JobState::failed) {
    spdlog::error("planning failed: {}", snap.error.value_or("unknown error"));
    return 1;
  }
  if (!out.empty()) {
    const auto files = planner::persist_plan(snap.plan, out);
    std::cout << files.json_path.string() << "\n" << files.text_path.string() << "\n";
  } else {
    std::cout << (snap.workspace / "plan.json").string() << "\n" << (snap.workspace / "context.txt").string() << "\n";
  }
  for (std::size_t i = 0; i < snap.quality_history.size(); ++i) {
    spdlog::info("iterate {}: Q = {:.2f}", i, snap.quality_history[i].overall);
  }
  return 0;
}

int cmd_generate(const CommonFlags& common, const PackageFlags& pkg, bool non_interactive, const std::string& out,
                 const std::string& zip) {
  auto engine = Engine::from_config(build_config(common));
  RunOptions options;
  options.non_interactive = non_interactive;
  options.confirm = ask_confirmation;
  const auto result = engine->run_pipeline(build_request(pkg), options);
  std::cout << "job " << result.job_id << ": " << to_string(result.state) << "\n";
  std::cout << "workspace: " << result.workspace.string() << "\n";
  if (result.state != JobState::done) {
    std::cerr << "error: " << result.error.value_or("unknown error") << "\n";
    return 1;
  }
  if (!out.empty()) {
    fs::create_directories(out);
    fs::copy(result.workspace / "package", out, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    copy_file_to(result.doc_path, fs::path(out) / "DOCUMENTATION.md");
    std::cout << "package: " << out << "\n";
  }
  if (!zip.empty()) copy_file_to(result.zip_path, zip);
  std::cout << "zip: " << (zip.empty() ? result.zip_path.string() : zip) << "\n";
  std::cout << "documentation: " << result.doc_path.string() << "\n";
  const auto& agg = result.report["codebleu"]["aggregate"];
  std::printf("CodeBLEU vs fallback scaffold: %.4f\n", agg.value("composite", 0.0));
  return 0;
}

int cmd_docs(const CommonFlags& common, const std::string& package_dir, const std::string& name,
             const std::string& plan_path, const std::string& out) {
  auto engine = Engine::from_config(build_config(common));
  const PackageTree tree = load_tree_from_directory(package_dir);
  planner::PackagePlan plan;
  if (!plan_path.empty()) {
    plan = planner::load_plan(plan_path);
  } else {
    plan.package_name = name.empty() ? fs::absolute(package_dir).lexically_normal().filename().string() : name;
  }
  gateway::ModelAccess model{engine->gateway(), engine->config().active_profile(), engine->config().retry,
                             engine->config().temperature, engine->config().max_tokens};
  const auto api = documenter::extract_api(tree);
  for (const auto& d : api.diagnostics) spdlog::warn("{}", d);
  const auto examples = documenter::synthesize_examples(model, engine->prompts(), tree, plan.package_name,
                                                        api.symbols, engine->config().format_retries);
  const auto bundle = documenter::build_documentation(tree, plan, api.symbols,
                                                      documenter::extract_relationships(tree), examples,
                                                      {engine->config().license});
  const auto text = documenter::render_documentation(bundle);
  for (const auto& f : documenter::validate_markdown(text, &tree)) {
    spdlog::warn("line {}: {} {}", f.line, documenter::to_string(f.rule), f.detail);
  }
  const fs::path target = out.empty() ? fs::path(package_dir) / "DOCUMENTATION.md" : fs::path(out);
  std::ofstream o(target, std::ios::binary | std::ios::trunc);
  if (!o) throw IoError(target, "cannot open for writing");
  o << text;
  std::cout << target.string() << "\n";
  return 0;
}

std::string heading_text(std::string_view line) {
  auto t = text::trim(line);
  while (!t.empty() && t.front() == '#') t.remove_prefix(1);
  return std::string(text::trim(t));
}

documenter::DocBundle bundle_from_markdown(const std::string& markdown) {
  documenter::DocBundle b;
  documenter::FenceTracker fences;
  documenter::DocSection* current = nullptr;
  for (const auto line : text::split_lines(markdown)) {
    const auto role = fences.feed(line);
    if (role == documenter::FenceTracker::Role::text) {
      if (const auto level = documenter::heading_level(line)) {
        if (*level == 1) {
          b.source_package = heading_text(line);
          continue;
        }
        if (*level == 2) {
          b.sections.push_back({heading_text(line), ""});
          current = &b.sections.back();
          continue;
        }
      }
    }
    if (current != nullptr) {
      current->body += line;
      current->body += '\n';
    }
  }
  return b;
}

ordered_json bleu_json(const evaluator::CodeBleuReport& r) {
  return {{"ngram", r.ngram},           {"weighted_ngram", r.weighted_ngram},
          {"syntax", r.syntax},         {"dataflow", r.dataflow},
          {"token_match", r.token_match}, {"identifier_match", r.identifier_match},
          {"composite", r.composite}};
}

int cmd_eval(const std::string& candidate, const std::string& reference, const std::string& docs_path,
             double min_composite, bool json_only, const std::vector<double>& weights, double keyword_weight) {
  ordered_json out;
  double composite = -1.0;
  if (!candidate.empty()) {
    if (reference.empty()) throw InvalidInput("--candidate needs --reference");
    evaluator::CodeBleuOptions options;
    if (!weights.empty()) {
      if (weights.size() != 4) throw InvalidInput("--weights takes four values");
      options.weights = {weights[0], weights[1], weights[2], weights[3]};
    }
    options.keyword_weight = keyword_weight;
    evaluator::PackageCodeBleu report;
    if (fs::is_directory(candidate)) {
      report = evaluator::codebleu_package(load_tree_from_directory(candidate), load_tree_from_directory(reference),
                                           options);
    } else {
      auto read = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw IoError(p, "cannot open");
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
      };
      report.aggregate = evaluator::codebleu(read(candidate), read(reference), options);
      report.diagnostics = report.aggregate.diagnostics;
    }
    composite = report.aggregate.composite;
    auto j = bleu_json(report.aggregate);
    ordered_json files = ordered_json::object();
    for (const auto& [path, r] : report.files) files[path] = bleu_json(r);
    j["files"] = files;
    j["diagnostics"] = report.diagnostics;
    out["codebleu"] = j;
  }
  if (!docs_path.empty()) {
    std::ifstream in(docs_path, std::ios::binary);
    if (!in) throw IoError(docs_path, "cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto m = evaluator::doc_metrics(bundle_from_markdown(ss.str()));
    ordered_json coherence = ordered_json::array();
    for (const auto& b : m.coherence) coherence.push_back({{"boundary", {b.first, b.first + 1}}, {"score", b.score}});
    out["docs"] = {{"flesch", m.flesch},
                   {"consistency", m.consistency},
                   {"cosine_similarity", m.cosine_similarity},
                   {"coherence", coherence},
                   {"mean_coherence", m.mean_coherence},
                   {"diagnostics", m.diagnostics}};
  }
  if (out.empty()) throw InvalidInput("nothing to evaluate: pass --candidate/--reference and/or --docs");

  std::cout << out.dump(2) << "\n";
  if (!json_only) {
    std::cerr << "\n";
    if (out.contains("codebleu")) {
      for (const char* key : {"ngram", "weighted_ngram", "syntax", "dataflow", "token_match", "identifier_match",
                              "composite"}) {
        std::fprintf(stderr, "%-18s %8.4f\n", key, out["codebleu"][key].get<double>());
      }
    }
    if (out.contains("docs")) {
      for (const char* key : {"flesch", "consistency", "cosine_similarity", "mean_coherence"}) {
        std::fprintf(stderr, "%-18s %8.4f\n", key, out["docs"][key].get<double>());
      }
    }
  }
  if (min_composite >= 0.0 && composite >= 0.0 && composite < min_composite) {
    std::fprintf(stderr, "composite %.4f is below --min-composite %.4f\n", composite, min_composite);
    return 2;
  }
  return 0;
}

int cmd_inspect(const std::string& file, bool show_tree, bool show_dataflow) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError(file, "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string src = ss.str();
  const auto tree = source::parse(src);
  const auto metrics = source::code_metrics(src);
  std::printf("lines %zu, comment density %.3f, cyclomatic complexity %zu, syntax errors %zu\n", metrics.line_count,
              metrics.comment_density, metrics.cyclomatic_complexity, tree.error_count());
  if (show_tree) std::cout << tree.dump();
  if (show_dataflow) {
    const auto g = source::def_use(tree);
    for (const auto& e : g.edges) {
      std::printf("%s  %d:%d -> %d:%d  [scope %d, var %d, def %d]\n", e.variable.c_str(), e.def_site.line,
                  e.def_site.column, e.use_site.line, e.use_site.column, e.scope, e.var_index, e.def_occurrence);
    }
    std::printf("unresolved uses: %zu\n", g.unresolved_uses);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: turn a package description into a Python package"};
  app.require_subcommand(1);

  CommonFlags common;
  PackageFlags pkg;

  auto* plan = app.add_subcommand("plan", "Enhance and refine the descriptions, write plan.json and context.txt");
  add_common(*plan, common);
  add_package(*plan, pkg);
  std::string plan_out;
  plan->add_option("--out", plan_out, "Directory for plan.json and context.txt");

  auto* generate = app.add_subcommand("generate", "Run the full pipeline");
  add_common(*generate, common);
  add_package(*generate, pkg);
  bool non_interactive = false;
  std::string gen_out;
  std::string gen_zip;
  generate->add_flag("--non-interactive", non_interactive, "Approve the proposed file list without asking");
  generate->add_option("--out", gen_out, "Copy the package and DOCUMENTATION.md here");
  generate->add_option("--zip", gen_zip, "Copy package.zip here");

  auto* docs = app.add_subcommand("docs", "Write DOCUMENTATION.md for a package directory");
  add_common(*docs, common);
  std::string docs_package;
  std::string docs_name;
  std::string docs_plan;
  std::string docs_out;
  docs->add_option("package", docs_package, "Package directory")->required()->check(CLI::ExistingDirectory);
  docs->add_option("--name", docs_name, "Package name (default: directory name)");
  docs->add_option("--plan", docs_plan, "plan.json to take the name and features from")->check(CLI::ExistingFile);
  docs->add_option("--out", docs_out, "Output path (default: <package>/DOCUMENTATION.md)");

  auto* eval = app.add_subcommand("eval", "Score a package against a reference and/or a documentation file");
  std::string candidate;
  std::string reference;
  std::string eval_docs;
  double min_composite = -1.0;
  bool json_only = false;
  std::vector<double> weights;
  double keyword_weight = 5.0;
  eval->add_option("--candidate", candidate, "Candidate package directory or .py file")->check(CLI::ExistingPath);
  eval->add_option("--reference", reference, "Reference package directory or .py file")->check(CLI::ExistingPath);
  eval->add_option("--docs", eval_docs, "Markdown documentation to score")->check(CLI::ExistingFile);
  eval->add_option("--min-composite", min_composite, "Exit with status 2 when the composite falls below this");
  eval->add_option("--weights", weights, "alpha beta gamma delta")->expected(4);
  eval->add_option("--keyword-weight", keyword_weight, "Weight of keyword-led n-grams");
  eval->add_flag("--json", json_only, "JSON only, no table");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP job API");
  add_common(*serve, common);
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");

  auto* inspect = app.add_subcommand("inspect", "Parse a Python file and print metrics");
  std::string inspect_file;
  bool show_tree = false;
  bool show_dataflow = false;
  inspect->add_option("file", inspect_file, "Python source")->required()->check(CLI::ExistingFile);
  inspect->add_flag("--tree", show_tree, "Print the syntax tree");
  inspect->add_flag("--dataflow", show_dataflow, "Print def-use edges");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(common.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (plan->parsed()) return cmd_plan(common, pkg, plan_out);
    if (generate->parsed()) return cmd_generate(common, pkg, non_interactive, gen_out, gen_zip);
    if (docs->parsed()) return cmd_docs(common, docs_package, docs_name, docs_plan, docs_out);
    if (eval->parsed()) {
      return cmd_eval(candidate, reference, eval_docs, min_composite, json_only, weights, keyword_weight);
    }
    if (inspect->parsed()) return cmd_inspect(inspect_file, show_tree, show_dataflow);
    if (serve->parsed()) {
      auto engine = Engine::from_config(build_config(common));
      JobManager jobs(*engine);
      ApiServer server(jobs);
      spdlog::info("serving on http://{}:{}", host, port);
      return server.listen(host, port) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
