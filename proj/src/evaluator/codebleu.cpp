#include "forge/evaluator/codebleu.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "forge/common/errors.hpp"

namespace forge::evaluator {

using source::Token;
using source::TokenKind;
using source::TokenStream;

void CodeBleuWeights::validate() const {
  for (const double w : {alpha, beta, gamma, delta}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("CodeBLEU weights must be finite and non-negative");
  }
  if (std::abs(alpha + beta + gamma + delta - 1.0) > 1e-9) throw InvalidInput("CodeBLEU weights must sum to 1");
}

std::vector<Token> significant_tokens(const TokenStream& stream) {
  std::vector<Token> out;
  for (const auto& t : stream.tokens) {
    if (!t.is_trivia()) out.push_back(t);
  }
  return out;
}

namespace {

using Counts = std::unordered_map<std::string, double>;

std::string gram_key(const std::vector<Token>& toks, std::size_t start, int n) {
  std::string key;
  for (int i = 0; i < n; ++i) {
    if (i > 0) key += '\x1f';
    key += toks[start + static_cast<std::size_t>(i)].text;
  }
  return key;
}

Counts gram_counts(const std::vector<Token>& toks, int n, double keyword_weight, Counts* weights) {
  Counts counts;
  if (toks.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= toks.size(); ++i) {
    auto key = gram_key(toks, i, n);
    if (weights != nullptr) (*weights)[key] = toks[i].kind == TokenKind::keyword ? keyword_weight : 1.0;
    counts[std::move(key)] += 1.0;
  }
  return counts;
}

double bleu(const std::vector<Token>& cand, const std::vector<Token>& ref, int max_n, double keyword_weight) {
  if (max_n < 1) throw InvalidInput("max_n must be at least 1");
  if (keyword_weight < 1.0 || !std::isfinite(keyword_weight)) throw InvalidInput("keyword_weight must be >= 1");
  if (cand.empty()) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    Counts weights;
    const Counts c = gram_counts(cand, n, keyword_weight, &weights);
    if (c.empty()) continue;
    const Counts r = gram_counts(ref, n, keyword_weight, nullptr);
    double matched = 0.0;
    double total = 0.0;
    // Sorted keys keep the floating-point summation order reproducible.
    std::vector<const std::string*> keys;
    keys.reserve(c.size());
    for (const auto& kv : c) keys.push_back(&kv.first);
    std::sort(keys.begin(), keys.end(), [](const std::string* a, const std::string* b) { return *a < *b; });
    for (const std::string* key : keys) {
      const double count = c.at(*key);
      const double w = weights.at(*key);
      const auto it = r.find(*key);
      const double ref_count = it == r.end() ? 0.0 : it->second;
      matched += w * std::min(count, ref_count);
      total += w * count;
    }
    if (matched == 0.0) return 0.0;
    log_sum += std::log(matched / total);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double precision = std::exp(log_sum / orders);
  const double c_len = static_cast<double>(cand.size());
  const double r_len = static_cast<double>(ref.size());
  const double bp = c_len > r_len ? 1.0 : std::exp(1.0 - r_len / c_len);
  return std::clamp(bp * precision, 0.0, 1.0);
}

double f1(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  if (cand.empty() && ref.empty()) return 1.0;
  if (cand.empty() || ref.empty()) return 0.0;
  std::unordered_map<std::string, long> counts;
  for (const auto& t : ref) ++counts[t];
  long overlap = 0;
  for (const auto& t : cand) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(cand.size() + ref.size());
}

double clipped_fraction(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  std::unordered_map<std::string, long> counts;
  for (const auto& s : cand) ++counts[s];
  long matched = 0;
  for (const auto& s : ref) {
    auto it = counts.find(s);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  return static_cast<double>(matched) / static_cast<double>(ref.size());
}

}  // namespace

double ngram_match(const TokenStream& candidate, const TokenStream& reference, int max_n) {
  return bleu(significant_tokens(candidate), significant_tokens(reference), max_n, 1.0);
}

double weighted_ngram_match(const TokenStream& candidate, const TokenStream& reference, int max_n,
                            double keyword_weight) {
  return bleu(significant_tokens(candidate), significant_tokens(reference), max_n, keyword_weight);
}

std::vector<std::string> subtree_signatures(const source::SyntaxTree& tree) {
  std::vector<std::string> out;
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf() || n.children.empty()) continue;
    std::string sig = n.kind + "(";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i > 0) sig += ',';
      sig += tree.node(n.children[i]).kind;
    }
    out.push_back(sig + ")");
  }
  return out;
}

double syntax_match(const source::SyntaxTree& candidate, const source::SyntaxTree& reference,
                    std::vector<std::string>* diagnostics) {
  const auto ref = subtree_signatures(reference);
  const auto cand = subtree_signatures(candidate);
  if (ref.empty()) {
    if (cand.empty()) return 1.0;
    if (diagnostics != nullptr) diagnostics->push_back("syntax: reference has no internal nodes");
    return 0.0;
  }
  return clipped_fraction(cand, ref);
}

std::string dataflow_key(const source::DefUseEdge& edge) {
  return std::to_string(edge.scope) + ":" + std::to_string(edge.var_index) + ":" +
         std::to_string(edge.def_occurrence);
}

double dataflow_match(const source::DefUseGraph& candidate, const source::DefUseGraph& reference,
                      std::vector<std::string>* diagnostics) {
  if (reference.edges.empty()) {
    if (!candidate.edges.empty() && diagnostics != nullptr) {
      diagnostics->push_back("dataflow: reference has no def-use edges; scored 1 by convention");
    }
    return 1.0;
  }
  std::vector<std::string> cand;
  std::vector<std::string> ref;
  for (const auto& e : candidate.edges) cand.push_back(dataflow_key(e));
  for (const auto& e : reference.edges) ref.push_back(dataflow_key(e));
  return clipped_fraction(cand, ref);
}

TokenMatch token_and_identifier_match(const TokenStream& candidate, const TokenStream& reference) {
  std::vector<std::string> ct, rt, ci, ri;
  for (const auto& t : significant_tokens(candidate)) {
    ct.push_back(t.text);
    if (t.kind == TokenKind::identifier) ci.push_back(t.text);
  }
  for (const auto& t : significant_tokens(reference)) {
    rt.push_back(t.text);
    if (t.kind == TokenKind::identifier) ri.push_back(t.text);
  }
  return {f1(ct, rt), f1(ci, ri)};
}

SourceAnalysis analyze(std::string_view source) {
  SourceAnalysis a;
  a.tree = source::parse(source);
  a.tokens = a.tree.tokens();
  a.dataflow = source::def_use(a.tree);
  a.significant = significant_tokens(a.tokens).size();
  return a;
}

double composite_of(const CodeBleuReport& r) {
  return r.weights.alpha * r.ngram + r.weights.beta * r.weighted_ngram + r.weights.gamma * r.syntax +
         r.weights.delta * r.dataflow;
}

CodeBleuReport codebleu(const SourceAnalysis& candidate, const SourceAnalysis& reference,
                        const CodeBleuOptions& options) {
  options.weights.validate();
  CodeBleuReport r;
  r.weights = options.weights;
  r.candidate_tokens = candidate.significant;
  r.reference_tokens = reference.significant;
  r.ngram = ngram_match(candidate.tokens, reference.tokens, options.max_n);
  r.weighted_ngram = weighted_ngram_match(candidate.tokens, reference.tokens, options.max_n, options.keyword_weight);
  r.syntax = syntax_match(candidate.tree, reference.tree, &r.diagnostics);
  r.dataflow = dataflow_match(candidate.dataflow, reference.dataflow, &r.diagnostics);
  const auto tm = token_and_identifier_match(candidate.tokens, reference.tokens);
  r.token_match = tm.token_match;
  r.identifier_match = tm.identifier_match;
  if (candidate.significant == 0) r.diagnostics.push_back("candidate is empty");
  r.composite = composite_of(r);
  return r;
}

CodeBleuReport codebleu(std::string_view candidate_source, std::string_view reference_source,
                        const CodeBleuOptions& options) {
  return codebleu(analyze(candidate_source), analyze(reference_source), options);
}

namespace {

struct FileJob {
  std::string path;
  const std::string* candidate = nullptr;
  const std::string* reference = nullptr;
};

std::vector<FileJob> file_jobs(const PackageTree& candidate, const PackageTree& reference) {
  std::set<std::string> paths;
  for (const auto& [p, c] : candidate) {
    if (p.ends_with(".py")) paths.insert(p);
  }
  for (const auto& [p, c] : reference) {
    if (p.ends_with(".py")) paths.insert(p);
  }
  std::vector<FileJob> jobs;
  for (const auto& p : paths) jobs.push_back({p, candidate.find(p), reference.find(p)});
  return jobs;
}

CodeBleuReport score_file(const FileJob& job, const CodeBleuOptions& options) {
  static const std::string empty;
  CodeBleuReport r = codebleu(analyze(job.candidate ? *job.candidate : empty),
                              analyze(job.reference ? *job.reference : empty), options);
  if (job.candidate == nullptr) r.diagnostics.push_back(job.path + ": missing from candidate, scored against empty");
  if (job.reference == nullptr) r.diagnostics.push_back(job.path + ": missing from reference, scored against empty");
  return r;
}

PackageCodeBleu aggregate(const std::vector<FileJob>& jobs, std::vector<CodeBleuReport>&& reports,
                          const CodeBleuOptions& options) {
  PackageCodeBleu out;
  CodeBleuReport& agg = out.aggregate;
  agg.weights = options.weights;
  double total = 0.0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const CodeBleuReport& r = reports[i];
    const double w = static_cast<double>(jobs[i].reference ? r.reference_tokens : r.candidate_tokens);
    total += w;
    agg.ngram += w * r.ngram;
    agg.weighted_ngram += w * r.weighted_ngram;
    agg.syntax += w * r.syntax;
    agg.dataflow += w * r.dataflow;
    agg.token_match += w * r.token_match;
    agg.identifier_match += w * r.identifier_match;
    agg.candidate_tokens += r.candidate_tokens;
    agg.reference_tokens += r.reference_tokens;
    for (const auto& d : r.diagnostics) {
      if (d.starts_with(jobs[i].path)) out.diagnostics.push_back(d);
    }
  }
  if (total > 0.0) {
    agg.ngram /= total;
    agg.weighted_ngram /= total;
    agg.syntax /= total;
    agg.dataflow /= total;
    agg.token_match /= total;
    agg.identifier_match /= total;
  } else {
    agg.ngram = agg.weighted_ngram = agg.syntax = agg.dataflow = agg.token_match = agg.identifier_match = 0.0;
    out.diagnostics.push_back("no Python tokens to compare");
  }
  agg.composite = composite_of(agg);
  agg.diagnostics = out.diagnostics;
  for (std::size_t i = 0; i < jobs.size(); ++i) out.files.emplace(jobs[i].path, std::move(reports[i]));
  return out;
}

}  // namespace

PackageCodeBleu codebleu_package(const PackageTree& candidate, const PackageTree& reference,
                                 const CodeBleuOptions& options) {
  options.weights.validate();
  const auto jobs = file_jobs(candidate, reference);
  std::vector<CodeBleuReport> reports(jobs.size());
  const auto n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) reports[static_cast<std::size_t>(i)] = score_file(jobs[static_cast<std::size_t>(i)], options);
  return aggregate(jobs, std::move(reports), options);
}

PackageCodeBleu codebleu_package_serial(const PackageTree& candidate, const PackageTree& reference,
                                        const CodeBleuOptions& options) {
  options.weights.validate();
  const auto jobs = file_jobs(candidate, reference);
  std::vector<CodeBleuReport> reports;
  reports.reserve(jobs.size());
  for (const auto& job : jobs) reports.push_back(score_file(job, options));
  return aggregate(jobs, std::move(reports), options);
}

}  // namespace forge::evaluator
