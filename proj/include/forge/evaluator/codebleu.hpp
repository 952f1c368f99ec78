#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "forge/common/package_tree.hpp"
#include "forge/source/dataflow.hpp"
#include "forge/source/syntax_tree.hpp"
#include "forge/source/tokens.hpp"

namespace forge::evaluator {

struct CodeBleuWeights {
  double alpha = 0.25;  // n-gram
  double beta = 0.25;   // weighted n-gram
  double gamma = 0.25;  // syntax
  double delta = 0.25;  // dataflow

  /// Throws InvalidInput unless all weights are non-negative and sum to 1.
  void validate() const;
};

struct CodeBleuOptions {
  CodeBleuWeights weights;
  int max_n = 4;
  double keyword_weight = 5.0;
};

struct CodeBleuReport {
  double ngram = 0.0;
  double weighted_ngram = 0.0;
  double syntax = 0.0;
  double dataflow = 0.0;
  double token_match = 0.0;
  double identifier_match = 0.0;
  CodeBleuWeights weights;
  double composite = 0.0;
  std::size_t candidate_tokens = 0;
  std::size_t reference_tokens = 0;
  std::vector<std::string> diagnostics;
};

/// Non-trivia tokens in source order.
std::vector<source::Token> significant_tokens(const source::TokenStream& stream);

/// BLEU: clipped n-gram precision for n = 1..max_n, geometric mean, brevity
/// penalty. Orders with no candidate n-grams (candidate shorter than n) are
/// left out of the mean. An empty candidate scores 0.
double ngram_match(const source::TokenStream& candidate, const source::TokenStream& reference, int max_n = 4);

/// As ngram_match, with every n-gram that starts with a keyword counted
/// keyword_weight times. keyword_weight = 1 reproduces ngram_match exactly.
double weighted_ngram_match(const source::TokenStream& candidate, const source::TokenStream& reference,
                            int max_n = 4, double keyword_weight = 5.0);

/// "kind(child kind, ...)" for every internal node with children.
std::vector<std::string> subtree_signatures(const source::SyntaxTree& tree);

/// Clipped fraction of reference subtree signatures found in the candidate.
/// A reference without internal nodes scores 1 against an equally trivial
/// candidate and 0 otherwise.
double syntax_match(const source::SyntaxTree& candidate, const source::SyntaxTree& reference,
                    std::vector<std::string>* diagnostics = nullptr);

/// Spelling-independent edge key: scope ordinal, variable index in its scope
/// and definition occurrence.
std::string dataflow_key(const source::DefUseEdge& edge);

/// Clipped fraction of normalised reference edges present in the candidate.
/// A reference without edges scores 1.
double dataflow_match(const source::DefUseGraph& candidate, const source::DefUseGraph& reference,
                      std::vector<std::string>* diagnostics = nullptr);

struct TokenMatch {
  double token_match = 0.0;
  double identifier_match = 0.0;
};

/// Multiset F1 over all significant tokens and over identifiers alone. Two
/// empty streams match perfectly.
TokenMatch token_and_identifier_match(const source::TokenStream& candidate, const source::TokenStream& reference);

/// Everything a comparison needs from one source file.
struct SourceAnalysis {
  source::TokenStream tokens;
  source::SyntaxTree tree;
  source::DefUseGraph dataflow;
  std::size_t significant = 0;
};

SourceAnalysis analyze(std::string_view source);

CodeBleuReport codebleu(const SourceAnalysis& candidate, const SourceAnalysis& reference,
                        const CodeBleuOptions& options = {});
CodeBleuReport codebleu(std::string_view candidate_source, std::string_view reference_source,
                        const CodeBleuOptions& options = {});

double composite_of(const CodeBleuReport& report);

struct PackageCodeBleu {
  CodeBleuReport aggregate;
  std::map<std::string, CodeBleuReport> files;
  std::vector<std::string> diagnostics;
};

/// Scores every *.py path of either tree (a path missing on one side is
/// compared with an empty file) and aggregates components by a weighted mean:
/// each file weighs its reference token count, or its candidate token count
/// when the reference lacks the file. Files are scored in parallel.
PackageCodeBleu codebleu_package(const PackageTree& candidate, const PackageTree& reference,
                                 const CodeBleuOptions& options = {});

/// Single-threaded reference implementation of codebleu_package.
PackageCodeBleu codebleu_package_serial(const PackageTree& candidate, const PackageTree& reference,
                                        const CodeBleuOptions& options = {});

}  // namespace forge::evaluator
