#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "forge/documenter/docs.hpp"

namespace forge::evaluator {

using TermVector = std::map<std::string, double>;

/// Lowercased ASCII-letter runs minus stopwords, counted. Fenced code is
/// skipped.
TermVector term_frequencies(std::string_view markdown);

/// Cosine of two term vectors: 1 when both are empty, 0 when only one is.
double cosine(const TermVector& a, const TermVector& b);

/// Markdown with fenced code blocks (fence lines included) removed.
std::string strip_fenced_code(std::string_view markdown);

bool is_stopword(std::string_view term);

struct BoundaryCoherence {
  std::size_t first = 0;  // section i; the boundary is (i, i + 1)
  double score = 0.0;
};

struct DocMetricsReport {
  double flesch = 0.0;
  double consistency = 1.0;
  double cosine_similarity = 0.0;
  std::vector<BoundaryCoherence> coherence;
  double mean_coherence = 0.0;
  std::vector<std::string> diagnostics;
};

/// Coherence per adjacent section pair, mean section-to-document cosine,
/// Flesch over all section bodies and consistency = 1 - min(1, sd/|mean|)
/// of the per-section Flesch scores (population sd, sections without words
/// left out, 1 when fewer than two remain).
DocMetricsReport doc_metrics(const documenter::DocBundle& doc);

}  // namespace forge::evaluator
