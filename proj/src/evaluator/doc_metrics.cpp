#include "forge/evaluator/doc_metrics.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "forge/common/text.hpp"
#include "forge/documenter/markdown.hpp"
#include "forge/evaluator/readability.hpp"

namespace forge::evaluator {

bool is_stopword(std::string_view term) {
  static const std::set<std::string, std::less<>> words{
      "a",     "about", "above", "after", "again", "against", "all",   "am",    "an",     "and",   "any",
      "are",   "as",    "at",    "be",    "because", "been",  "before", "being", "below", "between", "both",
      "but",   "by",    "can",   "could", "did",   "do",      "does",  "doing", "down",   "during", "each",
      "few",   "for",   "from",  "further", "had", "has",     "have",  "having", "he",    "her",   "here",
      "hers",  "herself", "him", "himself", "his", "how",     "i",     "if",    "in",     "into",  "is",
      "it",    "its",   "itself", "just", "me",    "more",    "most",  "my",    "myself", "no",    "nor",
      "not",   "now",   "of",    "off",   "on",    "once",    "only",  "or",    "other",  "our",   "ours",
      "ourselves", "out", "over", "own",  "same",  "she",     "should", "so",   "some",   "such",  "than",
      "that",  "the",   "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
      "those", "through", "to",  "too",   "under", "until",   "up",    "very",  "was",    "we",    "were",
      "what",  "when",  "where", "which", "while", "who",     "whom",  "why",   "will",   "with",  "would",
      "you",   "your",  "yours", "yourself", "yourselves"};
  return words.contains(term);
}

std::string strip_fenced_code(std::string_view markdown) {
  documenter::FenceTracker fences;
  std::string out;
  for (const auto line : text::split_lines(markdown)) {
    if (fences.feed(line) != documenter::FenceTracker::Role::text) continue;
    out += line;
    out += '\n';
  }
  return out;
}

TermVector term_frequencies(std::string_view markdown) {
  const std::string prose = strip_fenced_code(markdown);
  TermVector tf;
  std::string term;
  auto flush = [&] {
    if (!term.empty() && !is_stopword(term)) tf[term] += 1.0;
    term.clear();
  };
  for (const char ch : prose) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalpha(c)) {
      term += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  return tf;
}

double cosine(const TermVector& a, const TermVector& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [t, x] : a) {
    na += x * x;
    if (const auto it = b.find(t); it != b.end()) dot += x * it->second;
  }
  for (const auto& [t, y] : b) nb += y * y;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return c > 1.0 ? 1.0 : c;
}

DocMetricsReport doc_metrics(const documenter::DocBundle& doc) {
  DocMetricsReport r;
  std::vector<TermVector> vectors;
  TermVector whole;
  std::string full_text;
  std::vector<double> section_scores;
  for (const auto& s : doc.sections) {
    vectors.push_back(term_frequencies(s.body));
    for (const auto& [t, x] : vectors.back()) whole[t] += x;
    const std::string prose = strip_fenced_code(s.body);
    full_text += prose + "\n";
    const auto counts = flesch_counts(prose);
    if (counts.diagnostic) {
      r.diagnostics.push_back("section '" + s.title + "': " + *counts.diagnostic);
    } else {
      section_scores.push_back(counts.score);
    }
  }

  for (std::size_t i = 0; i + 1 < vectors.size(); ++i) {
    r.coherence.push_back({i, cosine(vectors[i], vectors[i + 1])});
  }
  if (!r.coherence.empty()) {
    double sum = 0.0;
    for (const auto& b : r.coherence) sum += b.score;
    r.mean_coherence = sum / static_cast<double>(r.coherence.size());
  }

  if (!vectors.empty()) {
    double sum = 0.0;
    for (const auto& v : vectors) sum += cosine(v, whole);
    r.cosine_similarity = sum / static_cast<double>(vectors.size());
  }

  if (section_scores.size() >= 2) {
    double mean = 0.0;
    for (const double x : section_scores) mean += x;
    mean /= static_cast<double>(section_scores.size());
    double var = 0.0;
    for (const double x : section_scores) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(section_scores.size()));
    if (mean == 0.0) {
      r.consistency = sd == 0.0 ? 1.0 : 0.0;
    } else {
      r.consistency = 1.0 - std::min(1.0, sd / std::abs(mean));
    }
  }

  const auto counts = flesch_counts(full_text);
  r.flesch = counts.score;
  if (counts.diagnostic) r.diagnostics.push_back("document: " + *counts.diagnostic);
  return r;
}

}  // namespace forge::evaluator
