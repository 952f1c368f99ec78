#include "forge/evaluator/readability.hpp"

#include <cctype>

namespace forge::evaluator {

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

std::size_t count_syllables(std::string_view word) {
  std::string w;
  for (const char c : word) {
    if (is_letter(c)) w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (w.empty()) return 0;
  std::size_t groups = 0;
  bool in_group = false;
  for (const char c : w) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  const std::size_t n = w.size();
  if (groups > 1 && n >= 2 && w[n - 1] == 'e' && !is_vowel(w[n - 2])) {
    const bool consonant_le = n >= 3 && w[n - 2] == 'l' && !is_vowel(w[n - 3]);
    if (!consonant_le) --groups;
  }
  return groups == 0 ? 1 : groups;
}

FleschCounts flesch_counts(std::string_view text) {
  FleschCounts c;
  bool sentence_has_word = false;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    // One whitespace-delimited chunk; terminators inside it end sentences.
    std::string letters;
    while (i < text.size() && !is_space(text[i])) {
      const char ch = text[i];
      if (is_letter(ch)) {
        letters += ch;
      } else if (is_terminator(ch)) {
        if (!letters.empty()) {
          ++c.words;
          c.syllables += count_syllables(letters);
          letters.clear();
          sentence_has_word = true;
        }
        if (sentence_has_word) ++c.sentences;
        sentence_has_word = false;
      }
      ++i;
    }
    if (!letters.empty()) {
      ++c.words;
      c.syllables += count_syllables(letters);
      sentence_has_word = true;
    }
  }
  if (sentence_has_word) ++c.sentences;
  if (c.words == 0) {
    c.diagnostic = "text contains no words";
    return c;
  }
  const double words = static_cast<double>(c.words);
  c.score = 206.835 - 1.015 * (words / static_cast<double>(c.sentences)) -
            84.6 * (static_cast<double>(c.syllables) / words);
  return c;
}

double flesch_reading_ease(std::string_view text) { return flesch_counts(text).score; }

}  // namespace forge::evaluator
