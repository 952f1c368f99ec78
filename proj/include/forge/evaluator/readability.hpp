#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace forge::evaluator {

struct FleschCounts {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
  double score = 0.0;
  std::optional<std::string> diagnostic;  // set when the text has no words
};

/// Vowel groups (a e i o u y), minus a silent final "e" after a consonant
/// unless the word ends in consonant + "le". At least 1.
std::size_t count_syllables(std::string_view word);

/// Words are whitespace-separated chunks reduced to their ASCII letters;
/// sentences are the runs between '.', '!' and '?' that contain a word.
FleschCounts flesch_counts(std::string_view text);

/// 206.835 - 1.015 * words/sentences - 84.6 * syllables/words; 0 for text
/// without words.
double flesch_reading_ease(std::string_view text);

}  // namespace forge::evaluator
