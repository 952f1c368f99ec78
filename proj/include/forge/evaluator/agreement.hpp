#pragma once

#include <optional>
#include <string>
#include <vector>

namespace forge::evaluator {

/// Absent values mark statistics that are undefined for the input (a
/// constant series, or raters who both use one single category).
struct Agreement {
  std::optional<double> pearson_r;
  std::optional<double> spearman_rho;
  std::optional<double> cohen_kappa;
  std::vector<std::string> diagnostics;
};

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

/// 1-based ranks; ties share their average rank.
std::vector<double> fractional_ranks(const std::vector<double>& x);

/// Integer bin in 0..10, rounding halves up.
int score_bin(double x);

/// Pearson, Spearman (Pearson on fractional ranks) and unweighted Cohen's
/// kappa over scores binned with score_bin. Throws InvalidInput unless both
/// series have the same length of at least 2 and hold finite values.
Agreement agreement(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace forge::evaluator
