#include "forge/evaluator/agreement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "forge/common/errors.hpp"

namespace forge::evaluator {

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

int score_bin(double x) {
  const double b = std::floor(x + 0.5);
  return static_cast<int>(std::clamp(b, 0.0, 10.0));
}

Agreement agreement(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidInput("agreement needs two series of equal length");
  if (x.size() < 2) throw InvalidInput("agreement needs at least two pairs");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidInput("agreement values must be finite");
  }
  Agreement a;
  a.pearson_r = pearson(x, y);
  if (!a.pearson_r) a.diagnostics.push_back("pearson undefined: a series has zero variance");
  a.spearman_rho = pearson(fractional_ranks(x), fractional_ranks(y));
  if (!a.spearman_rho) a.diagnostics.push_back("spearman undefined: a series has zero rank variance");

  std::array<double, 11> px{};
  std::array<double, 11> py{};
  double observed = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int bx = score_bin(x[i]);
    const int by = score_bin(y[i]);
    px[static_cast<std::size_t>(bx)] += 1.0 / n;
    py[static_cast<std::size_t>(by)] += 1.0 / n;
    if (bx == by) observed += 1.0;
  }
  observed /= n;
  double expected = 0.0;
  for (std::size_t k = 0; k < px.size(); ++k) expected += px[k] * py[k];
  if (std::abs(1.0 - expected) < 1e-12) {
    a.diagnostics.push_back("kappa undefined: chance agreement is 1");
  } else {
    a.cohen_kappa = (observed - expected) / (1.0 - expected);
  }
  return a;
}

}  // namespace forge::evaluator
