#pragma once

#include <rumor_locus/special_functions.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace rumor_locus {

// Regularized lower incomplete gamma P(a, x): series below the diagonal,
// Lentz continued fraction for the upper tail elsewhere.
inline double reg_lower_gamma(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("reg_lower_gamma: a must be > 0");
  if (!(x >= 0.0)) throw std::invalid_argument("reg_lower_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double log_front = a * std::log(x) - x - log_gamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 500; ++i) {
      term *= x / (a + 1.0 + i);
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    return std::exp(log_front) * sum;
  }
  constexpr double floor_value = 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / floor_value;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < floor_value) d = floor_value;
    c = b + an / c;
    if (std::fabs(c) < floor_value) c = floor_value;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(log_front) * h;
}

// Upper-tail p-value of a chi-square statistic.
inline double chi_square_pvalue(double statistic, long df) {
  if (df < 1) throw std::invalid_argument("chi_square_pvalue: df must be >= 1");
  if (statistic <= 0.0) return 1.0;
  return 1.0 - reg_lower_gamma(df / 2.0, statistic / 2.0);
}

struct ChiSquareResult {
  double statistic = 0.0;
  long df = 0;
  double p_value = 1.0;
};

// One-sample goodness of fit of integer-labeled counts against expected
// probabilities. Cells with expected count below min_expected are pooled
// together with the residual (unlisted) mass into one tail cell.
inline ChiSquareResult pooled_chi_square(const std::map<int, long>& observed,
                                         const std::map<int, double>& expected_probs,
                                         long trials, double min_expected = 5.0) {
  if (trials <= 0) throw std::invalid_argument("pooled_chi_square: trials must be > 0");
  double listed_mass = 0.0;
  long listed_count = 0;
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double tail_obs = 0.0;
  double tail_exp = 0.0;
  for (const auto& [cell, prob] : expected_probs) {
    const auto it = observed.find(cell);
    const double obs = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    const double exp_count = prob * static_cast<double>(trials);
    listed_mass += prob;
    listed_count += it == observed.end() ? 0 : it->second;
    if (exp_count < min_expected) {
      tail_obs += obs;
      tail_exp += exp_count;
    } else {
      cells.emplace_back(obs, exp_count);
    }
  }
  long total_observed = 0;
  for (const auto& [cell, count] : observed) total_observed += count;
  tail_obs += static_cast<double>(total_observed - listed_count);
  tail_exp += (1.0 - listed_mass) * static_cast<double>(trials);
  if (tail_exp >= min_expected) {
    cells.emplace_back(tail_obs, tail_exp);
  } else if (!cells.empty() && (tail_exp > 0.0 || tail_obs > 0.0)) {
    cells.back().first += tail_obs;
    cells.back().second += tail_exp;
  }
  if (cells.size() < 2) {
    throw std::invalid_argument("pooled_chi_square: fewer than two usable cells");
  }
  ChiSquareResult result;
  for (const auto& [obs, exp_count] : cells) {
    const double diff = obs - exp_count;
    result.statistic += diff * diff / exp_count;
  }
  result.df = static_cast<long>(cells.size()) - 1;
  result.p_value = chi_square_pvalue(result.statistic, result.df);
  return result;
}

// Two-sample homogeneity test over integer-labeled counts (2 x C table),
// pooling cells whose combined count is below 2 * min_expected.
inline ChiSquareResult two_sample_chi_square(const std::map<int, long>& first,
                                             const std::map<int, long>& second,
                                             double min_expected = 5.0) {
  std::map<int, std::pair<double, double>> merged;
  for (const auto& [cell, count] : first) merged[cell].first = static_cast<double>(count);
  for (const auto& [cell, count] : second) merged[cell].second = static_cast<double>(count);
  std::vector<std::pair<double, double>> cells;
  std::pair<double, double> tail{0.0, 0.0};
  for (const auto& [cell, counts] : merged) {
    if (counts.first + counts.second < 2.0 * min_expected) {
      tail.first += counts.first;
      tail.second += counts.second;
    } else {
      cells.push_back(counts);
    }
  }
  if (tail.first + tail.second > 0.0) {
    if (tail.first + tail.second >= 2.0 * min_expected || cells.empty()) {
      cells.push_back(tail);
    } else {
      cells.back().first += tail.first;
      cells.back().second += tail.second;
    }
  }
  if (cells.size() < 2) {
    throw std::invalid_argument("two_sample_chi_square: fewer than two usable cells");
  }
  double total_first = 0.0;
  double total_second = 0.0;
  for (const auto& [a, b] : cells) {
    total_first += a;
    total_second += b;
  }
  const double grand = total_first + total_second;
  ChiSquareResult result;
  for (const auto& [a, b] : cells) {
    const double column = a + b;
    const double expected_first = total_first * column / grand;
    const double expected_second = total_second * column / grand;
    result.statistic += (a - expected_first) * (a - expected_first) / expected_first;
    result.statistic += (b - expected_second) * (b - expected_second) / expected_second;
  }
  result.df = static_cast<long>(cells.size()) - 1;
  result.p_value = chi_square_pvalue(result.statistic, result.df);
  return result;
}

// Kolmogorov-Smirnov distance between a sample and a reference CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double value = cdf(samples[i]);
    worst = std::max(worst, value - static_cast<double>(i) / n);
    worst = std::max(worst, static_cast<double>(i + 1) / n - value);
  }
  return worst;
}

}  // namespace rumor_locus
