#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rumor_locus {

using BigInt = mpz_class;
using Rational = mpq_class;

// log Gamma(x), x > 0. Lanczos approximation (g = 7, 9 coefficients),
// absolute error well below 1e-13 on (0, 100]. Kept in-house so every
// caller is a pure function (std::lgamma touches global state).
inline double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw std::invalid_argument("log_gamma: argument must be positive, got " +
                                std::to_string(x));
  }
  static const double coeff[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double half_log_two_pi = 0.91893853320467274178;
  if (x < 0.5) {
    // reflection keeps the shifted argument above 0.5
    constexpr double pi = 3.14159265358979323846;
    return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double acc = coeff[0];
  for (int i = 1; i < 9; ++i) acc += coeff[i] / (z + i);
  const double t = z + 7.5;
  return half_log_two_pi + (z + 0.5) * std::log(t) - t + std::log(acc);
}

// x^{overline k} = x (x+1) ... (x+k-1); empty product for k = 0.
inline double rising_factorial(double x, int k) {
  if (k < 0) {
    throw std::invalid_argument("rising_factorial: k must be >= 0, got " +
                                std::to_string(k));
  }
  double acc = 1.0;
  for (int i = 0; i < k; ++i) acc *= x + i;
  return acc;
}

namespace detail {

// Continued fraction for the regularized incomplete beta, modified Lentz
// scheme. Converges fast only for x below the ridge (a+1)/(a+b+2); the
// caller applies the symmetry switch first.
inline double reg_inc_beta_cf(double x, double a, double b) {
  constexpr double eps = 1e-15;
  constexpr double floor_value = 1e-30;
  constexpr int max_iterations = 300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < floor_value) d = floor_value;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iterations; ++m) {
    const int m2 = 2 * m;
    double numer = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + numer * d;
    if (std::fabs(d) < floor_value) d = floor_value;
    c = 1.0 + numer / c;
    if (std::fabs(c) < floor_value) c = floor_value;
    d = 1.0 / d;
    h *= d * c;
    numer = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + numer * d;
    if (std::fabs(d) < floor_value) d = floor_value;
    c = 1.0 + numer / c;
    if (std::fabs(c) < floor_value) c = floor_value;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) return h;
  }
  throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b); absolute error <= 1e-13.
inline double reg_inc_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("reg_inc_beta: parameters must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("reg_inc_beta: x must lie in [0, 1], got " +
                                std::to_string(x));
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const bool swapped = x > (a + 1.0) / (a + b + 2.0);
  const double xx = swapped ? 1.0 - x : x;
  const double aa = swapped ? b : a;
  const double bb = swapped ? a : b;
  const double front = std::exp(aa * std::log(xx) + bb * std::log1p(-xx) +
                                log_gamma(aa + bb) - log_gamma(aa) -
                                log_gamma(bb)) /
                       aa;
  const double value = front * detail::reg_inc_beta_cf(xx, aa, bb);
  return swapped ? 1.0 - value : value;
}

// Row k of the unsigned Stirling numbers of the first kind:
// row[l] = [k atop l] = permutations of k elements with exactly l cycles.
// Recurrence [k+1 atop l] = k [k atop l] + [k atop l-1].
inline std::vector<BigInt> stirling_first_row(int k) {
  if (k < 0) {
    throw std::invalid_argument("stirling_first_row: k must be >= 0");
  }
  std::vector<BigInt> row;
  row.emplace_back(1);
  for (int i = 0; i < k; ++i) {
    std::vector<BigInt> next(static_cast<size_t>(i) + 2);
    for (int l = 0; l <= i + 1; ++l) {
      if (l <= i) next[l] = row[l] * i;
      if (l >= 1) next[l] += row[l - 1];
    }
    row = std::move(next);
  }
  return row;
}

inline BigInt stirling_first_unsigned(int k, int l) {
  if (k < 0 || l < 0) {
    throw std::invalid_argument("stirling_first_unsigned: need k, l >= 0");
  }
  if (l > k) return BigInt(0);
  return stirling_first_row(k)[static_cast<size_t>(l)];
}

// s(k, l) = (-1)^{k-l} [k atop l]
inline BigInt stirling_first_signed(int k, int l) {
  BigInt value = stirling_first_unsigned(k, l);
  if ((k - l) % 2 != 0) value = -value;
  return value;
}

// Partial shifted multiple harmonic sum
//   zeta(k, d, x) = sum over 1 <= j_1 < ... < j_d <= k of prod 1/(j_i + x).
// Conventions: d = 0 -> 1, d > k -> 0. DP over prefix length with one layer
// per chosen index; absolute error <= 1e-13 for k <= 200, d <= 20.
inline double partial_zeta(int k, int d, double x) {
  if (k < 0 || d < 0) {
    throw std::invalid_argument("partial_zeta: k and d must be >= 0");
  }
  if (!(x >= 0.0)) {
    throw std::invalid_argument("partial_zeta: shift x must be >= 0");
  }
  if (d == 0) return 1.0;
  if (d > k) return 0.0;
  std::vector<double> prev(static_cast<size_t>(k) + 1, 1.0);
  std::vector<double> cur(static_cast<size_t>(k) + 1, 0.0);
  for (int layer = 1; layer <= d; ++layer) {
    for (int j = 0; j < layer; ++j) cur[static_cast<size_t>(j)] = 0.0;
    for (int j = layer; j <= k; ++j) {
      cur[static_cast<size_t>(j)] =
          cur[static_cast<size_t>(j) - 1] +
          prev[static_cast<size_t>(j) - 1] / (j + x);
    }
    std::swap(prev, cur);
  }
  return prev[static_cast<size_t>(k)];
}

}  // namespace rumor_locus
