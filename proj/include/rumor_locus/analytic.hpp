#pragma once

#include <rumor_locus/special_functions.hpp>

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rumor_locus {

struct RegularTreeParams {
  int delta;
  explicit RegularTreeParams(int degree) : delta(degree) {
    if (delta < 3) {
      throw std::invalid_argument("RegularTreeParams: degree must be >= 3, got " +
                                  std::to_string(degree));
    }
  }
};

enum class DistributionKind { exact_finite_n, limit_closed_form, lower_bound, empirical };

// Distribution of the distance between the true source and the estimate.
// For kind lower_bound each distance carries an interval [masses, upper];
// for the other kinds `upper` is empty.
struct DistanceDistribution {
  DistributionKind kind = DistributionKind::empirical;
  std::map<int, double> masses;
  std::map<int, double> upper;
  long n = 0;          // population size (exact_finite_n, empirical)
  int truncation = 0;  // series truncation (lower_bound)
  long trials = 0;     // sample count (empirical)
};

inline void check_distribution(const DistanceDistribution& dist) {
  double total = 0.0;
  for (const auto& [d, mass] : dist.masses) {
    if (d < 0 || mass < 0.0 || mass > 1.0 + 1e-12) {
      throw std::invalid_argument("DistanceDistribution: invalid mass at d=" +
                                  std::to_string(d));
    }
    total += mass;
  }
  if (total > 1.0 + 1e-9) {
    throw std::invalid_argument("DistanceDistribution: masses sum to " +
                                std::to_string(total) + " > 1");
  }
}

// Limiting probability that the estimate is the true source.
inline double limit_correct_prob(int delta) {
  if (delta < 3) {
    throw std::invalid_argument("limit_correct_prob: degree must be >= 3");
  }
  const double s = 1.0 / (delta - 2.0);
  return delta * reg_inc_beta(0.5, s, 1.0 + s) - (delta - 1.0);
}

// Probability that a fixed node at distance d from the source is the k-th
// infected. Zero for k <= d (the node cannot be reached that early).
inline double arrival_prob(int delta, int d, int k) {
  if (delta < 3) throw std::invalid_argument("arrival_prob: degree must be >= 3");
  if (d < 1) throw std::invalid_argument("arrival_prob: d must be >= 1");
  if (k <= d) return 0.0;
  const double x = 1.0 / (delta - 2.0);
  const double y = 2.0 / (delta - 2.0);
  double ratio = 1.0;  // x^{overline(k-1)} / y^{overline(k-1)}, factor by factor
  for (int i = 0; i <= k - 2; ++i) ratio *= (x + i) / (y + i);
  ratio /= y + k - 1;
  return 2.0 / std::pow(delta - 2.0, d) * ratio * partial_zeta(k - 2, d - 1, x);
}

// Lower-bound weight that the k-th infected node ends up as the center:
// the two-threshold incomplete-beta combination from the limit analysis.
inline double center_prob_bound(int delta, int k) {
  if (delta < 3) throw std::invalid_argument("center_prob_bound: degree must be >= 3");
  if (k < 2) throw std::invalid_argument("center_prob_bound: k must be >= 2");
  const double s = 1.0 / (delta - 2.0);
  return reg_inc_beta(0.5, k - 1 + s, 1.0 + s) -
         (delta - 1.0) * reg_inc_beta(0.5, k + s, s);
}

// Width of the truncation bracket: e^2 (8 + 5m + m^2) 2^{3-m}.
inline double bound_width(int m) {
  if (m < 1) throw std::invalid_argument("bound_width: m must be >= 1");
  const double e2 = 7.38905609893065;  // e^2
  return e2 * (8.0 + 5.0 * m + static_cast<double>(m) * m) *
         std::ldexp(1.0, 3 - m);
}

// Partial-sum lower bound on the limiting probability of distance exactly d;
// the true limit lies within [g, g + bound_width(m)].
inline double distance_prob_lower_bound(int delta, int d, int m) {
  if (delta < 3) {
    throw std::invalid_argument("distance_prob_lower_bound: degree must be >= 3");
  }
  if (d < 1) throw std::invalid_argument("distance_prob_lower_bound: d must be >= 1");
  if (m <= d) {
    throw std::invalid_argument("distance_prob_lower_bound: need m > d, got m=" +
                                std::to_string(m) + " d=" + std::to_string(d));
  }
  double sum = 0.0;
  for (int k = d + 1; k <= m; ++k) {
    sum += arrival_prob(delta, d, k) * center_prob_bound(delta, k);
  }
  return delta * std::pow(delta - 1.0, d - 1) * sum;
}

// Closed-form limiting distance mass for degree 3. d = 0 routes to the
// correct-detection limit so cumulative callers need no special case.
inline double limit_distance_prob_delta3(int d) {
  if (d < 0) throw std::invalid_argument("limit_distance_prob_delta3: d must be >= 0");
  if (d == 0) return limit_correct_prob(3);
  const double ln2 = 0.69314718055994530942;
  double sign = 1.0;         // (-1)^l
  double ln2_pow = 1.0;      // ln2^l / l!
  double exp_partial = 1.0;  // sum_{m=0}^{l} ln2^m / m!
  double inner = 0.25;
  for (int l = 1; l <= d; ++l) {
    sign = -sign;
    ln2_pow *= ln2 / l;
    exp_partial += ln2_pow;
    inner += sign * (ln2_pow - 2.0 + exp_partial);
  }
  const double outer_sign = (d % 2 == 0) ? 1.0 : -1.0;
  return 3.0 * std::ldexp(1.0, d - 1) * outer_sign * inner;
}

// Series form of the same limit (degree 3), summed to kmax with exact
// big-integer numerators. Retained as the independent cross-check of the
// closed form. Terminates early once the term bound
// d * max_l |s(k,l)| / (2^k (k-1)!) stays below 1e-16 for 5 consecutive k.
inline double limit_distance_prob_series(int d, int kmax) {
  if (d < 1) throw std::invalid_argument("limit_distance_prob_series: d must be >= 1");
  if (kmax <= d) {
    throw std::invalid_argument("limit_distance_prob_series: need kmax > d");
  }
  std::vector<BigInt> row{BigInt(1)};  // unsigned Stirling row, k = 0
  BigInt factorial_km1 = 1;            // (k-1)!
  BigInt pow2 = 1;                     // 2^k
  double total = 0.0;
  int quiet_terms = 0;
  for (int k = 1; k <= kmax; ++k) {
    std::vector<BigInt> next(static_cast<size_t>(k) + 1);
    for (int l = 0; l <= k; ++l) {
      next[static_cast<size_t>(l)] =
          (l < k ? row[static_cast<size_t>(l)] * (k - 1) : BigInt(0)) +
          (l >= 1 ? row[static_cast<size_t>(l) - 1] : BigInt(0));
    }
    row = std::move(next);
    if (k >= 2) factorial_km1 *= k - 1;
    pow2 *= 2;
    if (k <= d) continue;
    BigInt signed_sum = 0;  // sum_{l=1}^{d} s(k,l)
    BigInt max_abs = 0;
    for (int l = 1; l <= std::min(d, k); ++l) {
      const BigInt& u = row[static_cast<size_t>(l)];
      if ((k - l) % 2 == 0) signed_sum += u; else signed_sum -= u;
      if (u > max_abs) max_abs = u;
    }
    // term = 3 * 2^{d-1} * (-1)^{d+k} * signed_sum / (2^k (k+1) (k-1)!)
    BigInt numer = signed_sum * 3;
    numer <<= d - 1;
    if ((d + k) % 2 != 0) numer = -numer;
    const BigInt denom = pow2 * (k + 1) * factorial_km1;
    total += Rational(numer, denom).get_d();
    const double term_bound =
        Rational(max_abs * d, pow2 * factorial_km1).get_d();
    quiet_terms = (term_bound < 1e-16) ? quiet_terms + 1 : 0;
    if (quiet_terms >= 5) break;
  }
  return total;
}

namespace detail {

// z[j] = partial_zeta(j, layers, x) for all j = 0..jmax in one sweep.
inline std::vector<double> partial_zeta_layer(int jmax, int layers, double x) {
  std::vector<double> z(static_cast<size_t>(jmax) + 1, 1.0);
  for (int t = 1; t <= layers; ++t) {
    std::vector<double> next(static_cast<size_t>(jmax) + 1, 0.0);
    for (int j = t; j <= jmax; ++j) {
      next[static_cast<size_t>(j)] =
          next[static_cast<size_t>(j) - 1] + z[static_cast<size_t>(j) - 1] / (j + x);
    }
    z = std::move(next);
  }
  return z;
}

// Probability mass of the source itself being the estimate at finite n,
// degree 3: the source's three subtree sizes are uniform over the weak
// compositions of n-1, so the center/tie classification is a lattice count.
inline double exact_source_mass_delta3(long n) {
  const long long total_states = n * (n + 1) / 2;  // C(n+1, 2) compositions
  const long long parts_sum = n - 1;
  const auto count_max_at_most = [parts_sum](long long t) {
    // weak compositions of parts_sum into 3 parts, each part <= t
    static const long long choose3[4] = {1, 3, 3, 1};
    long long total = 0;
    for (int j = 0; j <= 3; ++j) {
      const long long rem = parts_sum - j * (t + 1);
      if (rem < 0) break;
      const long long ways = (rem + 2) * (rem + 1) / 2;
      total += (j % 2 == 0 ? 1 : -1) * choose3[j] * ways;
    }
    return total;
  };
  if (n % 2 == 1) {
    // strict center iff every subtree holds at most (n-1)/2 nodes
    return static_cast<double>(count_max_at_most((n - 1) / 2)) / total_states;
  }
  // even n: ties (one subtree holding exactly n/2) carry half mass
  const long long strict = count_max_at_most(n / 2 - 1);
  const long long ties = 3 * (n / 2);
  return (strict + 0.5 * ties) / total_states;
}

}  // namespace detail

// Exact probability, at finite n and degree 3, that the estimate sits at
// distance exactly d from the source. d = 0 is the source-mass lattice count;
// d >= 1 is the telescoping binomial-ratio sum (odd and even n differ by the
// tie-splitting term).
inline double exact_distance_prob_delta3(long n, int d) {
  if (n < 2) throw std::invalid_argument("exact_distance_prob_delta3: n must be >= 2");
  if (d < 0) throw std::invalid_argument("exact_distance_prob_delta3: d must be >= 0");
  if (d == 0) return detail::exact_source_mass_delta3(n);
  const bool odd = (n % 2 == 1);
  const long K = odd ? (n + 1) / 2 : n / 2 + 1;
  if (d + 1 > K) return 0.0;
  const double A = odd ? (n + 3) / 2 : n / 2 + 1;
  const double B = static_cast<double>(n + 1);
  const std::vector<double> z =
      detail::partial_zeta_layer(static_cast<int>(K) - 2, d - 1, 1.0);
  double sum = 0.0;
  if (odd) {
    double ratio = 1.0;  // C(A, k+1) / C(B, k+1) at k = d+1
    for (int i = 0; i <= d + 1; ++i) ratio *= (A - i) / (B - i);
    for (long k = d + 1; k <= K; ++k) {
      sum += 2.0 / (k + 1) * z[static_cast<size_t>(k) - 2] * ratio;
      ratio *= (A - (k + 1)) / (B - (k + 1));
    }
  } else {
    const double c = n / (2.0 * (n + 2));
    double q = 1.0;  // C(A, k) / C(B, k) at k = d+1
    for (int i = 0; i <= d; ++i) q *= (A - i) / (B - i);
    for (long k = d + 1; k <= K; ++k) {
      const double r2 = q * (k + 1) / (B - k);  // C(A,k) / C(B,k+1)
      const double r1 = r2 * (A - k) / (k + 1); // C(A,k+1) / C(B,k+1)
      sum += 2.0 / (k + 1) * z[static_cast<size_t>(k) - 2] * (r1 + c * r2);
      q *= (A - k) / (B - k);
    }
  }
  return 3.0 * std::ldexp(1.0, d - 1) * sum;
}

// Cumulative Pr{distance <= d} bracket from the truncated bounds:
// lower = limit_correct_prob + sum of lower bounds, upper = lower + d*width.
inline std::pair<double, double> cumulative_within_bounds(int delta, int d, int m) {
  if (d < 0) throw std::invalid_argument("cumulative_within_bounds: d must be >= 0");
  if (m <= d) throw std::invalid_argument("cumulative_within_bounds: need m > d");
  double lower = limit_correct_prob(delta);
  for (int l = 1; l <= d; ++l) {
    lower += distance_prob_lower_bound(delta, l, m);
  }
  return {lower, lower + d * bound_width(m)};
}

// Exact limiting cumulative for degree 3 via the closed form.
inline double cumulative_within_exact_delta3(int d) {
  if (d < 0) throw std::invalid_argument("cumulative_within_exact_delta3: d must be >= 0");
  double total = 0.0;
  for (int l = 0; l <= d; ++l) total += limit_distance_prob_delta3(l);
  return total;
}

// Largest distance with positive mass at finite n, degree 3.
inline int max_support_delta3(long n) {
  return static_cast<int>(n % 2 == 1 ? (n - 1) / 2 : n / 2);
}

inline DistanceDistribution exact_distribution_delta3(long n, int dmax = -1) {
  if (dmax < 0) dmax = max_support_delta3(n);
  DistanceDistribution dist;
  dist.kind = DistributionKind::exact_finite_n;
  dist.n = n;
  for (int d = 0; d <= dmax; ++d) {
    dist.masses[d] = exact_distance_prob_delta3(n, d);
  }
  check_distribution(dist);
  return dist;
}

inline DistanceDistribution limit_distribution_delta3(int dmax) {
  DistanceDistribution dist;
  dist.kind = DistributionKind::limit_closed_form;
  for (int d = 0; d <= dmax; ++d) {
    dist.masses[d] = limit_distance_prob_delta3(d);
  }
  check_distribution(dist);
  return dist;
}

inline DistanceDistribution bound_distribution(int delta, int dmax, int m) {
  if (m <= dmax) throw std::invalid_argument("bound_distribution: need m > dmax");
  DistanceDistribution dist;
  dist.kind = DistributionKind::lower_bound;
  dist.truncation = m;
  dist.masses[0] = limit_correct_prob(delta);
  dist.upper[0] = dist.masses[0];
  const double width = bound_width(m);
  for (int d = 1; d <= dmax; ++d) {
    const double lower = distance_prob_lower_bound(delta, d, m);
    dist.masses[d] = lower;
    dist.upper[d] = lower + width;
  }
  check_distribution(dist);
  return dist;
}

}  // namespace rumor_locus
