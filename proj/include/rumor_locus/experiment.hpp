#pragma once

#include <rumor_locus/analytic.hpp>
#include <rumor_locus/estimator.hpp>
#include <rumor_locus/stats.hpp>
#include <rumor_locus/tree_sim.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace rumor_locus {

struct ExperimentConfig {
  RegularTreeParams params{3};
  long n = 2;
  long trials = 1;
  std::uint64_t master_seed = 0;
  SimMode mode = SimMode::uniform;

  void validate() const {
    if (n < 2) throw std::invalid_argument("ExperimentConfig: n must be >= 2");
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
  }
};

// Samples the source-to-estimate distance distribution. Each trial draws from
// its own substream (master_seed, trial index), so the result is bit-identical
// for any thread count: integer histograms merge by summation.
inline DistanceDistribution run_trials(const ExperimentConfig& config,
                                       unsigned thread_count = 0) {
  config.validate();
  unsigned threads = thread_count;
  if (threads == 0) {
    threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
  }
  if (static_cast<long>(threads) > config.trials) {
    threads = static_cast<unsigned>(config.trials);
  }

  std::vector<std::map<int, long>> partial(threads);
  auto worker = [&config](long lo, long hi, std::map<int, long>& histogram) {
    for (long trial = lo; trial < hi; ++trial) {
      RandomStream stream(config.master_seed, static_cast<std::uint64_t>(trial));
      const InfectedTree tree =
          simulate(config.params, config.n, config.mode, stream);
      const NodePath estimate = ml_estimate(tree, stream);
      histogram[static_cast<int>(estimate.length())] += 1;
    }
  };

  if (threads == 1) {
    worker(0, config.trials, partial[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const long chunk = (config.trials + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const long lo = static_cast<long>(t) * chunk;
      const long hi = std::min(config.trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi, std::ref(partial[t]));
    }
    for (auto& thread : pool) thread.join();
  }

  std::map<int, long> histogram;
  for (const auto& part : partial) {
    for (const auto& [d, count] : part) histogram[d] += count;
  }

  DistanceDistribution dist;
  dist.kind = DistributionKind::empirical;
  dist.n = config.n;
  dist.trials = config.trials;
  for (const auto& [d, count] : histogram) {
    dist.masses[d] = static_cast<double>(count) / static_cast<double>(config.trials);
  }
  return dist;
}

struct ComparisonRow {
  int d = 0;
  double empirical = 0.0;
  double target_lower = 0.0;
  double target_upper = 0.0;
  double se = 0.0;
  double z = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  bool has_chi_square = false;
  ChiSquareResult chi_square;
  bool pass = false;
  long trials = 0;
  double elapsed_seconds = 0.0;
};

// Scores an empirical distribution against a point-valued or interval-valued
// target. Point targets use the binomial standard error under the target mass;
// interval targets use the plug-in error from the empirical mass and score
// zero inside the interval. Verdict: every |z| <= 4.
inline ComparisonReport compare(const DistanceDistribution& empirical,
                                const DistanceDistribution& target) {
  if (empirical.kind != DistributionKind::empirical || empirical.trials < 1 ||
      empirical.masses.empty()) {
    throw std::invalid_argument("compare: first argument must be a sampled distribution");
  }
  const bool interval = target.kind == DistributionKind::lower_bound;
  const double trials = static_cast<double>(empirical.trials);

  ComparisonReport report;
  report.trials = empirical.trials;
  report.pass = true;
  for (const auto& [d, lower] : target.masses) {
    ComparisonRow row;
    row.d = d;
    const auto it = empirical.masses.find(d);
    row.empirical = it == empirical.masses.end() ? 0.0 : it->second;
    row.target_lower = lower;
    row.target_upper = interval ? target.upper.at(d) : lower;
    if (interval) {
      row.se = std::sqrt(row.empirical * (1.0 - row.empirical) / trials);
      if (row.empirical < row.target_lower) {
        row.z = row.se > 0.0 ? (row.empirical - row.target_lower) / row.se
                             : -std::numeric_limits<double>::infinity();
      } else if (row.empirical > row.target_upper) {
        row.z = row.se > 0.0 ? (row.empirical - row.target_upper) / row.se
                             : std::numeric_limits<double>::infinity();
      }
    } else {
      row.se = std::sqrt(lower * (1.0 - lower) / trials);
      if (row.se > 0.0) {
        row.z = (row.empirical - lower) / row.se;
      } else if (row.empirical != lower) {
        row.z = std::numeric_limits<double>::infinity();
      }
    }
    if (!(std::fabs(row.z) <= 4.0)) report.pass = false;
    report.rows.push_back(row);
  }

  if (!interval) {
    std::map<int, long> observed;
    for (const auto& [d, mass] : empirical.masses) {
      observed[d] = std::lround(mass * trials);
    }
    std::map<int, double> probs(target.masses.begin(), target.masses.end());
    try {
      report.chi_square = pooled_chi_square(observed, probs, empirical.trials);
      report.has_chi_square = true;
    } catch (const std::invalid_argument&) {
      // degenerate support (single usable cell): z-scores already decide
    }
  }
  return report;
}

inline nlohmann::json report_to_json(const ComparisonReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"d", row.d},
                    {"empirical", row.empirical},
                    {"target_lower", row.target_lower},
                    {"target_upper", row.target_upper},
                    {"se", row.se},
                    {"z", row.z}});
  }
  nlohmann::json doc{{"pass", report.pass},
                     {"trials", report.trials},
                     {"elapsed_seconds", report.elapsed_seconds},
                     {"rows", rows}};
  if (report.has_chi_square) {
    doc["chi_square"] = {{"statistic", report.chi_square.statistic},
                         {"df", report.chi_square.df},
                         {"p_value", report.chi_square.p_value}};
  } else {
    doc["chi_square"] = nullptr;
  }
  return doc;
}

struct CumulativeRow {
  int delta = 0;
  int d = 0;
  int m = 0;
  double lower = 0.0;
  double upper = 0.0;
  double exact = std::numeric_limits<double>::quiet_NaN();
  bool has_exact = false;
};

// Cumulative within-distance table: interval [lower, upper = lower + d*eps]
// per degree, plus the exact column where the closed form exists (delta = 3).
inline std::vector<CumulativeRow> figure_tables(const std::vector<int>& deltas,
                                                int dmax, int m) {
  if (dmax < 0) throw std::invalid_argument("figure_tables: dmax must be >= 0");
  if (m < dmax + 1) throw std::invalid_argument("figure_tables: need m >= dmax + 1");
  std::vector<CumulativeRow> rows;
  for (int delta : deltas) {
    for (int d = 0; d <= dmax; ++d) {
      CumulativeRow row;
      row.delta = delta;
      row.d = d;
      row.m = m;
      const auto [lower, upper] = cumulative_within_bounds(delta, d, m);
      row.lower = lower;
      row.upper = upper;
      if (delta == 3) {
        row.exact = cumulative_within_exact_delta3(d);
        row.has_exact = true;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

// %.15g with the C locale: stable bytes for diff-based consumers.
inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.15g", value);
  return std::string(buffer);
}

inline constexpr const char* csv_header = "delta,d,m,lower,upper,exact,empirical,se,z";

inline void write_figure_csv(const std::vector<CumulativeRow>& rows, std::ostream& out) {
  out << csv_header << '\n';
  int last_delta = -1;
  for (const auto& row : rows) {
    if (row.delta != last_delta) {
      last_delta = row.delta;
      out << "# delta=" << row.delta
          << " c_delta=" << format_double(limit_correct_prob(row.delta))
          << " epsilon_m=" << format_double(bound_width(row.m)) << '\n';
    }
    out << row.delta << ',' << row.d << ',' << row.m << ','
        << format_double(row.lower) << ',' << format_double(row.upper) << ','
        << (row.has_exact ? format_double(row.exact) : std::string()) << ",,,\n";
  }
}

inline void write_comparison_csv(const ComparisonReport& report, int delta,
                                 bool interval_target, int m, std::ostream& out) {
  out << csv_header << '\n';
  for (const auto& row : report.rows) {
    out << delta << ',' << row.d << ',';
    if (interval_target) {
      out << m << ',' << format_double(row.target_lower) << ','
          << format_double(row.target_upper) << ",,";
    } else {
      out << ",,," << format_double(row.target_lower) << ',';
    }
    out << format_double(row.empirical) << ',' << format_double(row.se) << ','
        << format_double(row.z) << '\n';
  }
}

}  // namespace rumor_locus
