// Acceptance gate: nine numbered criteria, one printed verdict line each,
// exit 0 only if every criterion holds. Each body recomputes its claim from
// the public API; nothing here reuses unit-test state.

#include <rumor_locus/experiment.hpp>
#include <rumor_locus/oracle.hpp>
#include <rumor_locus/stats.hpp>

#include "property_checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace rumor_locus;

bool limit_endpoints(std::string& detail) {
  const double at3 = limit_correct_prob(3);
  const double at1000 = limit_correct_prob(1000);
  const double tail = 1.0 - std::numbers::ln2;
  std::ostringstream os;
  os << "limit(3)=" << at3 << " limit(1000)=" << at1000 << " vs " << tail;
  detail = os.str();
  return std::fabs(at3 - 0.25) <= 1e-9 && std::fabs(at1000 - tail) <= 1e-2;
}

bool caption_anchors(std::string& detail) {
  const double exact3 = cumulative_within_exact_delta3(3);
  const double lower6 = cumulative_within_bounds(6, 3, 40).first;
  std::ostringstream os;
  os << "cum_exact(3,3)=" << exact3 << " cum_lower(6,3,40)=" << lower6;
  detail = os.str();
  return std::fabs(exact3 - 0.968) <= 1e-3 && std::fabs(lower6 - 0.985) <= 1e-3;
}

bool truncation_width(std::string& detail) {
  const double width = bound_width(40);
  std::ostringstream os;
  os << "epsilon(40)=" << width;
  detail = os.str();
  if (!(width >= 9e-8 && width <= 1.1e-7)) return false;
  for (int delta = 3; delta <= 8; ++delta) {
    for (int d = 1; d <= 3; ++d) {
      const double gap = distance_prob_lower_bound(delta, d, 60) -
                         distance_prob_lower_bound(delta, d, 40);
      if (!(gap <= width)) {
        os << "; gap(" << delta << "," << d << ")=" << gap;
        detail = os.str();
        return false;
      }
    }
  }
  return true;
}

bool series_certifies_closed_form(std::string& detail) {
  for (int d = 1; d <= 8; ++d) {
    const double series = limit_distance_prob_series(d, 60);
    const double closed = limit_distance_prob_delta3(d);
    if (std::fabs(series - closed) > 1e-9) {
      std::ostringstream os;
      os << "series/closed split at d=" << d << ": " << series << " vs " << closed;
      detail = os.str();
      return false;
    }
  }
  const double anchor = 6.0 * std::numbers::ln2 - 15.0 / 4.0;
  const double got = limit_distance_prob_delta3(1);
  std::ostringstream os;
  os << "f(1)=" << got << " anchor=" << anchor;
  detail = os.str();
  return std::fabs(got - anchor) <= 1e-12;
}

bool oracle_equivalence(std::string& detail) {
  for (int n = 2; n <= 8; ++n) {
    const ExactDistanceDistribution truth =
        exact_distance_dist(RegularTreeParams(3), n);
    for (int d = 0; d < n; ++d) {
      const auto it = truth.masses.find(d);
      const double want = it == truth.masses.end() ? 0.0 : it->second.get_d();
      const double got = exact_distance_prob_delta3(n, d);
      if (std::fabs(got - want) > 1e-12) {
        std::ostringstream os;
        os << "distance law split at n=" << n << " d=" << d << ": " << got
           << " vs " << want;
        detail = os.str();
        return false;
      }
    }
  }
  for (int delta : {3, 4, 5}) {
    for (int d : {1, 2}) {
      for (int arrival_k = d + 1; arrival_k <= 6; ++arrival_k) {
        const double want =
            exact_arrival_prob(RegularTreeParams(delta), d, arrival_k).get_d();
        const double got = arrival_prob(delta, d, arrival_k);
        if (std::fabs(got - want) > 1e-12) {
          std::ostringstream os;
          os << "arrival split at delta=" << delta << " d=" << d
             << " k=" << arrival_k;
          detail = os.str();
          return false;
        }
      }
    }
  }
  const std::vector<UrnSpec> specs{
      UrnSpec::infection(3, 2, 8), UrnSpec::infection(3, 3, 9),
      UrnSpec::infection(4, 2, 8), UrnSpec::infection(4, 3, 9),
      UrnSpec::infection(5, 2, 6)};
  for (const UrnSpec& spec : specs) {
    const auto closed = exact_urn_dist(spec);
    const auto recursive = exact_urn_dist_recursive(spec);
    Rational total = 0;
    for (const auto& [y, p] : closed) total += p;
    if (closed != recursive || total != 1) {
      detail = "urn closed form disagrees with the draw-by-draw recursion";
      return false;
    }
  }
  detail = "n in 2..8 distance law, arrival grid, urn grid";
  return true;
}

bool estimator_exhaustive(std::string& detail) {
  long shapes = 0;
  for (int n = 2; n <= 6; ++n) {
    std::set<std::string> seen;
    bool ok = true;
    std::string reason;
    rumor_locus::detail::enumerate_infections(
        RegularTreeParams(3), n, [&](const InfectedTree& tree) {
          if (!ok) return;
          std::vector<std::string> paths;
          for (int i = 0; i < tree.size(); ++i) {
            paths.push_back(tree.path_of(i).str());
          }
          std::sort(paths.begin(), paths.end());
          std::string key;
          for (const std::string& p : paths) {
            key += p;
            key += '|';
          }
          if (!seen.insert(key).second) return;
          ++shapes;

          const CentralityTable table = rumor_centrality(tree);
          Rational top = 0;
          std::vector<Rational> likelihood(static_cast<size_t>(n));
          for (int v = 0; v < n; ++v) {
            likelihood[static_cast<size_t>(v)] =
                exact_likelihood(tree, tree.path_of(v));
            if (likelihood[static_cast<size_t>(v)] > top) {
              top = likelihood[static_cast<size_t>(v)];
            }
          }
          std::set<int> best_by_likelihood;
          for (int v = 0; v < n; ++v) {
            if (likelihood[static_cast<size_t>(v)] == top) {
              best_by_likelihood.insert(v);
            }
          }
          const std::set<int> best(table.argmax.begin(), table.argmax.end());
          if (best != best_by_likelihood) {
            ok = false;
            reason = "likelihood and centrality argmax differ at n=" +
                     std::to_string(n);
            return;
          }
          // selection probability per node: 1 when it is the strict center,
          // 1/2 when it is one of a tie pair, 0 otherwise
          for (int v = 0; v < n; ++v) {
            const CenterClass cls = classify_center(tree, tree.path_of(v));
            const bool selected = best.count(v) > 0;
            const bool expected_strict = selected && best.size() == 1;
            const bool expected_tie = selected && best.size() == 2;
            if ((cls == CenterClass::strict_center) != expected_strict ||
                (cls == CenterClass::tie_center) != expected_tie ||
                (cls == CenterClass::not_center) == selected) {
              ok = false;
              reason = "classification vs selection mismatch at n=" +
                       std::to_string(n);
              return;
            }
          }
        });
    if (!ok) {
      detail = reason;
      return false;
    }
  }
  detail = std::to_string(shapes) + " distinct shapes checked";
  return true;
}

bool monte_carlo_convergence(std::string& detail) {
  ExperimentConfig config;
  config.params = RegularTreeParams(3);
  config.n = 101;
  config.trials = 200000;
  config.master_seed = 1;
  config.mode = SimMode::uniform;
  const DistanceDistribution empirical = run_trials(config);
  const DistanceDistribution target = exact_distribution_delta3(101, 3);
  const ComparisonReport report = compare(empirical, target);
  std::ostringstream os;
  os << "z =";
  for (const ComparisonRow& row : report.rows) {
    os << ' ' << row.z;
    if (std::fabs(row.z) > 4.0) {
      detail = os.str() + " (exceeds 4)";
      return false;
    }
  }
  detail = os.str();
  return report.pass;
}

bool beta_split_limit(std::string& detail) {
  const long population = 4001;
  const int wanted = 10000;
  std::vector<double> fractions;
  fractions.reserve(static_cast<size_t>(wanted));
  long attempts = 0;
  while (static_cast<int>(fractions.size()) < wanted && attempts < 200000) {
    RandomStream stream(8, static_cast<uint64_t>(attempts));
    ++attempts;
    InfectedTree tree((RegularTreeParams(3)));
    grow_uniform(tree, 2, stream);
    if (tree.slot_of(1) != 0) continue;  // condition: fixed first neighbor
    grow_uniform(tree, population, stream);
    const std::vector<long> sub = tree.subtree_sizes();
    const long source_side = population - sub[1];
    fractions.push_back(static_cast<double>(source_side) /
                        static_cast<double>(population));
  }
  if (static_cast<int>(fractions.size()) < wanted) {
    detail = "rejection sampler starved";
    return false;
  }
  const double ks = ks_statistic(
      fractions, [](double x) { return x * x * (3.0 - 2.0 * x); });
  std::ostringstream os;
  os << "KS=" << ks << " over " << wanted << " conditioned runs ("
     << attempts << " attempts)";
  detail = os.str();
  return ks < 0.03;
}

bool property_suites(std::string& detail) {
  std::string why;
  const bool ok = checks::zeta_shift_identity(&why) &&
                  checks::stirling_bridge(&why) &&
                  checks::stirling_row_sum(&why) &&
                  checks::beta_reflection_and_monotonicity(&why) &&
                  checks::boundary_recurrence(&why) &&
                  checks::mode_equivalence(&why);
  detail = ok ? "zeta shift, stirling bridge, row sum, beta reflection, "
                "boundary recurrence, mode equivalence"
              : why;
  return ok;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "limit of correct detection at degree 3 and in the tail", limit_endpoints},
      {2, "cumulative within-distance caption anchors", caption_anchors},
      {3, "truncation width and the 40-to-60 tail gap", truncation_width},
      {4, "series certifies the closed-form distance limit", series_certifies_closed_form},
      {5, "exact oracles match the analytic forms", oracle_equivalence},
      {6, "estimator equals exhaustive likelihood with exact tie law", estimator_exhaustive},
      {7, "sampled distances match exact finite-n masses (n=101)", monte_carlo_convergence},
      {8, "conditioned split fraction converges to its smooth limit", beta_split_limit},
      {9, "shared property suites", property_suites},
  };

  bool all_pass = true;
  for (const Criterion& criterion : criteria) {
    const auto started = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& err) {
      detail = std::string("exception: ") + err.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    std::printf("[%s] criterion %d: %s (%.2f s) -- %s\n", ok ? "PASS" : "FAIL",
                criterion.id, criterion.label, seconds, detail.c_str());
    if (!ok) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
