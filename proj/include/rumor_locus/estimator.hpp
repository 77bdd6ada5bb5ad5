#pragma once

#include <rumor_locus/special_functions.hpp>
#include <rumor_locus/tree_sim.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rumor_locus {

enum class CenterClass { strict_center, tie_center, not_center };

enum class CentralityMode { automatic, exact, log_space };

// Rumor centrality of every infected node: the number of infection orderings
// that start at that node. Exact big integers up to n = 200; log-space
// beyond, with ties still decided by the exact subtree-size characterization.
struct CentralityTable {
  bool exact = true;
  std::vector<BigInt> counts;      // by node index (exact path)
  std::vector<double> log_values;  // by node index (log-space path)
  std::vector<int> argmax;         // node indices, size 1 or 2, ascending
};

inline CentralityTable rumor_centrality(const InfectedTree& tree,
                                        CentralityMode mode = CentralityMode::automatic) {
  const long n = tree.size();
  const std::vector<long> sub = tree.subtree_sizes();
  CentralityTable table;
  const bool exact = mode == CentralityMode::automatic ? n <= 200
                                                       : mode == CentralityMode::exact;
  table.exact = exact;
  if (exact) {
    // root value n! / prod_u |subtree(u)|, then reroot along each edge:
    // crossing from parent p to child c multiplies by |T_c| / (n - |T_c|).
    BigInt root;
    mpz_fac_ui(root.get_mpz_t(), static_cast<unsigned long>(n));
    BigInt denom = 1;
    for (long s : sub) denom *= s;
    table.counts.resize(static_cast<size_t>(n));
    mpz_divexact(table.counts[0].get_mpz_t(), root.get_mpz_t(), denom.get_mpz_t());
    for (int i = 1; i < n; ++i) {
      BigInt& value = table.counts[static_cast<size_t>(i)];
      value = table.counts[static_cast<size_t>(tree.parent(i))] *
              sub[static_cast<size_t>(i)];
      mpz_divexact_ui(value.get_mpz_t(), value.get_mpz_t(),
                      static_cast<unsigned long>(n - sub[static_cast<size_t>(i)]));
    }
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (table.counts[static_cast<size_t>(i)] > table.counts[static_cast<size_t>(best)]) {
        best = i;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (table.counts[static_cast<size_t>(i)] == table.counts[static_cast<size_t>(best)]) {
        table.argmax.push_back(i);
      }
    }
    return table;
  }
  table.log_values.resize(static_cast<size_t>(n));
  double root = log_gamma(static_cast<double>(n) + 1.0);
  for (long s : sub) root -= std::log(static_cast<double>(s));
  table.log_values[0] = root;
  for (int i = 1; i < n; ++i) {
    table.log_values[static_cast<size_t>(i)] =
        table.log_values[static_cast<size_t>(tree.parent(i))] +
        std::log(static_cast<double>(sub[static_cast<size_t>(i)])) -
        std::log(static_cast<double>(n - sub[static_cast<size_t>(i)]));
  }
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (table.log_values[static_cast<size_t>(i)] > table.log_values[static_cast<size_t>(best)]) {
      best = i;
    }
  }
  table.argmax.push_back(best);
  // a tie partner, if any, is the neighbor across an exact n/2 split; decided
  // in integers so float noise cannot corrupt tie statistics
  if (n % 2 == 0) {
    const long half = n / 2;
    for (int c : tree.children(best)) {
      if (sub[static_cast<size_t>(c)] == half) table.argmax.push_back(c);
    }
    if (best != 0 && n - sub[static_cast<size_t>(best)] == half) {
      table.argmax.push_back(tree.parent(best));
    }
  }
  std::sort(table.argmax.begin(), table.argmax.end());
  return table;
}

// Maximum-likelihood source estimate: argmax of rumor centrality, ties broken
// uniformly from the caller's stream.
inline NodePath ml_estimate(const InfectedTree& tree, RandomStream& stream,
                            CentralityMode mode = CentralityMode::automatic) {
  const CentralityTable table = rumor_centrality(tree, mode);
  int chosen = table.argmax.front();
  if (table.argmax.size() > 1) {
    chosen = table.argmax[static_cast<size_t>(
        stream.next_below(table.argmax.size()))];
  }
  return tree.path_of(chosen);
}

// Local-center classification of an infected node by its largest adjacent
// component: below n/2 the node beats every neighbor (strict), at exactly
// n/2 it ties the neighbor across that edge, above it loses.
inline CenterClass classify_center(const InfectedTree& tree, const NodePath& v) {
  const SubtreePartition part = subtree_partition(tree, v);
  long largest = 0;
  for (long s : part.sizes) largest = std::max(largest, s);
  const long twice = 2 * largest;
  if (twice < tree.size()) return CenterClass::strict_center;
  if (twice == tree.size()) return CenterClass::tie_center;
  return CenterClass::not_center;
}

}  // namespace rumor_locus
