#pragma once

// Brute-force ground truth at small scale, all in exact rationals. Nothing
// here shares formulas with the analytic module: enumeration is literal (no
// symmetry quotients) and capacity guards are hard errors, never truncations.

#include <rumor_locus/estimator.hpp>
#include <rumor_locus/tree_sim.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rumor_locus {

struct WeightedSequence {
  std::vector<NodePath> order;
  Rational prob;
};

namespace detail {

// Probability of any single length-n infection sequence: the boundary after
// j infected nodes always holds j(delta-2)+2 slots, whatever the shape.
inline Rational sequence_probability(int delta, int n) {
  Rational prob = 1;
  for (int j = 1; j <= n - 1; ++j) {
    prob /= static_cast<long>(j) * (delta - 2) + 2;
  }
  return prob;
}

// Depth-first enumeration of every infection sequence of length n, visiting
// the shared tree in lexicographic order of the next infected node's path.
template <typename Visitor>
void enumerate_infections(RegularTreeParams params, int n, Visitor&& visit) {
  InfectedTree tree(params);
  std::function<void()> recurse = [&] {
    if (tree.size() == n) {
      visit(const_cast<const InfectedTree&>(tree));
      return;
    }
    struct Choice {
      NodePath path;
      int parent;
      uint32_t slot;
    };
    std::vector<Choice> frontier;
    for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
      std::vector<bool> taken(static_cast<size_t>(tree.child_slots(i)), false);
      for (int c : tree.children(i)) taken[tree.slot_of(c)] = true;
      const NodePath base = tree.path_of(i);
      for (uint32_t s = 0; s < taken.size(); ++s) {
        if (!taken[s]) frontier.push_back(Choice{base.child(s), i, s});
      }
    }
    std::sort(frontier.begin(), frontier.end(),
              [](const Choice& a, const Choice& b) { return a.path < b.path; });
    for (const Choice& choice : frontier) {
      tree.add_child(choice.parent, choice.slot);
      recurse();
      tree.remove_last();
    }
  };
  recurse();
}

}  // namespace detail

inline std::vector<WeightedSequence> enumerate_sequences(RegularTreeParams params,
                                                         int n) {
  if (n < 1 || n > 9) {
    throw std::invalid_argument("enumerate_sequences: capacity guard is 1 <= n <= 9");
  }
  const Rational prob = detail::sequence_probability(params.delta, n);
  std::vector<WeightedSequence> out;
  detail::enumerate_infections(params, n, [&](const InfectedTree& tree) {
    WeightedSequence ws;
    ws.prob = prob;
    for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
      ws.order.push_back(tree.path_of(i));
    }
    out.push_back(std::move(ws));
  });
  return out;
}

// Exact Pr{ the k-th infected node is the fixed node at distance d straight
// down slot 0 }; all distance-d nodes are exchangeable.
inline Rational exact_arrival_prob(RegularTreeParams params, int d, int k) {
  if (d < 1) throw std::invalid_argument("exact_arrival_prob: d must be >= 1");
  if (k < 1 || k > 9) {
    throw std::invalid_argument("exact_arrival_prob: capacity guard is 1 <= k <= 9");
  }
  if (k <= d) return Rational(0);
  const NodePath target(std::vector<uint32_t>(static_cast<size_t>(d), 0));
  const Rational prob = detail::sequence_probability(params.delta, k);
  Rational total = 0;
  detail::enumerate_infections(params, k, [&](const InfectedTree& tree) {
    if (tree.path_of(static_cast<int>(tree.size()) - 1) == target) total += prob;
  });
  return total;
}

struct ExactDistanceDistribution {
  long n = 0;
  std::map<int, Rational> masses;
};

// Exhaustive exact distribution of the source-to-estimate distance: every
// sequence, classified by the largest-adjacent-component rule, ties split
// half and half.
inline ExactDistanceDistribution exact_distance_dist(RegularTreeParams params, int n) {
  if (n < 2 || n > 8) {
    throw std::invalid_argument("exact_distance_dist: capacity guard is 2 <= n <= 8");
  }
  const Rational prob = detail::sequence_probability(params.delta, n);
  const Rational half = Rational(1, 2);
  ExactDistanceDistribution dist;
  dist.n = n;
  detail::enumerate_infections(params, n, [&](const InfectedTree& tree) {
    const std::vector<long> sub = tree.subtree_sizes();
    std::vector<int> centers;
    bool tie = false;
    for (int v = 0; v < n; ++v) {
      long largest = (v == 0) ? 0 : n - sub[static_cast<size_t>(v)];
      for (int c : tree.children(v)) {
        largest = std::max(largest, sub[static_cast<size_t>(c)]);
      }
      if (2 * largest < n) {
        centers.assign(1, v);
        tie = false;
        break;
      }
      if (2 * largest == n) {
        centers.push_back(v);
        tie = true;
      }
    }
    if (tie) {
      for (int v : centers) dist.masses[tree.depth(v)] += prob * half;
    } else {
      dist.masses[tree.depth(centers.front())] += prob;
    }
  });
  return dist;
}

struct UrnSpec {
  std::vector<long> initial_counts;
  long increment = 1;
  int draws = 0;

  // The infection split around the k-th infected node: one ball per fresh
  // subtree, (k-1)(delta-2)+1 on the side holding the earlier nodes, and
  // delta-2 new slots exposed per draw.
  static UrnSpec infection(int delta, int k, long n) {
    if (delta < 3) throw std::invalid_argument("UrnSpec: degree must be >= 3");
    if (k < 2) throw std::invalid_argument("UrnSpec: k must be >= 2");
    if (n < k) throw std::invalid_argument("UrnSpec: need n >= k");
    UrnSpec spec;
    spec.initial_counts.assign(static_cast<size_t>(delta), 1);
    spec.initial_counts.back() = static_cast<long>(k - 1) * (delta - 2) + 1;
    spec.increment = delta - 2;
    spec.draws = static_cast<int>(n - k);
    return spec;
  }

  void validate() const {
    if (initial_counts.size() < 2) {
      throw std::invalid_argument("UrnSpec: need at least two colors");
    }
    for (long b : initial_counts) {
      if (b < 1) throw std::invalid_argument("UrnSpec: initial counts must be >= 1");
    }
    if (increment < 1) throw std::invalid_argument("UrnSpec: increment must be >= 1");
    if (draws < 0) throw std::invalid_argument("UrnSpec: draws must be >= 0");
    if (draws > 12) {
      throw std::invalid_argument("UrnSpec: capacity guard is draws <= 12");
    }
  }
};

namespace detail {

inline BigInt ascending_product(long base, long step, int terms) {
  BigInt acc = 1;
  for (int i = 0; i < terms; ++i) acc *= base + static_cast<long>(i) * step;
  return acc;
}

template <typename Visitor>
void for_each_composition(int total, int parts, std::vector<int>& buffer,
                          Visitor&& visit) {
  if (parts == 1) {
    buffer.push_back(total);
    visit(const_cast<const std::vector<int>&>(buffer));
    buffer.pop_back();
    return;
  }
  for (int head = 0; head <= total; ++head) {
    buffer.push_back(head);
    for_each_composition(total - head, parts - 1, buffer, visit);
    buffer.pop_back();
  }
}

}  // namespace detail

// Closed-form pmf over draw-count vectors y (sum = draws):
//   draws! / prod y_j! * prod_j b_j (b_j+m) ... (b_j+(y_j-1)m)
//                      / ( b (b+m) ... (b+(draws-1)m) ),  b = sum b_j.
inline std::map<std::vector<int>, Rational> exact_urn_dist(const UrnSpec& spec) {
  spec.validate();
  const int colors = static_cast<int>(spec.initial_counts.size());
  long total_balls = 0;
  for (long b : spec.initial_counts) total_balls += b;
  const BigInt denominator =
      detail::ascending_product(total_balls, spec.increment, spec.draws);
  BigInt draws_factorial;
  mpz_fac_ui(draws_factorial.get_mpz_t(), static_cast<unsigned long>(spec.draws));
  std::map<std::vector<int>, Rational> pmf;
  std::vector<int> buffer;
  detail::for_each_composition(spec.draws, colors, buffer, [&](const std::vector<int>& y) {
    BigInt numer = draws_factorial;
    for (int j = 0; j < colors; ++j) {
      BigInt factorial_yj;
      mpz_fac_ui(factorial_yj.get_mpz_t(), static_cast<unsigned long>(y[static_cast<size_t>(j)]));
      mpz_divexact(numer.get_mpz_t(), numer.get_mpz_t(), factorial_yj.get_mpz_t());
      numer *= detail::ascending_product(spec.initial_counts[static_cast<size_t>(j)],
                                         spec.increment, y[static_cast<size_t>(j)]);
    }
    Rational p(numer, denominator);
    p.canonicalize();
    pmf[y] = p;
  });
  return pmf;
}

// The same pmf by direct recursion on the last draw; must agree exactly.
inline std::map<std::vector<int>, Rational> exact_urn_dist_recursive(const UrnSpec& spec) {
  spec.validate();
  const int colors = static_cast<int>(spec.initial_counts.size());
  long total_balls = 0;
  for (long b : spec.initial_counts) total_balls += b;
  std::map<std::vector<int>, Rational> state;
  state[std::vector<int>(static_cast<size_t>(colors), 0)] = 1;
  for (int step = 0; step < spec.draws; ++step) {
    const long balls_now = total_balls + static_cast<long>(step) * spec.increment;
    std::map<std::vector<int>, Rational> next;
    for (const auto& [y, p] : state) {
      for (int j = 0; j < colors; ++j) {
        const long color_balls = spec.initial_counts[static_cast<size_t>(j)] +
                                 static_cast<long>(y[static_cast<size_t>(j)]) * spec.increment;
        std::vector<int> grown = y;
        ++grown[static_cast<size_t>(j)];
        Rational share = p * Rational(color_balls, balls_now);
        share.canonicalize();
        next[std::move(grown)] += share;
      }
    }
    state = std::move(next);
  }
  return state;
}

// Exact likelihood of the observed tree under source v: the number of
// connectivity-respecting orderings that start at v, times the fixed product
// of boundary reciprocals (the boundary in the infinite tree depends only on
// how many nodes are infected).
inline Rational exact_likelihood(const InfectedTree& tree, const NodePath& v) {
  const long n = tree.size();
  if (n > 7) {
    throw std::invalid_argument("exact_likelihood: capacity guard is n <= 7");
  }
  const int start = tree.index_of(v);
  std::vector<std::vector<int>> adjacency(static_cast<size_t>(n));
  for (int i = 1; i < n; ++i) {
    adjacency[static_cast<size_t>(i)].push_back(tree.parent(i));
    adjacency[static_cast<size_t>(tree.parent(i))].push_back(i);
  }
  std::vector<bool> infected(static_cast<size_t>(n), false);
  std::vector<int> frontier;
  long orderings = 0;
  std::function<void(long)> recurse = [&](long placed) {
    if (placed == n) {
      ++orderings;
      return;
    }
    for (size_t i = 0; i < frontier.size(); ++i) {
      const int pick = frontier[i];
      const std::vector<int> saved = frontier;
      frontier.erase(frontier.begin() + static_cast<long>(i));
      infected[static_cast<size_t>(pick)] = true;
      for (int nb : adjacency[static_cast<size_t>(pick)]) {
        if (!infected[static_cast<size_t>(nb)]) frontier.push_back(nb);
      }
      recurse(placed + 1);
      infected[static_cast<size_t>(pick)] = false;
      frontier = saved;
    }
  };
  frontier.push_back(start);
  recurse(0);
  return orderings * detail::sequence_probability(tree.delta(), static_cast<int>(n));
}

}  // namespace rumor_locus
