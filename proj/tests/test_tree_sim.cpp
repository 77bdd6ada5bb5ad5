#include <catch2/catch_amalgamated.hpp>

#include <rumor_locus/oracle.hpp>
#include <rumor_locus/stats.hpp>
#include <rumor_locus/tree_sim.hpp>

#include "property_checks.hpp"

#include <map>
#include <string>
#include <vector>

namespace {
using namespace rumor_locus;
using Catch::Matchers::ContainsSubstring;

InfectedTree chain3() {
  InfectedTree tree((RegularTreeParams(3)));
  tree.add_child(0, 0);
  tree.add_child(1, 0);
  return tree;
}

}  // namespace

TEST_CASE("node addresses: text round trip") {
  CHECK(NodePath::parse("").is_source());
  CHECK(NodePath::parse("").str() == "");
  CHECK(NodePath::parse("7").symbols() == std::vector<uint32_t>{7});
  const NodePath path = NodePath::parse("0.2.1");
  CHECK(path.length() == 3);
  CHECK(path.symbol(1) == 2);
  CHECK(path.str() == "0.2.1");
  CHECK(NodePath::parse(path.str()) == path);
  CHECK(NodePath::parse("0.2").child(1) == path);
  CHECK(path.parent() == NodePath::parse("0.2"));
  CHECK(path != path.parent());
  CHECK(path.parent() < path);
  CHECK_THROWS_AS(NodePath().parent(), std::invalid_argument);
  for (const std::string bad : {".", "0..1", "0.", ".1", "0.a", "-1", "1 2"}) {
    CHECK_THROWS_AS(NodePath::parse(bad), std::invalid_argument);
  }
}

TEST_CASE("node addresses: tree distance via the meeting point") {
  const NodePath source;
  CHECK(distance(source, source) == 0);
  CHECK(distance(source, NodePath::parse("0.1")) == 2);
  CHECK(distance(NodePath::parse("0.1"), source) == 2);
  CHECK(distance(NodePath::parse("0"), NodePath::parse("1")) == 2);
  CHECK(distance(NodePath::parse("0.0"), NodePath::parse("0.1")) == 2);
  CHECK(distance(NodePath::parse("0.0.1"), NodePath::parse("0")) == 2);
  CHECK(distance(NodePath::parse("2.0.1"), NodePath::parse("2.0.1")) == 0);
  CHECK(distance(NodePath::parse("1.0"), NodePath::parse("2.1.1")) == 5);
}

TEST_CASE("infected tree: slot discipline") {
  InfectedTree tree((RegularTreeParams(3)));
  CHECK(tree.size() == 1);
  CHECK(tree.delta() == 3);
  CHECK(tree.child_slots(0) == 3);
  CHECK(tree.depth(0) == 0);

  const int a = tree.add_child(0, 1);
  CHECK(a == 1);
  CHECK(tree.parent(a) == 0);
  CHECK(tree.slot_of(a) == 1);
  CHECK(tree.depth(a) == 1);
  CHECK(tree.child_slots(a) == 2);

  CHECK_THROWS_AS(tree.add_child(0, 1), std::invalid_argument);  // occupied
  CHECK_THROWS_AS(tree.add_child(0, 3), std::invalid_argument);  // out of range
  CHECK_THROWS_AS(tree.add_child(a, 2), std::invalid_argument);  // parent slot

  CHECK(tree.path_of(a).str() == "1");
  CHECK(tree.find(NodePath::parse("1")) == a);
  CHECK(tree.find(NodePath::parse("0")) == -1);
  CHECK_THROWS_AS(tree.index_of(NodePath::parse("1.0")), std::invalid_argument);

  tree.remove_last();
  CHECK(tree.size() == 1);
  CHECK(tree.add_child(0, 1) == 1);  // slot freed again
  InfectedTree lone((RegularTreeParams(3)));
  CHECK_THROWS_AS(lone.remove_last(), std::invalid_argument);
}

TEST_CASE("infected tree: subtree partition around each node") {
  const InfectedTree tree = chain3();

  SubtreePartition at_source = subtree_partition(tree, NodePath());
  CHECK(at_source.source_slot == -1);
  CHECK(at_source.sizes == std::vector<long>{2, 0, 0});

  SubtreePartition at_middle = subtree_partition(tree, NodePath::parse("0"));
  CHECK(at_middle.source_slot == 2);
  CHECK(at_middle.sizes == std::vector<long>{1, 0, 1});

  SubtreePartition at_leaf = subtree_partition(tree, NodePath::parse("0.0"));
  CHECK(at_leaf.sizes == std::vector<long>{0, 0, 2});

  // the components always account for everything except the node itself
  for (int delta : {3, 4}) {
    RandomStream stream(2024, static_cast<uint64_t>(delta));
    const InfectedTree random_tree =
        simulate_uniform(RegularTreeParams(delta), 25, stream);
    for (int v = 0; v < random_tree.size(); ++v) {
      const SubtreePartition part =
          subtree_partition(random_tree, random_tree.path_of(v));
      CHECK(part.sizes.size() == static_cast<size_t>(delta));
      long total = 0;
      for (long s : part.sizes) total += s;
      CHECK(total == random_tree.size() - 1);
    }
  }
}

TEST_CASE("uniform growth: boundary recurrence holds along every run") {
  std::string why;
  const bool ok = checks::boundary_recurrence(&why);
  INFO(why);
  CHECK(ok);
}

TEST_CASE("uniform growth: the first infection is uniform over the source slots") {
  const long trials = 30000;
  std::map<int, long> counts;
  for (long t = 0; t < trials; ++t) {
    RandomStream stream(7, static_cast<uint64_t>(t));
    const InfectedTree tree = simulate_uniform(RegularTreeParams(3), 2, stream);
    counts[static_cast<int>(tree.slot_of(1))] += 1;
  }
  const std::map<int, double> uniform{{0, 1.0 / 3}, {1, 1.0 / 3}, {2, 1.0 / 3}};
  const ChiSquareResult result = pooled_chi_square(counts, uniform, trials);
  INFO("chi2=" << result.statistic << " p=" << result.p_value);
  CHECK(result.p_value > 0.01);
}

TEST_CASE("uniform and clock modes sample the same four-node shape law") {
  // shapes keyed by total node depth: star 3, cherry 4, T 5, chain 6, with
  // exact masses 6/60, 36/60, 6/60, 12/60 from the per-sequence probability
  const std::map<int, double> shape_law{
      {3, 0.1}, {4, 0.6}, {5, 0.1}, {6, 0.2}};
  const long trials = 100000;
  std::map<SimMode, std::map<int, long>> counts;
  for (SimMode mode : {SimMode::uniform, SimMode::clock}) {
    for (long t = 0; t < trials; ++t) {
      RandomStream stream(mode == SimMode::uniform ? 100 : 101,
                          static_cast<uint64_t>(t));
      const InfectedTree tree = simulate(RegularTreeParams(3), 4, mode, stream);
      int depth_sum = 0;
      for (int v = 1; v < 4; ++v) depth_sum += tree.depth(v);
      counts[mode][depth_sum] += 1;
    }
  }
  for (const auto& [mode, histogram] : counts) {
    const ChiSquareResult fit = pooled_chi_square(histogram, shape_law, trials);
    INFO("mode=" << (mode == SimMode::uniform ? "uniform" : "clock")
                 << " chi2=" << fit.statistic << " p=" << fit.p_value);
    CHECK(fit.p_value > 0.01);
  }
  const ChiSquareResult both = two_sample_chi_square(counts[SimMode::uniform],
                                                     counts[SimMode::clock]);
  INFO("two-sample chi2=" << both.statistic << " p=" << both.p_value);
  CHECK(both.p_value > 0.01);
}

TEST_CASE("uniform growth: fixed-node arrival frequencies match the closed form") {
  struct Probe {
    int delta;
    int d;
    int k;
  };
  for (const Probe probe : {Probe{3, 1, 2}, Probe{3, 1, 3}, Probe{3, 2, 3},
                            Probe{4, 1, 3}}) {
    const NodePath target(
        std::vector<uint32_t>(static_cast<size_t>(probe.d), 0));
    const long trials = 200000;
    long hits = 0;
    for (long t = 0; t < trials; ++t) {
      RandomStream stream(900 + probe.delta * 10 + probe.k,
                          static_cast<uint64_t>(t));
      const InfectedTree tree =
          simulate_uniform(RegularTreeParams(probe.delta), probe.k, stream);
      if (tree.path_of(static_cast<int>(tree.size()) - 1) == target) ++hits;
    }
    const double p = arrival_prob(probe.delta, probe.d, probe.k);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    const double empirical = static_cast<double>(hits) / static_cast<double>(trials);
    INFO("delta=" << probe.delta << " d=" << probe.d << " k=" << probe.k
                  << " empirical=" << empirical << " expected=" << p);
    CHECK(std::fabs(empirical - p) <= 4.0 * se);
  }
}

TEST_CASE("uniform growth: the split around the second infected node is the urn law") {
  // condition on the second infected node being the source's slot-0 child,
  // then the three component sizes around it follow the reinforced urn
  const int n = 6;
  const UrnSpec spec = UrnSpec::infection(3, 2, n);
  const std::map<std::vector<int>, Rational> pmf = exact_urn_dist(spec);
  const auto encode = [](int y0, int y1, int y2) { return (y0 * 5 + y1) * 5 + y2; };
  std::map<int, double> law;
  for (const auto& [y, p] : pmf) {
    law[encode(y[0], y[1], y[2])] = p.get_d();
  }

  const NodePath v = NodePath::parse("0");
  const long trials = 60000;
  long accepted = 0;
  std::map<int, long> counts;
  for (long t = 0; t < trials; ++t) {
    RandomStream stream(5150, static_cast<uint64_t>(t));
    const InfectedTree tree = simulate_uniform(RegularTreeParams(3), n, stream);
    if (tree.path_of(1) != v) continue;
    ++accepted;
    const SubtreePartition part = subtree_partition(tree, v);
    counts[encode(static_cast<int>(part.sizes[0]), static_cast<int>(part.sizes[1]),
                  static_cast<int>(part.sizes[2]) - 1)] += 1;
  }
  REQUIRE(accepted > trials / 4);  // acceptance rate is 1/3
  const ChiSquareResult fit = pooled_chi_square(counts, law, accepted);
  INFO("accepted=" << accepted << " chi2=" << fit.statistic << " p=" << fit.p_value);
  CHECK(fit.p_value > 0.01);
}

TEST_CASE("simulation is reproducible per (seed, substream)") {
  RandomStream a(77, 5);
  RandomStream b(77, 5);
  RandomStream c(77, 6);
  const InfectedTree first = simulate_uniform(RegularTreeParams(3), 40, a);
  const InfectedTree second = simulate_uniform(RegularTreeParams(3), 40, b);
  const InfectedTree third = simulate_uniform(RegularTreeParams(3), 40, c);
  CHECK(to_json(first) == to_json(second));
  CHECK(to_json(first) != to_json(third));

  RandomStream d(77, 5);
  RandomStream e(77, 5);
  const InfectedTree clock_first = simulate_clock(RegularTreeParams(4), 25, d);
  const InfectedTree clock_second = simulate_clock(RegularTreeParams(4), 25, e);
  CHECK(to_json(clock_first) == to_json(clock_second));
}

TEST_CASE("simulate validates its arguments") {
  RandomStream stream(1, 0);
  CHECK_THROWS_AS(simulate_uniform(RegularTreeParams(3), 0, stream),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_clock(RegularTreeParams(3), -2, stream),
                  std::invalid_argument);
  CHECK_THROWS_AS(RegularTreeParams(2), std::invalid_argument);
  const InfectedTree tiny = simulate(RegularTreeParams(3), 1, SimMode::clock, stream);
  CHECK(tiny.size() == 1);
}

TEST_CASE("tree JSON: round trip preserves the infection order") {
  RandomStream stream(31337, 0);
  const InfectedTree tree = simulate_uniform(RegularTreeParams(3), 12, stream);
  const nlohmann::json doc = to_json(tree);
  CHECK(doc["delta"] == 3);
  CHECK(doc["source"] == "");
  CHECK(doc["order"].size() == 12);
  CHECK(doc["order"][0] == "");

  const InfectedTree back = tree_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(to_json(back) == doc);
  CHECK(back.size() == tree.size());
  for (int i = 0; i < tree.size(); ++i) {
    CHECK(back.path_of(i) == tree.path_of(i));
  }
}

TEST_CASE("tree JSON: malformed documents are rejected with locations") {
  using nlohmann::json;
  const auto reject = [](const json& doc, const char* fragment) {
    CHECK_THROWS_WITH(tree_from_json(doc), ContainsSubstring(fragment));
  };
  reject(json::array(), "expected an object");
  reject(json{{"order", {""}}}, "delta");
  reject(json{{"delta", "three"}, {"order", {""}}}, "integer");
  reject(json{{"delta", 3}}, "expected an object");
  reject(json{{"delta", 3}, {"order", json::array()}}, "non-empty");
  reject(json{{"delta", 3}, {"order", {"0"}}}, "order[0]");
  reject(json{{"delta", 3}, {"order", {"", 4}}}, "order[1]");
  reject(json{{"delta", 3}, {"order", {"", ""}}}, "duplicate source");
  reject(json{{"delta", 3}, {"order", {"", "0.0"}}}, "before its parent");
  reject(json{{"delta", 3}, {"order", {"", "0", "0"}}}, "duplicate node at order[2]");
  reject(json{{"delta", 3}, {"order", {"", "x"}}}, "bad symbol");
  reject(json{{"delta", 3}, {"order", {"", "3"}}}, "order[1]");  // slot range
  reject(json{{"delta", 3}, {"order", {"", "0", "0.2"}}}, "order[2]");  // parent slot
  reject(json{{"delta", 2}, {"order", {""}}}, "degree");
  reject(json{{"delta", 3}, {"source", "0"}, {"order", {""}}}, "empty path");
}
