#pragma once

#include <rumor_locus/analytic.hpp>
#include <rumor_locus/node_path.hpp>
#include <rumor_locus/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rumor_locus {

enum class SimMode { uniform, clock };

// The infected subgraph: a finite subtree of the infinite regular tree,
// stored in infection order (index 0 is the source, index k the (k+1)-th
// infected node; every parent precedes its children).
class InfectedTree {
 public:
  explicit InfectedTree(RegularTreeParams params) : delta_(params.delta) {
    nodes_.push_back(Node{-1, 0, 0, {}});
  }

  int delta() const { return delta_; }
  long size() const { return static_cast<long>(nodes_.size()); }

  int parent(int idx) const { return at(idx).parent; }
  uint32_t slot_of(int idx) const { return at(idx).slot; }
  int depth(int idx) const { return at(idx).depth; }
  const std::vector<int>& children(int idx) const { return at(idx).children; }

  // Number of child slots a node offers: the source has delta, every other
  // node delta-1 (its last slot is the parent direction).
  int child_slots(int idx) const { return idx == 0 ? delta_ : delta_ - 1; }

  // Attach a new node at a free child slot of an infected node; returns the
  // new node's index (== previous size). The new node is the latest infected.
  int add_child(int parent_idx, uint32_t slot) {
    const Node& p = at(parent_idx);
    if (slot >= static_cast<uint32_t>(child_slots(parent_idx))) {
      throw std::invalid_argument("InfectedTree: slot " + std::to_string(slot) +
                                  " out of range");
    }
    for (int c : p.children) {
      if (nodes_[static_cast<size_t>(c)].slot == slot) {
        throw std::invalid_argument("InfectedTree: slot already occupied");
      }
    }
    const int idx = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{parent_idx, slot, p.depth + 1, {}});
    nodes_[static_cast<size_t>(parent_idx)].children.push_back(idx);
    return idx;
  }

  // Drop the most recently infected node (enumeration support).
  void remove_last() {
    if (nodes_.size() <= 1) {
      throw std::invalid_argument("InfectedTree: cannot remove the source");
    }
    const int idx = static_cast<int>(nodes_.size()) - 1;
    auto& siblings = nodes_[static_cast<size_t>(nodes_.back().parent)].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), idx));
    nodes_.pop_back();
  }

  NodePath path_of(int idx) const {
    std::vector<uint32_t> symbols;
    int cur = idx;
    while (cur != 0) {
      symbols.push_back(at(cur).slot);
      cur = at(cur).parent;
    }
    std::reverse(symbols.begin(), symbols.end());
    return NodePath(std::move(symbols));
  }

  // Walks an address down from the source; -1 if that node is not infected.
  int find(const NodePath& path) const {
    int cur = 0;
    for (int i = 0; i < path.length(); ++i) {
      const uint32_t slot = path.symbol(i);
      int next = -1;
      for (int c : at(cur).children) {
        if (nodes_[static_cast<size_t>(c)].slot == slot) {
          next = c;
          break;
        }
      }
      if (next < 0) return -1;
      cur = next;
    }
    return cur;
  }

  int index_of(const NodePath& path) const {
    const int idx = find(path);
    if (idx < 0) {
      throw std::invalid_argument("InfectedTree: node '" + path.str() +
                                  "' is not infected");
    }
    return idx;
  }

  // Size of the subtree (among infected nodes) hanging below each node.
  std::vector<long> subtree_sizes() const {
    std::vector<long> sub(nodes_.size(), 1);
    for (size_t i = nodes_.size() - 1; i >= 1; --i) {
      sub[static_cast<size_t>(nodes_[i].parent)] += sub[i];
    }
    return sub;
  }

 private:
  struct Node {
    int parent;
    uint32_t slot;
    int depth;
    std::vector<int> children;
  };

  const Node& at(int idx) const {
    if (idx < 0 || idx >= static_cast<int>(nodes_.size())) {
      throw std::invalid_argument("InfectedTree: node index out of range");
    }
    return nodes_[static_cast<size_t>(idx)];
  }

  int delta_;
  std::vector<Node> nodes_;
};

// Sizes of the delta components the infinite tree splits into around an
// infected node v, counting infected nodes only. Indexed by v's slots; for a
// non-source v the last slot (delta-1) is the parent direction, which is the
// side containing the source.
struct SubtreePartition {
  std::vector<long> sizes;
  int source_slot;  // delta-1 for non-source nodes, -1 for the source
};

inline SubtreePartition subtree_partition(const InfectedTree& tree, const NodePath& v) {
  const int idx = tree.index_of(v);
  const std::vector<long> sub = tree.subtree_sizes();
  SubtreePartition part;
  part.sizes.assign(static_cast<size_t>(tree.delta()), 0);
  for (int c : tree.children(idx)) {
    part.sizes[tree.slot_of(c)] = sub[static_cast<size_t>(c)];
  }
  if (idx == 0) {
    part.source_slot = -1;
  } else {
    part.source_slot = tree.delta() - 1;
    part.sizes[static_cast<size_t>(part.source_slot)] =
        tree.size() - sub[static_cast<size_t>(idx)];
  }
  return part;
}

namespace detail {

struct BoundarySlot {
  int parent;
  uint32_t slot;
};

// Grow by repeatedly picking a uniform free slot. The observer sees
// (boundary size, picked position) before each attachment; used by the
// recurrence property checks.
template <typename Observer>
void grow_uniform_observed(InfectedTree& tree, long n, RandomStream& stream,
                           Observer&& observe) {
  std::vector<BoundarySlot> boundary;
  for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
    std::vector<bool> taken(static_cast<size_t>(tree.child_slots(i)), false);
    for (int c : tree.children(i)) taken[tree.slot_of(c)] = true;
    for (uint32_t s = 0; s < taken.size(); ++s) {
      if (!taken[s]) boundary.push_back(BoundarySlot{i, s});
    }
  }
  while (tree.size() < n) {
    const size_t pick = stream.next_below(boundary.size());
    observe(static_cast<long>(boundary.size()), static_cast<long>(pick));
    const BoundarySlot chosen = boundary[pick];
    boundary[pick] = boundary.back();
    boundary.pop_back();
    const int idx = tree.add_child(chosen.parent, chosen.slot);
    for (uint32_t s = 0; s + 1 < static_cast<uint32_t>(tree.delta()); ++s) {
      boundary.push_back(BoundarySlot{idx, s});
    }
  }
}

}  // namespace detail

// Continue an existing infection until n nodes are infected, jump-chain form:
// each step picks uniformly among the free slots bordering the infected set.
inline void grow_uniform(InfectedTree& tree, long n, RandomStream& stream) {
  detail::grow_uniform_observed(tree, n, stream, [](long, long) {});
}

inline InfectedTree simulate_uniform(RegularTreeParams params, long n,
                                     RandomStream& stream) {
  if (n < 1) throw std::invalid_argument("simulate_uniform: n must be >= 1");
  InfectedTree tree(params);
  grow_uniform(tree, n, stream);
  return tree;
}

// Event-clock form: every free slot receives an independent exponential
// delay; memorylessness makes the law identical to the jump chain. Ties in
// the heap are broken by insertion sequence, which is unreachable for
// continuous clocks but keeps the run deterministic.
inline InfectedTree simulate_clock(RegularTreeParams params, long n,
                                   RandomStream& stream) {
  if (n < 1) throw std::invalid_argument("simulate_clock: n must be >= 1");
  InfectedTree tree(params);
  struct Event {
    double time;
    uint64_t sequence;
    int parent;
    uint32_t slot;
  };
  const auto later = [](const Event& a, const Event& b) {
    return a.time > b.time || (a.time == b.time && a.sequence > b.sequence);
  };
  std::priority_queue<Event, std::vector<Event>, decltype(later)> queue(later);
  uint64_t sequence = 0;
  const auto arm = [&](int idx, double now) {
    for (uint32_t s = 0; s < static_cast<uint32_t>(tree.child_slots(idx)); ++s) {
      queue.push(Event{now + stream.next_exponential(), sequence++, idx, s});
    }
  };
  arm(0, 0.0);
  while (tree.size() < n) {
    const Event event = queue.top();
    queue.pop();
    const int idx = tree.add_child(event.parent, event.slot);
    arm(idx, event.time);
  }
  return tree;
}

inline InfectedTree simulate(RegularTreeParams params, long n, SimMode mode,
                             RandomStream& stream) {
  return mode == SimMode::uniform ? simulate_uniform(params, n, stream)
                                  : simulate_clock(params, n, stream);
}

// JSON form: {"delta": d, "source": "", "order": [path, ...]} with paths in
// infection order, the source ("") first.
inline nlohmann::json to_json(const InfectedTree& tree) {
  nlohmann::json order = nlohmann::json::array();
  for (int i = 0; i < static_cast<int>(tree.size()); ++i) {
    order.push_back(tree.path_of(i).str());
  }
  return nlohmann::json{
      {"delta", tree.delta()}, {"source", ""}, {"order", std::move(order)}};
}

inline InfectedTree tree_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("delta") || !doc.contains("order")) {
    throw std::invalid_argument("tree file: expected an object with 'delta' and 'order'");
  }
  if (!doc["delta"].is_number_integer()) {
    throw std::invalid_argument("tree file: 'delta' must be an integer");
  }
  InfectedTree tree(RegularTreeParams(doc["delta"].get<int>()));
  const auto& order = doc["order"];
  if (!order.is_array() || order.empty()) {
    throw std::invalid_argument("tree file: 'order' must be a non-empty array");
  }
  if (doc.contains("source") &&
      (!doc["source"].is_string() || !doc["source"].get<std::string>().empty())) {
    throw std::invalid_argument("tree file: 'source' must be the empty path \"\"");
  }
  for (size_t i = 0; i < order.size(); ++i) {
    if (!order[i].is_string()) {
      throw std::invalid_argument("tree file: order[" + std::to_string(i) +
                                  "] is not a string");
    }
    NodePath path;
    try {
      path = NodePath::parse(order[i].get<std::string>());
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument("tree file: order[" + std::to_string(i) +
                                  "]: " + err.what());
    }
    if (i == 0) {
      if (!path.is_source()) {
        throw std::invalid_argument("tree file: order[0] must be the source \"\"");
      }
      continue;
    }
    if (path.is_source()) {
      throw std::invalid_argument("tree file: duplicate source at order[" +
                                  std::to_string(i) + "]");
    }
    const int parent_idx = tree.find(path.parent());
    if (parent_idx < 0) {
      throw std::invalid_argument("tree file: order[" + std::to_string(i) + "] '" +
                                  path.str() + "' appears before its parent");
    }
    if (tree.find(path) >= 0) {
      throw std::invalid_argument("tree file: duplicate node at order[" +
                                  std::to_string(i) + "]");
    }
    try {
      tree.add_child(parent_idx, path.symbol(path.length() - 1));
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument("tree file: order[" + std::to_string(i) +
                                  "]: " + err.what());
    }
  }
  return tree;
}

}  // namespace rumor_locus
