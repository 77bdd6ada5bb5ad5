#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rumor_locus {

// Address of a node of the infinite regular tree, rooted at the source: the
// sequence of child slots walked from the source. The empty path is the
// source itself. The first symbol ranges over the source's delta slots;
// every later symbol over delta-1 slots, because slot delta-1 of a non-source
// node is reserved for the direction of its parent. Range checks against a
// concrete degree happen where a degree is known (tree construction).
class NodePath {
 public:
  NodePath() = default;
  explicit NodePath(std::vector<uint32_t> symbols) : symbols_(std::move(symbols)) {}

  // Text form: symbols joined by '.'; the source is the empty string.
  static NodePath parse(const std::string& text) {
    std::vector<uint32_t> symbols;
    if (text.empty()) return NodePath(std::move(symbols));
    size_t start = 0;
    while (true) {
      const size_t dot = text.find('.', start);
      const std::string token = text.substr(
          start, dot == std::string::npos ? std::string::npos : dot - start);
      if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
        throw std::invalid_argument("NodePath: bad symbol '" + token +
                                    "' in path '" + text + "'");
      }
      symbols.push_back(static_cast<uint32_t>(std::stoul(token)));
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return NodePath(std::move(symbols));
  }

  std::string str() const {
    std::string out;
    for (size_t i = 0; i < symbols_.size(); ++i) {
      if (i > 0) out += '.';
      out += std::to_string(symbols_[i]);
    }
    return out;
  }

  bool is_source() const { return symbols_.empty(); }
  int length() const { return static_cast<int>(symbols_.size()); }
  uint32_t symbol(int i) const { return symbols_.at(static_cast<size_t>(i)); }
  const std::vector<uint32_t>& symbols() const { return symbols_; }

  NodePath child(uint32_t slot) const {
    std::vector<uint32_t> next = symbols_;
    next.push_back(slot);
    return NodePath(std::move(next));
  }

  NodePath parent() const {
    if (symbols_.empty()) {
      throw std::invalid_argument("NodePath: the source has no parent");
    }
    std::vector<uint32_t> next(symbols_.begin(), symbols_.end() - 1);
    return NodePath(std::move(next));
  }

  friend bool operator==(const NodePath& a, const NodePath& b) {
    return a.symbols_ == b.symbols_;
  }
  friend bool operator!=(const NodePath& a, const NodePath& b) { return !(a == b); }
  friend bool operator<(const NodePath& a, const NodePath& b) {
    return a.symbols_ < b.symbols_;
  }

 private:
  std::vector<uint32_t> symbols_;
};

// Tree distance between two addresses: both walk up to the longest common
// prefix, their unique meeting point.
inline int distance(const NodePath& a, const NodePath& b) {
  const auto& sa = a.symbols();
  const auto& sb = b.symbols();
  size_t common = 0;
  while (common < sa.size() && common < sb.size() && sa[common] == sb[common]) {
    ++common;
  }
  return static_cast<int>(sa.size() + sb.size() - 2 * common);
}

}  // namespace rumor_locus
