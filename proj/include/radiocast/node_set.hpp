#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace radiocast {

using NodeId = int;

// Bitset over the dense id range 0..universe-1. Graphs with at most 64 nodes
// keep their single word inline, so set algebra in the small-graph sweeps
// never touches the heap.
class NodeSet {
 public:
  NodeSet() = default;

  explicit NodeSet(std::size_t universe) : universe_(universe) {
    if (universe_ > kInlineBits) heap_.assign(word_count(), 0);
  }

  NodeSet(std::size_t universe, std::initializer_list<NodeId> ids) : NodeSet(universe) {
    for (NodeId v : ids) insert(v);
  }

  static NodeSet full(std::size_t universe) {
    NodeSet s(universe);
    for (std::size_t v = 0; v < universe; ++v) s.insert(static_cast<NodeId>(v));
    return s;
  }

  std::size_t universe() const { return universe_; }

  bool contains(NodeId v) const {
    if (!in_range(v)) return false;
    return (words()[index(v)] >> offset(v)) & 1U;
  }

  void insert(NodeId v) {
    check(v);
    words()[index(v)] |= bit(v);
  }

  void erase(NodeId v) {
    check(v);
    words()[index(v)] &= ~bit(v);
  }

  std::size_t size() const {
    std::size_t total = 0;
    for (auto w : words()) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  bool empty() const {
    return std::all_of(words().begin(), words().end(), [](std::uint64_t w) { return w == 0; });
  }

  NodeSet& operator|=(const NodeSet& other) {
    auto dst = words();
    auto src = other.words();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
    return *this;
  }

  NodeSet& operator&=(const NodeSet& other) {
    auto dst = words();
    auto src = other.words();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] &= src[i];
    return *this;
  }

  // Set difference.
  NodeSet& operator-=(const NodeSet& other) {
    auto dst = words();
    auto src = other.words();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] &= ~src[i];
    return *this;
  }

  friend NodeSet operator|(NodeSet a, const NodeSet& b) { return a |= b; }
  friend NodeSet operator&(NodeSet a, const NodeSet& b) { return a &= b; }
  friend NodeSet operator-(NodeSet a, const NodeSet& b) { return a -= b; }

  bool intersects(const NodeSet& other) const {
    auto a = words();
    auto b = other.words();
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] & b[i]) return true;
    return false;
  }

  bool is_subset_of(const NodeSet& other) const {
    auto a = words();
    auto b = other.words();
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] & ~b[i]) return false;
    return true;
  }

  std::size_t intersection_size(const NodeSet& other) const {
    auto a = words();
    auto b = other.words();
    std::size_t total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) total += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
    return total;
  }

  friend bool operator==(const NodeSet& a, const NodeSet& b) {
    if (a.universe_ != b.universe_) return false;
    auto x = a.words();
    auto y = b.words();
    return std::equal(x.begin(), x.end(), y.begin());
  }

  // Ascending iteration; -1 when exhausted.
  NodeId first() const { return next_from(0); }
  NodeId next(NodeId v) const { return next_from(static_cast<std::size_t>(v) + 1); }

  template <class Fn>
  void for_each(Fn&& fn) const {
    auto ws = words();
    for (std::size_t i = 0; i < ws.size(); ++i) {
      auto w = ws[i];
      while (w != 0) {
        int b = std::countr_zero(w);
        fn(static_cast<NodeId>(i * 64 + static_cast<std::size_t>(b)));
        w &= w - 1;
      }
    }
  }

  std::vector<NodeId> to_vector() const {
    std::vector<NodeId> out;
    out.reserve(size());
    for_each([&](NodeId v) { out.push_back(v); });
    return out;
  }

 private:
  static constexpr std::size_t kInlineBits = 64;

  std::size_t word_count() const { return (universe_ + 63) / 64; }
  static std::size_t index(NodeId v) { return static_cast<std::size_t>(v) / 64; }
  static unsigned offset(NodeId v) { return static_cast<unsigned>(v) % 64; }
  static std::uint64_t bit(NodeId v) { return std::uint64_t{1} << offset(v); }

  bool in_range(NodeId v) const { return v >= 0 && static_cast<std::size_t>(v) < universe_; }
  void check(NodeId v) const {
    if (!in_range(v)) throw std::out_of_range("NodeSet: node id out of range");
  }

  std::span<std::uint64_t> words() {
    if (universe_ > kInlineBits) return heap_;
    return {&inline_, universe_ == 0 ? 0U : 1U};
  }
  std::span<const std::uint64_t> words() const {
    if (universe_ > kInlineBits) return heap_;
    return {&inline_, universe_ == 0 ? 0U : 1U};
  }

  NodeId next_from(std::size_t start) const {
    if (start >= universe_) return -1;
    auto ws = words();
    std::size_t i = start / 64;
    std::uint64_t w = ws[i] & (~std::uint64_t{0} << (start % 64));
    while (true) {
      if (w != 0) return static_cast<NodeId>(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
      if (++i >= ws.size()) return -1;
      w = ws[i];
    }
  }

  std::size_t universe_ = 0;
  std::uint64_t inline_ = 0;
  std::vector<std::uint64_t> heap_;
};

}  // namespace radiocast
