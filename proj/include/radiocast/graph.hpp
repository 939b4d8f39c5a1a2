#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "radiocast/node_set.hpp"

namespace radiocast {

enum class GraphErrc {
  malformed_line,
  node_out_of_range,
  self_loop,
  duplicate_edge,
  disconnected,
  invalid_parameter,
  retry_cap_exceeded,
};

inline std::string_view to_string(GraphErrc e) {
  switch (e) {
    case GraphErrc::malformed_line: return "malformed_line";
    case GraphErrc::node_out_of_range: return "node_out_of_range";
    case GraphErrc::self_loop: return "self_loop";
    case GraphErrc::duplicate_edge: return "duplicate_edge";
    case GraphErrc::disconnected: return "disconnected";
    case GraphErrc::invalid_parameter: return "invalid_parameter";
    case GraphErrc::retry_cap_exceeded: return "retry_cap_exceeded";
  }
  return "unknown";
}

class GraphError : public std::runtime_error {
 public:
  GraphError(GraphErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  GraphErrc code() const noexcept { return code_; }

 private:
  GraphErrc code_;
};

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Simple undirected connected graph on dense ids 0..n-1. Immutable once built;
// every construction path goes through from_edges, which enforces the
// invariants (no loops, no parallel edges, symmetric, connected).
class Graph {
 public:
  static Graph from_edges(std::size_t n, const std::vector<Edge>& edges) {
    if (n == 0) throw GraphError(GraphErrc::invalid_parameter, "graph must have at least one node");
    Graph g;
    g.adjacency_.resize(n);
    g.neighbor_sets_.assign(n, NodeSet(n));
    for (const auto& e : edges) {
      if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n || static_cast<std::size_t>(e.v) >= n)
        throw GraphError(GraphErrc::node_out_of_range,
                         "edge " + std::to_string(e.u) + " " + std::to_string(e.v) + " with n=" + std::to_string(n));
      if (e.u == e.v) throw GraphError(GraphErrc::self_loop, "node " + std::to_string(e.u));
      if (g.neighbor_sets_[static_cast<std::size_t>(e.u)].contains(e.v))
        throw GraphError(GraphErrc::duplicate_edge, std::to_string(e.u) + " " + std::to_string(e.v));
      g.link(e.u, e.v);
    }
    for (auto& adj : g.adjacency_) std::sort(adj.begin(), adj.end());
    g.edge_count_ = edges.size();
    if (!g.connected()) throw GraphError(GraphErrc::disconnected, "not every node is reachable from node 0");
    return g;
  }

  std::size_t size() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency_.at(static_cast<std::size_t>(v)); }
  const NodeSet& neighbor_set(NodeId v) const { return neighbor_sets_.at(static_cast<std::size_t>(v)); }
  bool has_edge(NodeId u, NodeId v) const { return neighbor_set(u).contains(v); }

  // Edges with u < v in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (std::size_t u = 0; u < size(); ++u)
      for (NodeId v : adjacency_[u])
        if (static_cast<NodeId>(u) < v) out.push_back({static_cast<NodeId>(u), v});
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adjacency_ == b.adjacency_; }

 private:
  Graph() = default;

  void link(NodeId u, NodeId v) {
    adjacency_[static_cast<std::size_t>(u)].push_back(v);
    adjacency_[static_cast<std::size_t>(v)].push_back(u);
    neighbor_sets_[static_cast<std::size_t>(u)].insert(v);
    neighbor_sets_[static_cast<std::size_t>(v)].insert(u);
  }

  bool connected() const {
    std::vector<char> seen(size(), 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : adjacency_[static_cast<std::size_t>(u)]) {
        if (!seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++reached;
          stack.push_back(v);
        }
      }
    }
    return reached == size();
  }

  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<NodeSet> neighbor_sets_;
  std::size_t edge_count_ = 0;
};

// ---------------------------------------------------------------------------
// Edge-list text format: first non-comment line is n, then one "u v" per line.
// Blank lines and lines starting with '#' are skipped.

namespace detail {

inline bool parse_int(const std::string& token, long long& out) {
  if (token.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(token, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == token.size();
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  return tokens;
}

}  // namespace detail

inline Graph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::optional<std::size_t> n;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    auto where = "line " + std::to_string(line_no) + ": '" + line + "'";
    if (!n) {
      long long value = 0;
      if (tokens.size() != 1 || !detail::parse_int(tokens[0], value) || value < 1)
        throw GraphError(GraphErrc::malformed_line, where + " (expected positive node count)");
      n = static_cast<std::size_t>(value);
      continue;
    }
    long long u = 0, v = 0;
    if (tokens.size() != 2 || !detail::parse_int(tokens[0], u) || !detail::parse_int(tokens[1], v))
      throw GraphError(GraphErrc::malformed_line, where + " (expected 'u v')");
    if (u < 0 || v < 0 || u >= static_cast<long long>(*n) || v >= static_cast<long long>(*n))
      throw GraphError(GraphErrc::node_out_of_range, where);
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  if (!n) throw GraphError(GraphErrc::malformed_line, "missing node count line");
  return Graph::from_edges(*n, edges);
}

inline std::string serialize_edge_list(const Graph& g) {
  std::string out = std::to_string(g.size()) + "\n";
  for (const auto& e : g.edges()) out += std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Generators

enum class Family { path, cycle, star, complete, grid, random };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::path: return "path";
    case Family::cycle: return "cycle";
    case Family::star: return "star";
    case Family::complete: return "complete";
    case Family::grid: return "grid";
    case Family::random: return "random";
  }
  return "unknown";
}

inline Family family_from_string(std::string_view name) {
  for (auto f : {Family::path, Family::cycle, Family::star, Family::complete, Family::grid, Family::random})
    if (to_string(f) == name) return f;
  throw GraphError(GraphErrc::invalid_parameter, "unknown family '" + std::string(name) + "'");
}

struct GenParams {
  std::size_t n = 0;
  std::optional<double> p;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

inline constexpr int kMaxConnectivityRetries = 1000;

namespace detail {

// Largest divisor of n not exceeding sqrt(n), so grid(n) is as square as possible.
inline std::size_t squarest_rows(std::size_t n) {
  std::size_t best = 1;
  for (std::size_t r = 1; r * r <= n; ++r)
    if (n % r == 0) best = r;
  return best;
}

// Uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
inline double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool is_connected(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& e : edges) {
    adj[static_cast<std::size_t>(e.u)].push_back(e.v);
    adj[static_cast<std::size_t>(e.v)].push_back(e.u);
  }
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    auto u = static_cast<std::size_t>(stack.back());
    stack.pop_back();
    for (NodeId v : adj[u])
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  return reached == n;
}

}  // namespace detail

// Deterministic in (family, params, seed). Random graphs are Erdos-Renyi
// G(n, p); attempt k draws from mt19937_64 seeded with seed_seq{seed, k}
// until a connected sample appears.
inline Graph generate(Family family, const GenParams& params, std::uint64_t seed = 0) {
  auto bad = [](const std::string& what) { return GraphError(GraphErrc::invalid_parameter, what); };
  std::size_t n = params.n;
  std::vector<Edge> edges;
  auto id = [](std::size_t v) { return static_cast<NodeId>(v); };

  switch (family) {
    case Family::path:
      if (n < 1) throw bad("path needs n >= 1");
      for (std::size_t v = 0; v + 1 < n; ++v) edges.push_back({id(v), id(v + 1)});
      break;
    case Family::cycle:
      if (n < 3) throw bad("cycle needs n >= 3");
      for (std::size_t v = 0; v < n; ++v) edges.push_back({id(v), id((v + 1) % n)});
      break;
    case Family::star:
      if (n < 1) throw bad("star needs n >= 1");
      for (std::size_t v = 1; v < n; ++v) edges.push_back({0, id(v)});
      break;
    case Family::complete:
      if (n < 1) throw bad("complete needs n >= 1");
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) edges.push_back({id(u), id(v)});
      break;
    case Family::grid: {
      std::size_t rows = params.rows, cols = params.cols;
      if (rows == 0 && cols == 0) {
        if (n < 1) throw bad("grid needs rows/cols or n >= 1");
        rows = detail::squarest_rows(n);
        cols = n / rows;
      }
      if (rows < 1 || cols < 1) throw bad("grid needs rows >= 1 and cols >= 1");
      if (n != 0 && n != rows * cols) throw bad("grid n must equal rows*cols");
      n = rows * cols;
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
          std::size_t v = r * cols + c;
          if (c + 1 < cols) edges.push_back({id(v), id(v + 1)});
          if (r + 1 < rows) edges.push_back({id(v), id(v + cols)});
        }
      break;
    }
    case Family::random: {
      if (n < 1) throw bad("random needs n >= 1");
      if (!params.p || !(*params.p > 0.0) || *params.p > 1.0) throw bad("random needs 0 < p <= 1");
      double p = *params.p;
      for (int attempt = 0; attempt < kMaxConnectivityRetries; ++attempt) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(attempt)};
        std::mt19937_64 rng(seq);
        edges.clear();
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t v = u + 1; v < n; ++v)
            if (detail::unit_interval(rng) < p) edges.push_back({id(u), id(v)});
        if (detail::is_connected(n, edges)) return Graph::from_edges(n, edges);
      }
      throw GraphError(GraphErrc::retry_cap_exceeded,
                       "no connected sample in " + std::to_string(kMaxConnectivityRetries) + " attempts");
    }
  }
  return Graph::from_edges(n, edges);
}

// ---------------------------------------------------------------------------
// Set-level queries

inline void check_universe(const Graph& g, const NodeSet& s) {
  if (s.universe() != g.size())
    throw GraphError(GraphErrc::node_out_of_range, "node set universe does not match graph size");
}

// Gamma(X): every node with at least one neighbour in X. May intersect X.
inline NodeSet neighborhood(const Graph& g, const NodeSet& x) {
  check_universe(g, x);
  NodeSet out(g.size());
  x.for_each([&](NodeId v) { out |= g.neighbor_set(v); });
  return out;
}

// True iff every y in Y has a neighbour in X. Membership y in X does not count.
inline bool is_dominating(const Graph& g, const NodeSet& x, const NodeSet& y) {
  check_universe(g, x);
  check_universe(g, y);
  for (NodeId v = y.first(); v != -1; v = y.next(v))
    if (!g.neighbor_set(v).intersects(x)) return false;
  return true;
}

}  // namespace radiocast
