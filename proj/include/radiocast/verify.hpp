#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "radiocast/decomposition.hpp"
#include "radiocast/graph.hpp"
#include "radiocast/labeling.hpp"
#include "radiocast/protocols.hpp"
#include "radiocast/simulator.hpp"

// Checkers work from the definitions over plain arrays. They take the
// decomposition, labels and traces as data and never call back into the code
// that produced them (except check_labels(lg), which needs some D_i to read
// the labels against and rebuilds it; that decomposition is itself checked by
// check_decomposition).

namespace radiocast {

struct CheckResult {
  std::string_view name;   // static string
  std::string_view scope;  // static string, empty at top level
  bool passed = true;
  std::string witness;     // empty when passed

  std::string full_name() const { return scope.empty() ? std::string(name) : std::string(scope) + "/" + std::string(name); }
};

// Accumulates one named condition; the witness is built only on the first
// violation.
class Probe {
 public:
  explicit Probe(std::string_view name) : name_(name) {}

  template <class F>
  void fail(F&& make_witness) {
    if (ok_) {
      ok_ = false;
      witness_ = make_witness();
    }
  }
  template <class F>
  void expect(bool cond, F&& make_witness) {
    if (!cond) fail(std::forward<F>(make_witness));
  }
  bool ok() const { return ok_; }
  std::string_view name() const { return name_; }
  std::string take_witness() { return std::move(witness_); }

 private:
  std::string_view name_;
  bool ok_ = true;
  std::string witness_;
};

struct CheckReport {
  std::vector<CheckResult> checks;

  void add(std::string_view name, bool passed, std::string witness = {}) {
    if (checks.capacity() == 0) checks.reserve(48);
    checks.push_back({name, {}, passed, std::move(witness)});
  }
  void add(Probe&& p) { add(p.name(), p.ok(), p.take_witness()); }

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
  }
  // First entry whose full name matches.
  const CheckResult* find(std::string_view full) const {
    for (const auto& c : checks)
      if (c.full_name() == full) return &c;
    return nullptr;
  }
  bool failed(std::string_view full) const {
    const auto* c = find(full);
    return c && !c->passed;
  }
  void merge(const CheckReport& other, std::string_view scope = {}) {
    checks.reserve(checks.size() + other.checks.size());
    for (const auto& c : other.checks) {
      checks.push_back(c);
      if (!scope.empty() && c.scope.empty()) checks.back().scope = scope;
    }
  }
  std::string first_failure() const {
    for (const auto& c : checks)
      if (!c.passed) return c.full_name() + ": " + c.witness;
    return {};
  }
};

namespace verify_detail {

// Membership array with inline storage for small graphs.
class Mask {
 public:
  Mask() = default;
  explicit Mask(std::size_t n, char fill = 0) : n_(n) {
    if (n_ > kInline) heap_.assign(n_, fill);
    else std::fill_n(inline_.begin(), n_, fill);
  }
  std::size_t size() const { return n_; }
  char& operator[](std::size_t i) { return data()[i]; }
  char operator[](std::size_t i) const { return data()[i]; }
  char* begin() { return data(); }
  char* end() { return data() + n_; }
  const char* begin() const { return data(); }
  const char* end() const { return data() + n_; }
  friend bool operator==(const Mask& a, const Mask& b) { return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin()); }

 private:
  static constexpr std::size_t kInline = 64;
  char* data() { return n_ > kInline ? heap_.data() : inline_.data(); }
  const char* data() const { return n_ > kInline ? heap_.data() : inline_.data(); }
  std::size_t n_ = 0;
  std::array<char, kInline> inline_{};
  std::vector<char> heap_;
};

inline Mask to_mask(const NodeSet& s, std::size_t n) {
  Mask m(n, 0);
  s.for_each([&](NodeId v) {
    if (v >= 0 && static_cast<std::size_t>(v) < n) m[static_cast<std::size_t>(v)] = 1;
  });
  return m;
}

inline std::string show(const Mask& m) {
  std::string out = "{";
  bool first = true;
  for (std::size_t v = 0; v < m.size(); ++v) {
    if (!m[v]) continue;
    if (!first) out += ",";
    out += std::to_string(v);
    first = false;
  }
  return out + "}";
}

inline int count_in(const Graph& g, NodeId v, const Mask& m) {
  int c = 0;
  for (NodeId w : g.neighbors(v)) c += m[static_cast<std::size_t>(w)] ? 1 : 0;
  return c;
}

inline std::string at_stage(int i, const char* what, const Mask& got, const Mask& want) {
  return "stage " + std::to_string(i) + ": " + what + " is " + show(got) + ", expected " + show(want);
}

struct StageMasks {
  Mask I, U, F, D, N;
};

inline std::vector<StageMasks> masks_of(const StageDecomposition& d, std::size_t n) {
  std::vector<StageMasks> out;
  out.reserve(d.stages.size());
  for (const auto& st : d.stages)
    out.push_back({to_mask(st.informed, n), to_mask(st.uninformed, n), to_mask(st.frontier, n),
                   to_mask(st.dominators, n), to_mask(st.newly_informed, n)});
  return out;
}

inline bool dominates(const Graph& g, const Mask& X, const Mask& Y) {
  for (std::size_t y = 0; y < Y.size(); ++y)
    if (Y[y] && count_in(g, static_cast<NodeId>(y), X) == 0) return false;
  return true;
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// Stage decomposition

// `masks`, when given, must be masks_of(d, n); callers running several checks
// on one decomposition pass it to avoid rebuilding it.
inline CheckReport check_decomposition(const Graph& g, const StageDecomposition& d, const std::vector<verify_detail::StageMasks>* masks = nullptr) {
  using namespace verify_detail;
  CheckReport rep;
  const std::size_t n = g.size();
  const int L = d.last_stage;

  {
    Probe p("decomp.shape");
    p.expect(d.source >= 0 && static_cast<std::size_t>(d.source) < n, [&] { return "source " + std::to_string(d.source) + " out of range"; });
    p.expect(L >= 1 && static_cast<std::size_t>(L) == d.stages.size(),
             [&] { return "last_stage " + std::to_string(L) + " with " + std::to_string(d.stages.size()) + " stages"; });
    for (std::size_t i = 0; i < d.stages.size(); ++i) {
      const Stage& st = d.stages[i];
      for (const NodeSet* s : {&st.informed, &st.uninformed, &st.frontier, &st.dominators, &st.newly_informed})
        p.expect(s->universe() == n, [&] { return "stage " + std::to_string(i + 1) + " has a set over the wrong universe"; });
    }
    const bool ok = p.ok();
    rep.add(std::move(p));
    if (!ok) return rep;
  }

  const std::vector<StageMasks> own = masks ? std::vector<StageMasks>{} : masks_of(d, n);
  const auto& S = masks ? *masks : own;
  const auto s = static_cast<std::size_t>(d.source);
  auto st = [&](int i) -> const StageMasks& { return S[static_cast<std::size_t>(i - 1)]; };

  {
    Probe p("decomp.initialization");
    Mask I(n, 0), U(n, 1), G(n, 0);
    I[s] = 1;
    U[s] = 0;
    for (NodeId w : g.neighbors(d.source)) G[static_cast<std::size_t>(w)] = 1;
    const auto& s1 = st(1);
    p.expect(s1.I == I, [&] { return at_stage(1, "I", s1.I, I); });
    p.expect(L == 1 || s1.U == U, [&] { return at_stage(1, "U", s1.U, U); });
    p.expect(L == 1 || s1.F == G, [&] { return at_stage(1, "F", s1.F, G); });
    p.expect(L == 1 || s1.N == G, [&] { return at_stage(1, "N", s1.N, G); });
    p.expect(L == 1 || s1.D == I, [&] { return at_stage(1, "D", s1.D, I); });
    rep.add(std::move(p));
  }

  {
    Probe p("decomp.recurrence");
    for (int i = 2; i <= L; ++i) {
      const auto &prev = st(i - 1), &cur = st(i);
      Mask I(n), U(n), F(n, 0), N(n, 0);
      for (std::size_t v = 0; v < n; ++v) {
        I[v] = prev.I[v] || prev.N[v];
        U[v] = prev.U[v] && !prev.N[v];
      }
      p.expect(cur.I == I, [&] { return at_stage(i, "I", cur.I, I); });
      p.expect(cur.U == U, [&] { return at_stage(i, "U", cur.U, U); });
      for (std::size_t v = 0; v < n; ++v) F[v] = U[v] && count_in(g, static_cast<NodeId>(v), I) > 0;
      p.expect(cur.F == F, [&] { return at_stage(i, "F", cur.F, F); });
      for (std::size_t v = 0; v < n; ++v) N[v] = cur.F[v] && count_in(g, static_cast<NodeId>(v), cur.D) == 1;
      p.expect(cur.N == N, [&] { return at_stage(i, "N", cur.N, N); });
    }
    rep.add(std::move(p));
  }

  {
    Probe p("decomp.dominators_from_candidates");
    for (int i = 2; i < L; ++i) {
      const auto &prev = st(i - 1), &cur = st(i);
      for (std::size_t v = 0; v < n; ++v)
        p.expect(!cur.D[v] || prev.D[v] || prev.N[v],
                 [&] { return "stage " + std::to_string(i) + ", node " + std::to_string(v) + " is not in D_{i-1} or N_{i-1}"; });
    }
    rep.add(std::move(p));
  }

  {
    Probe p("decomp.domination");
    for (int i = 1; i < L; ++i)
      p.expect(dominates(g, st(i).D, st(i).F), [&] { return "stage " + std::to_string(i) + ": D does not dominate F"; });
    rep.add(std::move(p));
  }

  {
    Probe p("decomp.minimality");
    for (int i = 2; i < L; ++i) {
      Mask D = st(i).D;
      for (std::size_t v = 0; v < n; ++v) {
        if (!D[v]) continue;
        D[v] = 0;
        p.expect(!dominates(g, D, st(i).F),
                 [&] { return "stage " + std::to_string(i) + ", node " + std::to_string(v) + " is redundant"; });
        D[v] = 1;
      }
    }
    rep.add(std::move(p));
  }

  {
    Probe p("decomp.containment");
    for (int i = 1; i <= L; ++i) {
      const auto& c = st(i);
      for (std::size_t v = 0; v < n; ++v) {
        p.expect(!c.N[v] || c.F[v], [&] { return "stage " + std::to_string(i) + ": node " + std::to_string(v) + " in N but not F"; });
        p.expect(!c.F[v] || c.U[v], [&] { return "stage " + std::to_string(i) + ": node " + std::to_string(v) + " in F but not U"; });
        p.expect(!(c.U[v] && c.I[v]), [&] { return "stage " + std::to_string(i) + ": node " + std::to_string(v) + " in both I and U"; });
        p.expect(!c.D[v] || c.I[v], [&] { return "stage " + std::to_string(i) + ": dominator " + std::to_string(v) + " not informed"; });
      }
    }
    rep.add(std::move(p));
  }

  {
    Probe p("decomp.private_neighbors");
    for (int i = 1; i < L; ++i) {
      const auto& c = st(i);
      for (std::size_t v = 0; v < n; ++v) {
        if (!c.D[v]) continue;
        bool has = false;
        for (NodeId w : g.neighbors(static_cast<NodeId>(v))) has = has || c.N[static_cast<std::size_t>(w)];
        p.expect(has, [&] { return "stage " + std::to_string(i) + ", dominator " + std::to_string(v) + " has no neighbour in N"; });
      }
    }
    rep.add(std::move(p));
  }

  {
    Probe p("decomp.terminal");
    const Mask all(n, 1);
    p.expect(st(L).I == all, [&] { return "I_l = " + show(st(L).I); });
    for (int i = 1; i < L; ++i) p.expect(st(i).I != all, [&] { return "I_" + std::to_string(i) + " already covers V"; });
    p.expect(static_cast<std::size_t>(L) <= std::max<std::size_t>(n, 1), [&] { return "l = " + std::to_string(L) + " exceeds n"; });
    rep.add(std::move(p));
  }

  {
    Probe p("decomp.partition");
    std::vector<int> hits(n, 0);
    for (int i = 1; i < L; ++i)
      for (std::size_t v = 0; v < n; ++v) hits[v] += st(i).N[v];
    for (std::size_t v = 0; v < n; ++v) {
      const int want = v == s ? 0 : 1;
      p.expect(hits[v] == want, [&] { return "node " + std::to_string(v) + " appears in " + std::to_string(hits[v]) + " of N_1..N_{l-1}"; });
    }
    for (int i = 1; i < L; ++i)
      p.expect(std::any_of(st(i).N.begin(), st(i).N.end(), [](char c) { return c != 0; }),
               [&] { return "stage " + std::to_string(i) + " makes no progress"; });
    rep.add(std::move(p));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Labels

inline CheckReport check_labels(const LabeledGraph& lg, const StageDecomposition& d, const std::vector<verify_detail::StageMasks>* masks = nullptr) {
  using namespace verify_detail;
  CheckReport rep;
  const Graph& g = lg.graph;
  const std::size_t n = g.size();
  const int width = scheme_width(lg.scheme);
  const bool arb = lg.scheme == Scheme::lambda_arb;

  {
    Probe p("labels.shape");
    p.expect(lg.labels.size() == n, [&] { return std::to_string(lg.labels.size()) + " labels for " + std::to_string(n) + " nodes"; });
    for (std::size_t v = 0; v < lg.labels.size(); ++v)
      p.expect(lg.labels[v].width == width, [&] { return "node " + std::to_string(v) + " has width " + std::to_string(lg.labels[v].width); });
    p.expect(d.stages.size() == static_cast<std::size_t>(d.last_stage) && d.last_stage >= 1, [] { return std::string("bad decomposition"); });
    const bool ok = p.ok();
    rep.add(std::move(p));
    if (!ok) return rep;
  }

  const std::vector<StageMasks> own = masks ? std::vector<StageMasks>{} : masks_of(d, n);
  const auto& S = masks ? *masks : own;
  const int L = d.last_stage;
  const auto root = static_cast<std::size_t>(d.source);
  auto skip = [&](std::size_t v) { return arb && v == root; };

  {
    Probe p("labels.x1_marks_dominators");
    Mask dom(n, 0);
    for (const auto& st : S)
      for (std::size_t v = 0; v < n; ++v) dom[v] = dom[v] || st.D[v];
    for (std::size_t v = 0; v < n; ++v)
      if (!skip(v))
        p.expect(lg.labels[v].x1 == static_cast<bool>(dom[v]),
                 [&] { return "node " + std::to_string(v) + ": x1=" + std::to_string(lg.labels[v].x1) + " but dominator=" + std::to_string(dom[v] != 0); });
    rep.add(std::move(p));
  }

  {
    // x2 nodes of N_i and the kept dominators D_i & D_{i+1} match one to one
    // through the unique D_i neighbour of each N_i node.
    Probe p("labels.x2_sponsors");
    std::vector<int> stage_of(n, 0);
    for (int i = 1; i < L; ++i)
      for (std::size_t v = 0; v < n; ++v)
        if (S[static_cast<std::size_t>(i - 1)].N[v]) stage_of[v] = i;
    for (std::size_t w = 0; w < n; ++w) {
      if (skip(w) || !lg.labels[w].x2) continue;
      const int i = stage_of[w];
      if (i == 0) {
        p.fail([&] { return "node " + std::to_string(w) + " has x2 but is never newly informed"; });
        continue;
      }
      const auto& Di = S[static_cast<std::size_t>(i - 1)].D;
      NodeId sponsor = -1;
      for (NodeId u : g.neighbors(static_cast<NodeId>(w)))
        if (Di[static_cast<std::size_t>(u)]) sponsor = u;
      const bool kept = sponsor >= 0 && i < L && S[static_cast<std::size_t>(i)].D[static_cast<std::size_t>(sponsor)];
      p.expect(kept, [&] { return "x2 node " + std::to_string(w) + " of N_" + std::to_string(i) + " has no sponsor in D_i & D_{i+1}"; });
    }
    // Every kept dominator needs exactly one x2 node; a node can be kept in
    // several consecutive stages, so count per (stage, dominator).
    for (int i = 1; i < L; ++i) {
      const auto &Di = S[static_cast<std::size_t>(i - 1)].D, &Dn = S[static_cast<std::size_t>(i)].D;
      const auto& Ni = S[static_cast<std::size_t>(i - 1)].N;
      for (std::size_t v = 0; v < n; ++v) {
        if (!Di[v]) continue;
        int marks = 0;
        for (NodeId w : g.neighbors(static_cast<NodeId>(v))) {
          const auto wi = static_cast<std::size_t>(w);
          if (Ni[wi] && !skip(wi) && lg.labels[wi].x2) ++marks;
        }
        const int want = Dn[v] ? 1 : 0;
        p.expect(marks == want, [&] {
          return "stage " + std::to_string(i) + ", dominator " + std::to_string(v) + " has " + std::to_string(marks) +
                 " x2 neighbours in N_i, expected " + std::to_string(want);
        });
      }
    }
    rep.add(std::move(p));
  }

  // x1x2x3 read as a binary number
  auto code = [&](std::size_t v) { return (lg.labels[v].x1 ? 4 : 0) | (lg.labels[v].x2 ? 2 : 0) | (lg.labels[v].x3 ? 1 : 0); };
  unsigned seen = 0;
  for (std::size_t v = 0; v < n; ++v) seen |= 1u << code(v);
  const auto distinct = static_cast<std::size_t>(std::popcount(seen));
  const std::size_t max_distinct = lg.scheme == Scheme::lambda ? 4 : lg.scheme == Scheme::lambda_ack ? 5 : 6;
  {
    Probe p("labels.distinct_count");
    p.expect(distinct <= max_distinct, [&] { return std::to_string(distinct) + " distinct labels"; });
    rep.add(std::move(p));
  }

  if (lg.scheme == Scheme::lambda) return rep;

  std::vector<std::size_t> x3_nodes;
  for (std::size_t v = 0; v < n; ++v)
    if (!skip(v) && lg.labels[v].x3) x3_nodes.push_back(v);
  {
    Probe p("labels.forbidden_patterns");
    for (std::size_t v = 0; v < n; ++v) {
      if (skip(v)) continue;
      const int c = code(v);
      p.expect(c != 0b101 && c != 0b111 && c != 0b011, [&] { return "node " + std::to_string(v) + " labelled " + lg.labels[v].bits(); });
    }
    rep.add(std::move(p));
  }
  {
    Probe p("labels.single_z");
    p.expect(x3_nodes.size() == 1, [&] { return std::to_string(x3_nodes.size()) + " non-root nodes carry x3"; });
    if (x3_nodes.size() == 1 && L >= 2) {
      const std::size_t z = x3_nodes[0];
      p.expect(S[static_cast<std::size_t>(L - 2)].N[z], [&] { return "z = " + std::to_string(z) + " is not in N_{l-1}"; });
      p.expect(code(z) == 0b001, [&] { return "z labelled " + lg.labels[z].bits(); });
    }
    rep.add(std::move(p));
  }
  if (arb) {
    Probe p("labels.single_root");
    std::size_t roots = 0;
    for (std::size_t v = 0; v < n; ++v) roots += code(v) == 0b111 ? 1 : 0;
    p.expect(roots == 1 && code(root) == 0b111, [&] { return std::to_string(roots) + " nodes labelled 111"; });
    rep.add(std::move(p));
  }
  return rep;
}

// Rebuilds a decomposition from the source recorded with the labels (or the
// 111 node for lambda_arb) and checks both.
inline CheckReport check_labels(const LabeledGraph& lg) {
  CheckReport rep;
  NodeId src = lg.source_used.value_or(-1);
  if (lg.scheme == Scheme::lambda_arb) {
    src = -1;
    for (std::size_t v = 0; v < lg.labels.size(); ++v)
      if (lg.labels[v].x1 && lg.labels[v].x2 && lg.labels[v].x3) src = static_cast<NodeId>(v);
  }
  if (src < 0 || static_cast<std::size_t>(src) >= lg.graph.size()) {
    rep.add("labels.source_known", false, "labels do not identify a source or root");
    return rep;
  }
  const auto d = build_stages(lg.graph, src);
  rep.merge(check_decomposition(lg.graph, d));
  rep.merge(check_labels(lg, d));
  return rep;
}

// ---------------------------------------------------------------------------
// Traces

namespace verify_detail {

using Rounds = std::span<const RoundRecord>;

inline std::string at_round(Round r, const std::string& what) { return "round " + std::to_string(r) + ": " + what; }

inline const Transmission* sender(const RoundRecord& rec, NodeId v) {
  for (const auto& t : rec.transmissions)
    if (t.node == v) return &t;
  return nullptr;
}

// Round numbering, one frame per node per round, half duplex, and the
// delivery/collision rule recomputed from the transmissions alone.
inline void check_channel(const Graph& g, Rounds rs, Round offset, CheckReport& rep) {
  const std::size_t n = g.size();
  Probe numbering("trace.numbering"), single("trace.single_frame"), duplex("trace.half_duplex"), rule("trace.delivery_rule");
  std::vector<const Message*> sent(n);
  std::vector<Delivery> want;
  std::vector<NodeId> coll;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const RoundRecord& rec = rs[i];
    const Round local = static_cast<Round>(i) + 1;
    numbering.expect(rec.round == offset + local, [&] { return "record " + std::to_string(i) + " has round " + std::to_string(rec.round); });
    std::fill(sent.begin(), sent.end(), nullptr);
    for (const auto& t : rec.transmissions) {
      if (t.node < 0 || static_cast<std::size_t>(t.node) >= n) {
        single.fail([&] { return at_round(rec.round, "transmitter out of range"); });
        continue;
      }
      auto& slot = sent[static_cast<std::size_t>(t.node)];
      single.expect(slot == nullptr, [&] { return at_round(rec.round, "node " + std::to_string(t.node) + " sends twice"); });
      slot = &t.message;
    }
    for (const auto& dl : rec.deliveries)
      duplex.expect(dl.node < 0 || static_cast<std::size_t>(dl.node) >= n || !sent[static_cast<std::size_t>(dl.node)],
                    [&] { return at_round(rec.round, "transmitter " + std::to_string(dl.node) + " also receives"); });

    want.clear();
    coll.clear();
    for (std::size_t v = 0; v < n; ++v) {
      if (sent[v]) continue;
      int c = 0;
      NodeId from = -1;
      for (NodeId w : g.neighbors(static_cast<NodeId>(v)))
        if (sent[static_cast<std::size_t>(w)]) {
          ++c;
          from = w;
        }
      if (c == 1) want.push_back({static_cast<NodeId>(v), from, *sent[static_cast<std::size_t>(from)]});
      if (c > 1) coll.push_back(static_cast<NodeId>(v));
    }
    rule.expect(want == rec.deliveries, [&] { return at_round(rec.round, "recorded deliveries differ from the collision rule"); });
    rule.expect(coll == rec.collisions, [&] { return at_round(rec.round, "recorded collisions differ from the collision rule"); });
  }
  rep.add(std::move(numbering));
  rep.add(std::move(single));
  rep.add(std::move(duplex));
  rep.add(std::move(rule));
}

// Local round (1-based within rs) of each node's first broadcast-kind
// delivery; 0 if none.
inline std::vector<Round> first_deliveries(Rounds rs, std::size_t n) {
  std::vector<Round> first(n, 0);
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (const auto& dl : rs[i].deliveries)
      if (dl.message.is_broadcast() && dl.node >= 0 && static_cast<std::size_t>(dl.node) < n && first[static_cast<std::size_t>(dl.node)] == 0)
        first[static_cast<std::size_t>(dl.node)] = static_cast<Round>(i) + 1;
  return first;
}

inline bool same_content(const Message& a, const Message& b) {
  return a.kind == b.kind && a.payload == b.payload && a.value == b.value;
}

// The broadcast sub-schedule as characterised by the decomposition: D_i sends
// at 2i-1, N_i is informed exactly then, x2 nodes of N_i stay at 2i, and the
// last node is informed at 2l-3.
inline void check_broadcast(const Graph& g, const StageDecomposition& d, const std::vector<StageMasks>& S, const LabeledGraph& lg,
                            Rounds rs, bool stamped, CheckReport& rep) {
  const std::size_t n = g.size();
  const int L = d.last_stage;
  const Round done = 2 * L - 3;

  const Message* ref = nullptr;
  {
    Probe p("b.source_opens");
    if (n == 1) {
      p.expect(std::all_of(rs.begin(), rs.end(), [](const RoundRecord& r) { return r.transmissions.empty(); }),
               [] { return std::string("single node transmits"); });
    } else if (rs.empty()) {
      p.fail([] { return std::string("empty trace"); });
    } else {
      const auto& tx = rs[0].transmissions;
      p.expect(tx.size() == 1 && tx[0].node == d.source && tx[0].message.is_broadcast(),
               [&] { return "round 1 is not a lone broadcast frame from source " + std::to_string(d.source); });
      if (!tx.empty() && tx[0].node == d.source) ref = &tx[0].message;
    }
    rep.add(std::move(p));
  }
  if (n == 1) return;

  {
    Probe p("b.payload_integrity");
    for (const auto& rec : rs)
      for (const auto& t : rec.transmissions)
        if (t.message.is_broadcast() && ref)
          p.expect(same_content(t.message, *ref), [&] { return at_round(rec.round, "node " + std::to_string(t.node) + " altered the message"); });
    for (const auto& rec : rs)
      for (const auto& dl : rec.deliveries)
        if (dl.message.is_broadcast() && ref)
          p.expect(same_content(dl.message, *ref), [&] { return at_round(rec.round, "node " + std::to_string(dl.node) + " received an altered message"); });
    rep.add(std::move(p));
  }

  auto senders = [&](std::size_t idx, bool broadcast_kind) {
    Mask m(n, 0);
    if (idx < rs.size())
      for (const auto& t : rs[idx].transmissions)
        if ((broadcast_kind ? t.message.is_broadcast() : t.message.kind == MessageKind::stay) && t.node >= 0 &&
            static_cast<std::size_t>(t.node) < n)
          m[static_cast<std::size_t>(t.node)] = 1;
    return m;
  };

  {
    Probe p("b.dominators_transmit");
    for (int i = 1; i < L; ++i) {
      const auto r = static_cast<std::size_t>(2 * i - 2);
      p.expect(r < rs.size(), [&] { return "trace ends before round " + std::to_string(2 * i - 1); });
      const Mask got = senders(r, true);
      p.expect(got == S[static_cast<std::size_t>(i - 1)].D, [&] {
        return "round " + std::to_string(2 * i - 1) + " broadcast senders " + show(got) + ", D_" + std::to_string(i) + " = " +
               show(S[static_cast<std::size_t>(i - 1)].D);
      });
    }
    for (std::size_t r = 0; r < rs.size(); ++r) {
      const auto local = static_cast<Round>(r) + 1;
      if (local % 2 == 1 && local <= done) continue;
      const Mask got = senders(r, true);
      p.expect(std::none_of(got.begin(), got.end(), [](char c) { return c != 0; }),
               [&] { return "local round " + std::to_string(local) + " has broadcast senders " + show(got); });
    }
    rep.add(std::move(p));
  }

  {
    Probe p("b.stay_senders");
    for (std::size_t r = 0; r < rs.size(); ++r) {
      const auto local = static_cast<Round>(r) + 1;
      Mask want(n, 0);
      if (local % 2 == 0 && local / 2 < L) {
        const auto& N = S[static_cast<std::size_t>(local / 2 - 1)].N;
        for (std::size_t v = 0; v < n; ++v) want[v] = N[v] && lg.labels[v].x2;
      }
      const Mask got = senders(r, false);
      p.expect(got == want, [&] { return "local round " + std::to_string(local) + " stay senders " + show(got) + ", expected " + show(want); });
    }
    rep.add(std::move(p));
  }

  const auto first = first_deliveries(rs, n);
  {
    Probe p("b.newly_informed");
    for (std::size_t v = 0; v < n; ++v) {
      if (v == static_cast<std::size_t>(d.source)) continue;
      int stage = 0;
      for (int i = 1; i < L; ++i)
        if (S[static_cast<std::size_t>(i - 1)].N[v]) stage = i;
      const Round want = stage ? 2 * stage - 1 : 0;
      p.expect(first[v] == want, [&] {
        return "node " + std::to_string(v) + " first informed at local round " + std::to_string(first[v]) + ", expected " + std::to_string(want);
      });
    }
    rep.add(std::move(p));
  }

  {
    Probe p("b.completion");
    Round last = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == static_cast<std::size_t>(d.source)) continue;
      p.expect(first[v] > 0, [&] { return "node " + std::to_string(v) + " never informed"; });
      last = std::max(last, first[v]);
    }
    p.expect(last == done, [&] { return "last node informed at " + std::to_string(last) + ", 2l-3 = " + std::to_string(done); });
    p.expect(last <= 2 * static_cast<Round>(n) - 3, [&] { return "completion " + std::to_string(last) + " exceeds 2n-3"; });
    rep.add(std::move(p));
  }

  {
    Probe p(stamped ? "b.global_clock" : "b.unstamped");
    for (std::size_t r = 0; r < rs.size(); ++r)
      for (const auto& t : rs[r].transmissions) {
        if (t.message.kind == MessageKind::ack) continue;
        const auto local = static_cast<Round>(r) + 1;
        if (stamped)
          p.expect(t.message.stamp == local, [&] { return at_round(rs[r].round, "node " + std::to_string(t.node) + " stamp does not equal the local round"); });
        else
          p.expect(!t.message.stamp, [&] { return at_round(rs[r].round, "node " + std::to_string(t.node) + " sends a stamped frame"); });
      }
    rep.add(std::move(p));
  }
}

// The acknowledgement chain: opened by `initiator` at local round
// `first_ack`, stamps strictly descend, each relay is the D member that
// informed the previous sender, nothing else is on the air, and the source
// receiving the ack ends the slice. Returns the local ack round (0 if none).
inline Round check_ack_chain(const Graph& g, const StageDecomposition& d, const std::vector<StageMasks>& S, Rounds rs,
                             NodeId initiator, Round first_ack, bool window, CheckReport& rep) {
  const std::size_t n = g.size();
  const int L = d.last_stage;
  const auto first = first_deliveries(rs, n);

  std::vector<std::pair<Round, const Transmission*>> acks;
  for (std::size_t r = 0; r < rs.size(); ++r)
    for (const auto& t : rs[r].transmissions)
      if (t.message.kind == MessageKind::ack) acks.push_back({static_cast<Round>(r) + 1, &t});

  {
    Probe p("ack.opened_by_initiator");
    p.expect(!acks.empty(), [] { return std::string("no ack transmitted"); });
    if (!acks.empty()) {
      p.expect(acks[0].second->node == initiator && acks[0].first == first_ack, [&] {
        return "first ack from node " + std::to_string(acks[0].second->node) + " at local round " + std::to_string(acks[0].first) +
               ", expected node " + std::to_string(initiator) + " at " + std::to_string(first_ack);
      });
    }
    rep.add(std::move(p));
  }

  {
    Probe p("ack.quiet_tail");
    for (std::size_t r = 0; r < rs.size(); ++r) {
      const auto local = static_cast<Round>(r) + 1;
      if (local <= 2 * L - 3) continue;
      p.expect(rs[r].transmissions.size() <= 1,
               [&] { return at_round(rs[r].round, std::to_string(rs[r].transmissions.size()) + " transmitters after the broadcast"); });
    }
    rep.add(std::move(p));
  }

  {
    Probe p("ack.descent");
    for (std::size_t j = 0; j < acks.size(); ++j) {
      const auto& [r, t] = acks[j];
      const auto v = static_cast<std::size_t>(t->node);
      p.expect(t->node != d.source, [&] { return "the source relays an ack at local round " + std::to_string(r); });
      p.expect(t->node == d.source || t->message.stamp == first[v], [&] {
        return "node " + std::to_string(v) + " acks with stamp " + std::to_string(t->message.stamp.value_or(-1)) +
               " but was informed at " + std::to_string(first[v]);
      });
      if (j == 0) continue;
      const auto& [pr, pt] = acks[j - 1];
      const Round k = pt->message.stamp.value_or(0);
      p.expect(r == pr + 1, [&] { return "ack gap between local rounds " + std::to_string(pr) + " and " + std::to_string(r); });
      p.expect(t->message.stamp.value_or(0) < k, [&] { return "ack stamps do not descend at local round " + std::to_string(r); });
      const bool relay_ok = k % 2 == 1 && (k + 1) / 2 <= L && S[static_cast<std::size_t>((k + 1) / 2 - 1)].D[v] && g.has_edge(pt->node, t->node);
      p.expect(relay_ok, [&] {
        return "node " + std::to_string(v) + " relays stamp " + std::to_string(k) + " but is not the D_" + std::to_string((k + 1) / 2) +
               " neighbour of node " + std::to_string(pt->node);
      });
    }
    rep.add(std::move(p));
  }

  Round arrival = 0;
  for (std::size_t r = 0; r < rs.size() && !arrival; ++r)
    for (const auto& dl : rs[r].deliveries)
      if (dl.node == d.source && dl.message.kind == MessageKind::ack) arrival = static_cast<Round>(r) + 1;
  {
    Probe p("ack.reaches_source");
    p.expect(arrival > 0, [] { return std::string("the source never hears an ack"); });
    p.expect(arrival == 0 || static_cast<std::size_t>(arrival) == rs.size(),
             [&] { return "slice continues past the ack at local round " + std::to_string(arrival); });
    rep.add(std::move(p));
  }
  if (window) {
    Probe p("ack.window");
    p.expect(arrival >= 2 * L - 2 && arrival <= 3 * L - 4, [&] {
      return "ack at " + std::to_string(arrival) + " outside [" + std::to_string(2 * L - 2) + ", " + std::to_string(3 * L - 4) + "]";
    });
    rep.add(std::move(p));
  }
  return arrival;
}

inline std::optional<NodeId> z_of(const LabeledGraph& lg, NodeId source) {
  for (std::size_t v = 0; v < lg.labels.size(); ++v)
    if (static_cast<NodeId>(v) != source && lg.labels[v].x3) return static_cast<NodeId>(v);
  return std::nullopt;
}

inline Rounds slice(const SimulationTrace& t, Round from, Round to) {
  from = std::max(from, 1);
  to = std::min(to, t.last_round());
  if (to < from) return {};
  return Rounds(t.rounds).subspan(static_cast<std::size_t>(from - 1), static_cast<std::size_t>(to - from + 1));
}

}  // namespace verify_detail

inline CheckReport check_trace_B(const Graph& g, const StageDecomposition& d, const LabeledGraph& lg, const SimulationTrace& trace,
                                 const std::vector<verify_detail::StageMasks>* masks = nullptr) {
  CheckReport rep;
  const std::vector<verify_detail::StageMasks> own = masks ? std::vector<verify_detail::StageMasks>{} : verify_detail::masks_of(d, g.size());
  const auto& S = masks ? *masks : own;
  verify_detail::check_channel(g, trace.rounds, 0, rep);
  verify_detail::check_broadcast(g, d, S, lg, trace.rounds, false, rep);
  return rep;
}

inline CheckReport check_trace_Back(const Graph& g, const StageDecomposition& d, const LabeledGraph& lg, const SimulationTrace& trace,
                                    const std::vector<verify_detail::StageMasks>* masks = nullptr) {
  CheckReport rep;
  const std::vector<verify_detail::StageMasks> own = masks ? std::vector<verify_detail::StageMasks>{} : verify_detail::masks_of(d, g.size());
  const auto& S = masks ? *masks : own;
  verify_detail::check_channel(g, trace.rounds, 0, rep);
  verify_detail::check_broadcast(g, d, S, lg, trace.rounds, true, rep);
  const auto z = verify_detail::z_of(lg, d.source);
  if (!z) {
    rep.add("ack.opened_by_initiator", false, "no node carries x3");
    return rep;
  }
  verify_detail::check_ack_chain(g, d, S, trace.rounds, *z, 2 * d.last_stage - 2, true, rep);
  return rep;
}

// The acknowledged broadcast up to the source's ack round m, then a plain
// broadcast of m; everyone must know m before round 2m.
inline CheckReport check_common_round(const Graph& g, const StageDecomposition& d, const LabeledGraph& lg, const SimulationTrace& trace,
                                      const ProtocolResult* result = nullptr, const std::vector<verify_detail::StageMasks>* masks = nullptr) {
  using namespace verify_detail;
  CheckReport rep;
  const std::size_t n = g.size();
  check_channel(g, trace.rounds, 0, rep);

  Round m = 0;
  for (const auto& rec : trace.rounds) {
    for (const auto& dl : rec.deliveries)
      if (dl.node == d.source && dl.message.kind == MessageKind::ack) m = rec.round;
    if (m) break;
  }
  if (!m) {
    rep.add("common.ack_round", false, "the source never hears an ack");
    return rep;
  }
  const auto z = z_of(lg, d.source);
  const std::vector<StageMasks> own = masks ? std::vector<StageMasks>{} : masks_of(d, n);
  const auto& S = masks ? *masks : own;
  const Rounds first_part = slice(trace, 1, m), second_part = slice(trace, m + 1, trace.last_round());

  CheckReport part1;
  check_broadcast(g, d, S, lg, first_part, true, part1);
  if (z) check_ack_chain(g, d, S, first_part, *z, 2 * d.last_stage - 2, true, part1);
  rep.merge(part1, "ack");
  CheckReport part2;
  check_broadcast(g, d, S, lg, second_part, false, part2);
  rep.merge(part2, "b");

  {
    Probe p("common.value_is_m");
    for (const auto& rec : second_part)
      for (const auto& t : rec.transmissions)
        if (t.message.is_broadcast())
          p.expect(t.message.value == m, [&] { return at_round(rec.round, "broadcast value is not " + std::to_string(m)); });
    rep.add(std::move(p));
  }
  {
    Probe p("common.known_before_2m");
    const auto first = first_deliveries(second_part, n);
    for (std::size_t v = 0; v < n; ++v) {
      if (static_cast<NodeId>(v) == d.source) continue;
      const Round known = m + first[v];
      p.expect(first[v] > 0 && known < 2 * m,
               [&] { return "node " + std::to_string(v) + " learns m = " + std::to_string(m) + " at round " + std::to_string(known); });
    }
    rep.add(std::move(p));
  }
  if (result) {
    Probe p("common.reported_round");
    p.expect(result->ack_round == m && result->common_known_round == 2 * m, [&] { return "reported common round differs from 2m = " + std::to_string(2 * m); });
    rep.add(std::move(p));
  }
  return rep;
}

// Three-phase arbitrary-source broadcast. Phase boundaries come from the
// result; everything else is read off the trace.
inline CheckReport check_trace_Barb(const Graph& g, const LabeledGraph& lg, NodeId actual_source, const Bytes& mu, const SimulationTrace& trace,
                                    const ProtocolResult& result) {
  using namespace verify_detail;
  CheckReport rep;
  const std::size_t n = g.size();
  check_channel(g, trace.rounds, 0, rep);

  std::optional<NodeId> root;
  for (std::size_t v = 0; v < lg.labels.size(); ++v)
    if (lg.labels[v].bits() == "111") root = static_cast<NodeId>(v);
  const auto ps = result.phase_starts;
  {
    Probe p("arb.phase_layout");
    p.expect(root.has_value(), [] { return std::string("no root labelled 111"); });
    p.expect(ps.size() == 3 && ps[0] == 1 && ps[2].has_value(), [] { return std::string("phase starts missing"); });
    if (ps.size() == 3 && ps[2]) {
      p.expect(ps[1].has_value() == (actual_source != root), [&] { return std::string("phase 2 presence does not match the source"); });
      p.expect(!ps[1] || (*ps[1] > 1 && *ps[1] < *ps[2]), [] { return std::string("phase starts out of order"); });
      p.expect(*ps[2] <= trace.last_round(), [] { return std::string("trace ends before phase 3"); });
    }
    p.expect(result.timestamp_bound.has_value(), [] { return std::string("no T reported"); });
    const bool ok = p.ok();
    rep.add(std::move(p));
    if (!ok) return rep;
  }

  const auto d = build_stages(g, *root);
  const auto S = masks_of(d, n);
  const int L = d.last_stage;
  const Round p3 = *ps[2];
  const Round p1_end = (ps[1] ? *ps[1] : p3) - 1;
  const std::int64_t T = *result.timestamp_bound;
  const auto z = z_of(lg, *root);

  const Rounds ph1 = slice(trace, 1, p1_end);
  CheckReport r1;
  check_broadcast(g, d, S, lg, ph1, true, r1);
  if (z) check_ack_chain(g, d, S, ph1, *z, 2 * L - 2, true, r1);
  rep.merge(r1, "phase1");
  const auto t = first_deliveries(ph1, n);
  {
    Probe p("arb.T_is_z_timestamp");
    p.expect(z && T == t[static_cast<std::size_t>(*z)] && T == 2 * L - 3, [&] { return "T = " + std::to_string(T); });
    rep.add(std::move(p));
  }

  if (ps[1]) {
    const Rounds ph2 = slice(trace, *ps[1], p3 - 1);
    CheckReport r2;
    check_broadcast(g, d, S, lg, ph2, true, r2);
    const auto f2 = first_deliveries(ph2, n);
    const Round open = f2[static_cast<std::size_t>(actual_source)] + static_cast<Round>(T) + 1;
    check_ack_chain(g, d, S, ph2, actual_source, open, false, r2);
    rep.merge(r2, "phase2");
    Probe p("arb.phase2_carries");
    for (const auto& rec : ph2)
      for (const auto& tx : rec.transmissions) {
        if (tx.message.kind == MessageKind::ready)
          p.expect(tx.message.value == T, [&] { return at_round(rec.round, "ready without T"); });
        if (tx.message.kind == MessageKind::ack)
          p.expect(tx.message.payload == mu, [&] { return at_round(rec.round, "phase-2 ack without the source message"); });
      }
    rep.add(std::move(p));
  }

  const Rounds ph3 = slice(trace, p3, trace.last_round());
  CheckReport r3;
  check_broadcast(g, d, S, lg, ph3, false, r3);
  rep.merge(r3, "phase3");
  const auto f3 = first_deliveries(ph3, n);
  {
    Probe p("arb.phase3_carries");
    for (const auto& rec : ph3)
      for (const auto& tx : rec.transmissions)
        if (tx.message.is_broadcast())
          p.expect(tx.message.payload == mu && tx.message.value == T, [&] { return at_round(rec.round, "phase-3 frame lacks mu or T"); });
    rep.add(std::move(p));
  }
  {
    Probe p("arb.phase3_matches_t_v");
    for (std::size_t v = 0; v < n; ++v)
      if (static_cast<NodeId>(v) != *root)
        p.expect(f3[v] == t[v], [&] { return "node " + std::to_string(v) + ": phase-3 round " + std::to_string(f3[v]) + ", t_v " + std::to_string(t[v]); });
    rep.add(std::move(p));
  }
  {
    Probe p("arb.all_hold_mu");
    for (std::size_t v = 0; v < n; ++v) {
      if (static_cast<NodeId>(v) == actual_source) continue;
      bool got = false;
      for (const auto& rec : trace.rounds)
        for (const auto& dl : rec.deliveries) got = got || (dl.node == static_cast<NodeId>(v) && dl.message.payload == mu);
      p.expect(got, [&] { return "node " + std::to_string(v) + " never receives mu"; });
    }
    rep.add(std::move(p));
  }
  {
    // Node v informed at global round rho in phase 3 knows completion at
    // rho + T - t_v; all of these must agree and not precede completion.
    Probe p("arb.knowledge_coincides");
    const Round want = p3 - 1 + static_cast<Round>(T);
    Round last = p3 - 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (static_cast<NodeId>(v) == *root) continue;
      const Round k = p3 - 1 + f3[v] + static_cast<Round>(T) - t[v];
      p.expect(k == want, [&] { return "node " + std::to_string(v) + " knows at " + std::to_string(k) + ", root at " + std::to_string(want); });
      last = std::max(last, p3 - 1 + f3[v]);
    }
    p.expect(last <= want, [&] { return "completion at " + std::to_string(last) + " after the common round " + std::to_string(want); });
    for (std::size_t v = 0; v < result.knowledge_rounds.size(); ++v)
      p.expect(result.knowledge_rounds[v] == want, [&] { return "reported knowledge round of node " + std::to_string(v) + " differs"; });
    p.expect(result.knowledge_rounds.size() == n, [] { return std::string("knowledge rounds missing"); });
    rep.add(std::move(p));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exhaustive small-graph sweep

// Every connected graph on nodes 0..n-1, in increasing order of the edge
// subset bitmask over pairs (0,1),(0,2),...,(n-2,n-1).
template <class F>
void for_each_connected_graph(int n, F&& fn, std::uint64_t from = 0, std::uint64_t to = ~std::uint64_t{0}) {
  if (n < 1 || n > 8) throw std::invalid_argument("for_each_connected_graph: n must be in 1..8");
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.push_back({u, v});
  const std::uint64_t total = std::uint64_t{1} << pairs.size();
  to = std::min(to, total);
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n));
  std::vector<Edge> edges;
  for (std::uint64_t mask = from; mask < to; ++mask) {
    std::fill(adj.begin(), adj.end(), 0);
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if (mask >> e & 1) {
        adj[static_cast<std::size_t>(pairs[e].first)] |= 1u << pairs[e].second;
        adj[static_cast<std::size_t>(pairs[e].second)] |= 1u << pairs[e].first;
      }
    std::uint32_t seen = 1, frontier = 1;
    while (frontier) {
      std::uint32_t next = 0;
      for (int v = 0; v < n; ++v)
        if (frontier >> v & 1) next |= adj[static_cast<std::size_t>(v)];
      frontier = next & ~seen;
      seen |= next;
    }
    if (seen != (std::uint32_t{1} << n) - 1) continue;
    edges.clear();
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if (mask >> e & 1) edges.push_back({pairs[e].first, pairs[e].second});
    fn(mask, Graph::from_edges(static_cast<std::size_t>(n), edges));
  }
}

inline std::vector<Graph> enumerate_connected_graphs(int n) {
  std::vector<Graph> out;
  for_each_connected_graph(n, [&](std::uint64_t, Graph g) { out.push_back(std::move(g)); });
  return out;
}

struct ExhaustiveOptions {
  int max_n = 7;
  int min_n = 2;
  bool decomposition = true;  // stage invariants
  bool broadcast = true;      // lambda + B, lambda_ack + B_ack
  bool common_round = true;
  bool arb_labels = true;
  bool arb_runs = false;  // B_arb from every source; slow
  unsigned threads = 0;   // 0 = hardware concurrency
  Bytes payload = "mu";
};

struct CheckTally {
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  std::string first_witness;
};

struct ExhaustiveSummary {
  std::vector<std::uint64_t> graphs_per_n;     // index n
  std::vector<std::uint64_t> instances_per_n;  // (graph, source) pairs
  std::map<std::string, CheckTally> checks;
  std::uint64_t lambda_label_mask = 0;  // bit (x1x2 as binary) set if realized
  std::uint64_t ack_label_mask = 0;     // bit (x1x2x3 as binary)
  std::uint64_t arb_label_mask = 0;
  int max_stage_count = 0;
  double max_completion_ratio = 0;  // (2l-3)/(2n-3)

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return kv.second.failed == 0; });
  }
  std::uint64_t total_instances() const {
    std::uint64_t s = 0;
    for (auto c : instances_per_n) s += c;
    return s;
  }

  void merge(const ExhaustiveSummary& o) {
    if (graphs_per_n.size() < o.graphs_per_n.size()) graphs_per_n.resize(o.graphs_per_n.size());
    if (instances_per_n.size() < o.instances_per_n.size()) instances_per_n.resize(o.instances_per_n.size());
    for (std::size_t i = 0; i < o.graphs_per_n.size(); ++i) graphs_per_n[i] += o.graphs_per_n[i];
    for (std::size_t i = 0; i < o.instances_per_n.size(); ++i) instances_per_n[i] += o.instances_per_n[i];
    for (const auto& [name, t] : o.checks) {
      auto& mine = checks[name];
      if (mine.failed == 0 && t.failed > 0) mine.first_witness = t.first_witness;
      mine.passed += t.passed;
      mine.failed += t.failed;
    }
    lambda_label_mask |= o.lambda_label_mask;
    ack_label_mask |= o.ack_label_mask;
    arb_label_mask |= o.arb_label_mask;
    max_stage_count = std::max(max_stage_count, o.max_stage_count);
    max_completion_ratio = std::max(max_completion_ratio, o.max_completion_ratio);
  }
};

namespace verify_detail {

inline std::string instance_name(const Graph& g, NodeId source) {
  std::string s = "n=" + std::to_string(g.size()) + " source=" + std::to_string(source) + " edges=";
  for (const auto& e : g.edges()) s += std::to_string(e.u) + "-" + std::to_string(e.v) + " ";
  return s;
}

// Reports from one checker normally list the same names in the same order,
// so the tally slots of the previous report are reused while the layout
// matches and the map is only consulted when it changes.
struct Tallier {
  ExhaustiveSummary& out;
  struct Layout {
    std::string_view prefix;
    std::vector<std::pair<std::string_view, std::string_view>> names;
    std::vector<CheckTally*> slots;
  };
  std::vector<Layout> layouts;

  static bool same_literal(std::string_view a, std::string_view b) {
    return (a.data() == b.data() && a.size() == b.size()) || a == b;
  }

  template <class Where>
  void fold(const CheckReport& rep, std::string_view prefix, Where&& where) {
    Layout* lay = nullptr;
    for (auto& l : layouts)
      if (l.prefix == prefix) lay = &l;
    if (!lay) lay = &layouts.emplace_back(Layout{prefix, {}, {}});
    bool same = lay->names.size() == rep.checks.size();
    for (std::size_t i = 0; same && i < rep.checks.size(); ++i)
      same = same_literal(lay->names[i].first, rep.checks[i].name) && same_literal(lay->names[i].second, rep.checks[i].scope);
    if (!same) {
      lay->names.clear();
      lay->slots.clear();
      for (const auto& c : rep.checks) {
        lay->names.push_back({c.name, c.scope});
        lay->slots.push_back(&out.checks[std::string(prefix) + c.full_name()]);
      }
    }
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
      CheckTally& t = *lay->slots[i];
      if (rep.checks[i].passed) {
        ++t.passed;
      } else {
        if (t.failed == 0) t.first_witness = where() + ": " + rep.checks[i].witness;
        ++t.failed;
      }
    }
  }
};

inline std::uint64_t label_code(const Label& l) {
  return (l.x1 ? 4u : 0u) | (l.x2 ? 2u : 0u) | (l.x3 ? 1u : 0u);
}

inline void sweep_graph(const Graph& g, const ExhaustiveOptions& opt, ExhaustiveSummary& out) {
  const std::size_t n = g.size();
  const int cap = default_max_rounds(n);
  Tallier tally{out, {}};  // NOLINT
  ++out.graphs_per_n[n];
  for (NodeId s = 0; s < static_cast<NodeId>(n); ++s) {
    ++out.instances_per_n[n];
    auto where = [&] { return instance_name(g, s); };
    try {
      const auto d = build_stages(g, s);
      const auto S = masks_of(d, n);
      out.max_stage_count = std::max(out.max_stage_count, d.last_stage);
      if (opt.decomposition) tally.fold(check_decomposition(g, d, &S), "", where);

      if (opt.broadcast) {
        const auto lam = label_broadcast(g, d);
        for (const auto& l : lam.labels) out.lambda_label_mask |= std::uint64_t{1} << (label_code(l) >> 1);
        tally.fold(check_labels(lam, d, &S), "lambda/", where);
        const auto b = run_B(lam, s, opt.payload, cap);
        tally.fold(check_trace_B(g, d, lam, b.trace, &S), "B/", where);
        if (n >= 2)
          out.max_completion_ratio = std::max(out.max_completion_ratio, double(b.result.completion_round) / double(2 * n - 3));
      }

      if (opt.broadcast || opt.common_round) {
        const auto ack = label_ack(g, d);
        for (const auto& l : ack.labels) out.ack_label_mask |= std::uint64_t{1} << label_code(l);
        if (opt.broadcast) {
          tally.fold(check_labels(ack, d, &S), "lambda_ack/", where);
          const auto a = run_Back(ack, s, opt.payload, cap);
          tally.fold(check_trace_Back(g, d, ack, a.trace, &S), "Back/", where);
        }
        if (opt.common_round) {
          const auto c = run_common_round(ack, s, opt.payload, cap);
          tally.fold(check_common_round(g, d, ack, c.trace, &c.result, &S), "common/", where);
        }
      }
    } catch (const std::exception& e) {
      auto& t = out.checks["exception"];
      if (t.failed == 0) t.first_witness = where() + ": " + e.what();
      ++t.failed;
    }
  }
  if (opt.arb_labels || opt.arb_runs) {
    auto where = [&] { return instance_name(g, kArbRoot) + "(arb)"; };
    try {
      const auto arb = label_arb(g);
      for (const auto& l : arb.labels) out.arb_label_mask |= std::uint64_t{1} << label_code(l);
      tally.fold(check_labels(arb), "lambda_arb/", where);
      if (opt.arb_runs) {
        for (NodeId s = 0; s < static_cast<NodeId>(n); ++s) {
          const auto r = run_Barb(arb, s, opt.payload, default_max_rounds(n));
          tally.fold(check_trace_Barb(g, arb, s, opt.payload, r.trace, r.result), "Barb/",
                     [&] { return instance_name(g, s) + "(arb)"; });
        }
      }
    } catch (const std::exception& e) {
      auto& t = out.checks["exception"];
      if (t.failed == 0) t.first_witness = where() + ": " + e.what();
      ++t.failed;
    }
  }
}

}  // namespace verify_detail

// Runs every check on every connected graph with min_n..max_n nodes from
// every source. Work is split into contiguous mask ranges and merged in
// enumeration order, so the first recorded witness does not depend on the
// thread count.
inline ExhaustiveSummary exhaustive_small_graphs(const ExhaustiveOptions& opt) {
  if (opt.max_n > 8 || opt.min_n < 2 || opt.min_n > opt.max_n)
    throw std::invalid_argument("exhaustive: need 2 <= min_n <= max_n <= 8");
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  ExhaustiveSummary total;
  total.graphs_per_n.assign(static_cast<std::size_t>(opt.max_n) + 1, 0);
  total.instances_per_n.assign(static_cast<std::size_t>(opt.max_n) + 1, 0);
  for (int n = opt.min_n; n <= opt.max_n; ++n) {
    const std::uint64_t masks = std::uint64_t{1} << (n * (n - 1) / 2);
    const unsigned parts = static_cast<unsigned>(std::min<std::uint64_t>(threads, masks));
    std::vector<ExhaustiveSummary> partial(parts);
    auto work = [&](unsigned k) {
      auto& out = partial[k];
      out.graphs_per_n.assign(total.graphs_per_n.size(), 0);
      out.instances_per_n.assign(total.instances_per_n.size(), 0);
      const std::uint64_t lo = masks * k / parts, hi = masks * (k + 1) / parts;
      for_each_connected_graph(n, [&](std::uint64_t, const Graph& g) { verify_detail::sweep_graph(g, opt, out); }, lo, hi);
    };
    if (parts == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned k = 0; k < parts; ++k) pool.emplace_back(work, k);
      for (auto& t : pool) t.join();
    }
    for (const auto& p : partial) total.merge(p);
  }
  return total;
}

inline std::string label_set(std::uint64_t mask, int width) {
  std::string out;
  for (int code = 0; code < (1 << width); ++code) {
    if (!(mask >> code & 1)) continue;
    if (!out.empty()) out += ",";
    for (int b = width - 1; b >= 0; --b) out += (code >> b & 1) ? '1' : '0';
  }
  return out;
}

}  // namespace radiocast
