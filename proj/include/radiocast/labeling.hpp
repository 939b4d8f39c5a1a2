#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "radiocast/decomposition.hpp"
#include "radiocast/graph.hpp"

namespace radiocast {

enum class Scheme { lambda, lambda_ack, lambda_arb };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::lambda: return "lambda";
    case Scheme::lambda_ack: return "lambda_ack";
    case Scheme::lambda_arb: return "lambda_arb";
  }
  return "unknown";
}

inline Scheme scheme_from_string(std::string_view name) {
  for (auto s : {Scheme::lambda, Scheme::lambda_ack, Scheme::lambda_arb})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown labeling scheme '" + std::string(name) + "'");
}

inline int scheme_width(Scheme s) { return s == Scheme::lambda ? 2 : 3; }

// Input for which a scheme is undefined (a single-node graph has no z).
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Label {
  bool x1 = false;  // joins the dominator set once informed
  bool x2 = false;  // sends "stay" the round after being informed
  bool x3 = false;  // starts the acknowledgement chain
  int width = 2;

  // Most significant bit first: "x1x2" or "x1x2x3".
  std::string bits() const {
    std::string out{x1 ? '1' : '0', x2 ? '1' : '0'};
    if (width == 3) out += x3 ? '1' : '0';
    return out;
  }

  static Label parse(std::string_view text) {
    if (text.size() != 2 && text.size() != 3) throw std::invalid_argument("label must have 2 or 3 bits");
    Label l;
    l.width = static_cast<int>(text.size());
    bool* fields[] = {&l.x1, &l.x2, &l.x3};
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] != '0' && text[i] != '1') throw std::invalid_argument("label bits must be 0 or 1");
      *fields[i] = text[i] == '1';
    }
    return l;
  }

  friend bool operator==(const Label&, const Label&) = default;
};

struct LabeledGraph {
  Graph graph;
  std::vector<Label> labels;
  Scheme scheme = Scheme::lambda;
  std::optional<NodeId> source_used;  // absent for lambda_arb

  const Label& label(NodeId v) const { return labels.at(static_cast<std::size_t>(v)); }

  std::vector<std::string> bit_strings() const {
    std::vector<std::string> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(l.bits());
    return out;
  }

  std::set<std::string> distinct_labels() const {
    std::set<std::string> out;
    for (const auto& l : labels) out.insert(l.bits());
    return out;
  }
};

// 2-bit scheme: x1 marks every dominator of any stage; for each v in
// D_{i+1} and D_i, the lowest-id neighbour of v in N_i gets x2.
inline LabeledGraph label_broadcast(const Graph& g, const StageDecomposition& d) {
  const std::size_t n = g.size();
  LabeledGraph lg{g, std::vector<Label>(n), Scheme::lambda, d.source};
  for (const auto& st : d.stages) st.dominators.for_each([&](NodeId v) { lg.labels[static_cast<std::size_t>(v)].x1 = true; });

  for (int i = 1; i < d.last_stage; ++i) {
    const Stage& cur = d.stage(i);
    NodeSet kept = d.stage(i + 1).dominators & cur.dominators;
    kept.for_each([&](NodeId v) {
      NodeId w = (cur.newly_informed & g.neighbor_set(v)).first();
      if (w < 0)
        throw InvariantBreach("label_broadcast: dominator " + std::to_string(v) + " of stage " + std::to_string(i) +
                              " has no private neighbour");
      lg.labels[static_cast<std::size_t>(w)].x2 = true;
    });
  }
  return lg;
}

inline LabeledGraph label_broadcast(const Graph& g, NodeId source) { return label_broadcast(g, build_stages(g, source)); }

// Lowest-id node among those informed in the final broadcast round 2l-3.
inline NodeId choose_z(const StageDecomposition& d) {
  if (d.last_stage < 2) throw DegenerateInput("choose_z: a single-node graph has no acknowledging node");
  return d.stage(d.last_stage - 1).newly_informed.first();
}

inline NodeId choose_z(const Graph& g, NodeId source) { return choose_z(build_stages(g, source)); }

inline LabeledGraph label_ack(const Graph& g, const StageDecomposition& d) {
  if (g.size() < 2) throw DegenerateInput("label_ack: needs at least two nodes");
  LabeledGraph lg = label_broadcast(g, d);
  lg.scheme = Scheme::lambda_ack;
  for (auto& l : lg.labels) l.width = 3;
  Label& z = lg.labels[static_cast<std::size_t>(choose_z(d))];
  if (z.x1 || z.x2) throw InvariantBreach("label_ack: last-informed node carries x1 or x2");
  z.x3 = true;
  return lg;
}

inline LabeledGraph label_ack(const Graph& g, NodeId source) { return label_ack(g, build_stages(g, source)); }

// Root of the arbitrary-source scheme. Any node works; node 0 keeps runs reproducible.
inline constexpr NodeId kArbRoot = 0;

inline LabeledGraph label_arb(const Graph& g) {
  if (g.size() < 2) throw DegenerateInput("label_arb: needs at least two nodes");
  LabeledGraph lg = label_ack(g, kArbRoot);
  lg.scheme = Scheme::lambda_arb;
  lg.source_used.reset();
  lg.labels[kArbRoot] = Label{true, true, true, 3};
  return lg;
}

}  // namespace radiocast
