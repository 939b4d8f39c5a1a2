#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "radiocast/graph.hpp"

namespace radiocast {

// Raised when a construction step finds one of its own preconditions broken.
// Seeing this means a bug, not bad input.
class InvariantBreach : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// One stage i of the informed-set construction.
struct Stage {
  NodeSet informed;        // informed before round 2i-1
  NodeSet uninformed;      // complement of informed
  NodeSet frontier;        // uninformed nodes with an informed neighbour
  NodeSet dominators;      // transmit the payload in round 2i-1
  NodeSet newly_informed;  // frontier nodes with exactly one dominator neighbour

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct StageDecomposition {
  NodeId source = 0;
  std::vector<Stage> stages;  // stages[i - 1] is stage i
  int last_stage = 1;         // smallest i with informed == V

  const Stage& stage(int i) const { return stages.at(static_cast<std::size_t>(i - 1)); }
  Stage& stage(int i) { return stages.at(static_cast<std::size_t>(i - 1)); }

  friend bool operator==(const StageDecomposition&, const StageDecomposition&) = default;
};

// Inclusion-minimal S within candidates dominating targets. Walks candidates in
// ascending id and drops every node whose removal keeps targets dominated.
inline NodeSet minimal_dominating_subset(const Graph& g, const NodeSet& candidates, const NodeSet& targets) {
  if (!is_dominating(g, candidates, targets))
    throw InvariantBreach("minimal_dominating_subset: candidates do not dominate targets");
  NodeSet kept = candidates;
  candidates.for_each([&](NodeId v) {
    kept.erase(v);
    if (!is_dominating(g, kept, targets)) kept.insert(v);
  });
  return kept;
}

inline StageDecomposition build_stages(const Graph& g, NodeId source) {
  const std::size_t n = g.size();
  if (source < 0 || static_cast<std::size_t>(source) >= n)
    throw GraphError(GraphErrc::node_out_of_range, "source " + std::to_string(source));

  StageDecomposition d;
  d.source = source;
  d.stages.reserve(n);

  Stage first;
  first.informed = NodeSet(n, {source});
  first.uninformed = NodeSet::full(n) - first.informed;
  first.frontier = g.neighbor_set(source);
  first.newly_informed = first.frontier;
  first.dominators = first.informed;
  d.stages.push_back(std::move(first));

  NodeSet reach = g.neighbor_set(source);  // Gamma(informed)
  while (d.stages.back().informed.size() != n) {
    if (d.stages.size() >= n) throw InvariantBreach("build_stages: no progress within n stages");
    const Stage& prev = d.stages.back();
    Stage next;
    next.informed = prev.informed | prev.newly_informed;
    next.uninformed = prev.uninformed - prev.newly_informed;
    prev.newly_informed.for_each([&](NodeId v) { reach |= g.neighbor_set(v); });
    next.frontier = next.uninformed & reach;
    next.dominators = minimal_dominating_subset(g, prev.dominators | prev.newly_informed, next.frontier);
    next.newly_informed = NodeSet(n);
    next.frontier.for_each([&](NodeId v) {
      if (g.neighbor_set(v).intersection_size(next.dominators) == 1) next.newly_informed.insert(v);
    });
    d.stages.push_back(std::move(next));
  }
  d.last_stage = static_cast<int>(d.stages.size());
  return d;
}

}  // namespace radiocast
