#pragma once

#include <concepts>
#include <iterator>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "radiocast/graph.hpp"
#include "radiocast/message.hpp"

namespace radiocast {

struct Transmission {
  NodeId node = 0;
  Message message;
  friend bool operator==(const Transmission&, const Transmission&) = default;
};

struct Delivery {
  NodeId node = 0;  // receiver
  NodeId from = 0;
  Message message;
  friend bool operator==(const Delivery&, const Delivery&) = default;
};

// Everything observable in one synchronous round. All three lists are sorted
// by node id.
struct RoundRecord {
  Round round = 1;
  std::vector<Transmission> transmissions;
  std::vector<Delivery> deliveries;
  std::vector<NodeId> collisions;  // listening nodes with >= 2 transmitting neighbours

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct NodeSummary {
  std::optional<Round> informed_round;  // first delivery of the broadcast message
  std::vector<Round> transmit_rounds;   // rounds in which the broadcast message was sent
  std::vector<std::pair<std::string, std::int64_t>> flags;

  friend bool operator==(const NodeSummary&, const NodeSummary&) = default;
};

struct SimulationTrace {
  std::vector<RoundRecord> rounds;
  std::vector<NodeSummary> final_states;

  Round last_round() const { return rounds.empty() ? 0 : rounds.back().round; }
  friend bool operator==(const SimulationTrace&, const SimulationTrace&) = default;
};

// Thrown when the round cap is hit before the protocol's completion predicate
// fires. Carries everything simulated so far.
class SimulationTimeout : public std::runtime_error {
 public:
  SimulationTimeout(std::string phase, SimulationTrace partial)
      : std::runtime_error("round cap reached before completion (" + phase + ")"),
        phase_(std::move(phase)),
        partial_(std::move(partial)) {}

  const std::string& phase() const noexcept { return phase_; }
  const SimulationTrace& partial_trace() const noexcept { return partial_; }

 private:
  std::string phase_;
  SimulationTrace partial_;
};

// A per-node protocol automaton. Each round the engine first asks every node
// for its decision (transmit a message, or listen), then hands every listener
// what it heard: the message if exactly one neighbour transmitted, otherwise
// nothing. Automata see only their own history and the round counter.
template <class A>
concept NodeAutomaton = requires(A a, const A ca, Round r, const std::optional<Message>& heard) {
  { a.decide(r) } -> std::same_as<std::optional<Message>>;
  a.receive(r, heard);
  { ca.summary() } -> std::same_as<NodeSummary>;
};

template <NodeAutomaton A>
RoundRecord step(std::span<A> automata, const Graph& g, Round round) {
  if (round < 1) throw std::invalid_argument("step: round must be >= 1");
  if (automata.size() != g.size()) throw std::invalid_argument("step: one automaton per node required");

  RoundRecord rec;
  rec.round = round;
  const std::size_t n = g.size();
  // Scratch reused across rounds so a record costs one allocation per list.
  thread_local std::vector<Transmission> decided;
  thread_local std::vector<const Message*> sent;
  thread_local std::vector<NodeId> heard_from;  // -1 silence, -2 collision
  decided.clear();
  for (std::size_t v = 0; v < n; ++v) {
    if (auto m = automata[v].decide(round)) {
      validate(*m);
      decided.push_back({static_cast<NodeId>(v), std::move(*m)});
    }
  }
  rec.transmissions.assign(std::make_move_iterator(decided.begin()), std::make_move_iterator(decided.end()));
  sent.assign(n, nullptr);
  for (const auto& t : rec.transmissions) sent[static_cast<std::size_t>(t.node)] = &t.message;

  heard_from.assign(n, -1);
  std::size_t deliveries = 0, collisions = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (sent[v]) continue;
    int count = 0;
    for (NodeId w : g.neighbors(static_cast<NodeId>(v))) {
      if (sent[static_cast<std::size_t>(w)]) {
        ++count;
        heard_from[v] = w;
      }
    }
    if (count > 1) heard_from[v] = -2;
    deliveries += count == 1;
    collisions += count > 1;
  }
  rec.deliveries.reserve(deliveries);
  rec.collisions.reserve(collisions);
  for (std::size_t v = 0; v < n; ++v) {
    if (sent[v]) continue;
    const NodeId from = heard_from[v];
    if (from >= 0) {
      const Message& m = *sent[static_cast<std::size_t>(from)];
      rec.deliveries.push_back({static_cast<NodeId>(v), from, m});
      automata[v].receive(round, m);
    } else {
      if (from == -2) rec.collisions.push_back(static_cast<NodeId>(v));
      automata[v].receive(round, std::nullopt);
    }
  }
  return rec;
}

// Owns one automaton per node and the growing trace. Protocol runners drive it
// round by round and decide when to stop.
template <NodeAutomaton A>
class Simulation {
 public:
  Simulation(const Graph& g, std::vector<A> automata) : graph_(&g), automata_(std::move(automata)) {
    if (automata_.size() != g.size()) throw std::invalid_argument("Simulation: one automaton per node required");
  }

  Round round() const { return static_cast<Round>(trace_.rounds.size()); }

  const RoundRecord& advance() {
    trace_.rounds.push_back(step(std::span<A>(automata_), *graph_, round() + 1));
    return trace_.rounds.back();
  }

  std::span<A> automata() { return automata_; }
  std::span<const A> automata() const { return automata_; }
  const A& node(NodeId v) const { return automata_.at(static_cast<std::size_t>(v)); }
  A& node(NodeId v) { return automata_.at(static_cast<std::size_t>(v)); }
  const Graph& graph() const { return *graph_; }

  // Trace with final per-node summaries filled in.
  SimulationTrace snapshot() const {
    SimulationTrace t = trace_;
    fill_final(t);
    return t;
  }

  SimulationTrace finish() && {
    fill_final(trace_);
    return std::move(trace_);
  }

  // Steps until done() holds. At most max_rounds rounds are spent here;
  // exceeding that throws SimulationTimeout labelled with phase.
  template <class Done>
  void run_until(Done&& done, int max_rounds, const std::string& phase) {
    for (int spent = 0; !done(); ++spent) {
      if (spent >= max_rounds) throw SimulationTimeout(phase, snapshot());
      advance();
    }
  }

 private:
  void fill_final(SimulationTrace& t) const {
    t.final_states.clear();
    t.final_states.reserve(automata_.size());
    for (const auto& a : automata_) t.final_states.push_back(a.summary());
  }

  const Graph* graph_;
  std::vector<A> automata_;
  SimulationTrace trace_;
};

}  // namespace radiocast
