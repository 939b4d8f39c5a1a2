#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "radiocast/labeling.hpp"
#include "radiocast/message.hpp"
#include "radiocast/simulator.hpp"

namespace radiocast {

inline int default_max_rounds(std::size_t n) { return 4 * static_cast<int>(n) + 16; }

// ---------------------------------------------------------------------------
// Plain broadcast. One instance per node; the source is the node constructed
// with a message.
class BroadcastNode {
 public:
  BroadcastNode(Label label, std::optional<Message> source_message)
      : label_(label), is_source_(source_message.has_value()), message_(std::move(source_message)) {}

  std::optional<Message> decide(Round r) {
    if (!active_ && message_) return send_payload(r);  // source, first round
    if (!message_) return std::nullopt;
    if (informed_at_ && *informed_at_ == r - 2) {
      if (label_.x1) return send_payload(r);
      return std::nullopt;
    }
    if (informed_at_ && *informed_at_ == r - 1) {
      if (label_.x2) return Message{MessageKind::stay, {}, {}, {}};
      return std::nullopt;
    }
    if (last_payload_tx_ == r - 2 && last_stay_rx_ == r - 1) return send_payload(r);
    return std::nullopt;
  }

  void receive(Round r, const std::optional<Message>& heard) {
    if (!heard) return;
    active_ = true;
    if (heard->kind == MessageKind::stay) {
      last_stay_rx_ = r;
    } else if (!message_) {
      message_ = *heard;
      informed_at_ = r;
    }
  }

  NodeSummary summary() const {
    NodeSummary s;
    s.informed_round = is_source_ ? std::optional<Round>(0) : informed_at_;
    s.transmit_rounds = transmit_rounds_;
    if (is_source_) s.flags.emplace_back("source", 1);
    return s;
  }

  bool informed() const { return message_.has_value(); }
  bool is_source() const { return is_source_; }
  std::optional<Round> informed_round() const { return informed_at_; }
  const std::optional<Message>& message() const { return message_; }

 private:
  Message send_payload(Round r) {
    active_ = true;
    last_payload_tx_ = r;
    transmit_rounds_.push_back(r);
    return *message_;
  }

  Label label_;
  bool is_source_;
  std::optional<Message> message_;
  bool active_ = false;  // has sent or received anything
  std::optional<Round> informed_at_;
  std::optional<Round> last_payload_tx_;
  std::optional<Round> last_stay_rx_;
  std::vector<Round> transmit_rounds_;
};

// ---------------------------------------------------------------------------
// Acknowledged broadcast. Every frame carries a stamp equal to the round it
// is sent in, which lets the ack chain retrace the informing transmissions.

struct AckOptions {
  bool z_starts_ack = true;          // x3 node opens the chain once informed
  bool z_reports_timestamp = false;  // x3 node puts its own stamp in the ack's value
};

class AckBroadcastNode {
 public:
  AckBroadcastNode(Label label, std::optional<Message> source_message, AckOptions options = {})
      : label_(label), options_(options), is_source_(source_message.has_value()), message_(std::move(source_message)) {}

  std::optional<Message> decide(Round r) {
    if (!active_ && message_) {  // source, first round
      active_ = true;
      last_payload_tx_ = r;
      return message_->stamped(1);
    }
    if (!message_) return std::nullopt;
    if (informed_at_ && *informed_at_ == r - 2) {
      if (label_.x1) return send_payload(r, *informed_stamp_ + 2);
      return std::nullopt;
    }
    if (informed_at_ && *informed_at_ == r - 1) {
      if (label_.x3 && options_.z_starts_ack) {
        Message ack{MessageKind::ack, *informed_stamp_, {}, {}};
        if (options_.z_reports_timestamp) ack.value = *informed_stamp_;
        return ack;
      }
      if (label_.x2) return Message{MessageKind::stay, *informed_stamp_ + 1, {}, {}};
      return std::nullopt;
    }
    if (last_rx_round_ == r - 1 && last_rx_->kind == MessageKind::stay) {
      if (last_payload_tx_ == r - 2) return send_payload(r, *last_rx_->stamp + 1);
      return std::nullopt;
    }
    if (last_rx_round_ == r - 1 && last_rx_->kind == MessageKind::ack) {
      if (std::find(transmit_stamps_.begin(), transmit_stamps_.end(), *last_rx_->stamp) != transmit_stamps_.end())
        return Message{MessageKind::ack, *informed_stamp_, last_rx_->payload, last_rx_->value};
    }
    return std::nullopt;
  }

  void receive(Round r, const std::optional<Message>& heard) {
    if (!heard) return;
    if (!heard->stamp) throw MalformedMessage("acknowledged broadcast frame without a stamp");
    active_ = true;
    last_rx_round_ = r;
    last_rx_ = *heard;
    if (!message_ && heard->kind != MessageKind::stay) {
      message_ = *heard;
      message_->stamp.reset();
      informed_at_ = r;
      informed_stamp_ = *heard->stamp;
    }
    if (is_source_ && heard->kind == MessageKind::ack && !ack_round_) {
      ack_round_ = r;
      ack_ = *heard;
    }
  }

  NodeSummary summary() const {
    NodeSummary s;
    s.informed_round = is_source_ ? std::optional<Round>(0) : informed_at_;
    s.transmit_rounds = transmit_stamps_;
    if (is_source_) s.flags.emplace_back("source", 1);
    if (informed_stamp_) s.flags.emplace_back("informed_stamp", *informed_stamp_);
    if (ack_round_) s.flags.emplace_back("ack_round", *ack_round_);
    return s;
  }

  bool informed() const { return message_.has_value(); }
  bool is_source() const { return is_source_; }
  bool acknowledged() const { return ack_round_.has_value(); }
  std::optional<Round> informed_round() const { return informed_at_; }
  std::optional<Round> informed_stamp() const { return informed_stamp_; }
  std::optional<Round> ack_round() const { return ack_round_; }
  const std::optional<Message>& ack_message() const { return ack_; }
  const std::optional<Message>& message() const { return message_; }

 private:
  Message send_payload(Round r, Round stamp) {
    active_ = true;
    last_payload_tx_ = r;
    if (!is_source_) transmit_stamps_.push_back(stamp);
    return message_->stamped(stamp);
  }

  Label label_;
  AckOptions options_;
  bool is_source_;
  std::optional<Message> message_;  // stored without its stamp
  bool active_ = false;
  std::optional<Round> informed_at_;
  std::optional<Round> informed_stamp_;  // stamp of the first payload frame heard
  std::vector<Round> transmit_stamps_;   // stamps of own payload frames (non-source only)
  std::optional<Round> last_payload_tx_;
  std::optional<Round> last_rx_round_;
  std::optional<Message> last_rx_;
  std::optional<Round> ack_round_;
  std::optional<Message> ack_;
};

// ---------------------------------------------------------------------------
// Common-round wrapper: acknowledged broadcast of mu, then a plain broadcast
// of m (the round the source got its ack). Stamped frames belong to the first
// run, unstamped frames to the second. Every node holds m before round 2m,
// so round 2m is common knowledge that the first broadcast finished.
class CommonRoundNode {
 public:
  CommonRoundNode(Label label, std::optional<Message> source_message)
      : label_(label), first_(label, std::move(source_message)) {
    if (!first_.is_source()) second_.emplace(label_, std::nullopt);
  }

  std::optional<Message> decide(Round r) {
    if (first_.is_source()) {
      if (!second_ && first_.acknowledged())
        second_.emplace(label_, Message{MessageKind::source_payload, {}, {}, *first_.ack_round()});
      return second_ ? second_->decide(r) : first_.decide(r);
    }
    if (auto m = first_.decide(r)) return m;
    return second_->decide(r);
  }

  void receive(Round r, const std::optional<Message>& heard) {
    if (!heard) return;
    if (heard->stamp)
      first_.receive(r, heard);
    else if (second_)
      second_->receive(r, heard);
  }

  // m, once this node knows it.
  std::optional<Round> common_value() const {
    if (!second_ || !second_->message()) return std::nullopt;
    return static_cast<Round>(*second_->message()->value);
  }

  std::optional<Round> common_value_round() const {
    if (first_.is_source()) return first_.ack_round();
    return second_->informed_round();
  }

  const AckBroadcastNode& first() const { return first_; }

  NodeSummary summary() const {
    NodeSummary s = first_.summary();
    if (auto m = common_value()) {
      s.flags.emplace_back("m", *m);
      s.flags.emplace_back("m_round", *common_value_round());
      s.flags.emplace_back("common_known_round", 2 * *m);
    }
    return s;
  }

 private:
  Label label_;
  AckBroadcastNode first_;
  std::optional<BroadcastNode> second_;
};

// ---------------------------------------------------------------------------
// Broadcast from an arbitrary source under lambda_arb.
//   phase 1: acknowledged broadcast of "initialize" from the root (label 111);
//            each node keeps t_v, the stamp it was informed with; z reports
//            T = t_z in its ack.
//   phase 2: acknowledged broadcast of ("ready", T) from the root; z stays
//            quiet, and the holder of mu, informed at stamp k, waits T rounds
//            and opens the ack chain at k+T+1 with mu attached.
//   phase 3: plain broadcast of mu (with T) from the root; node v, informed
//            at round rho, knows the broadcast is complete at rho + T - t_v.
// Phase 2 is skipped when the root itself holds mu. Each phase starts the
// round after the root's ack closes the previous one.

enum class ArbPhase { p1_init = 1, p2_ready = 2, p3_final = 3 };

class ArbNode {
 public:
  ArbNode(Label label, std::optional<Bytes> mu)
      : label_(label),
        root_(label.x1 && label.x2 && label.x3),
        mu_(std::move(mu)),
        init_(label, root_ ? std::optional<Message>(Message{MessageKind::initialize, {}, {}, {}}) : std::nullopt,
              AckOptions{true, true}) {
    if (mu_) mu_round_ = 0;
    if (root_) t_v_ = 0;
  }

  std::optional<Message> decide(Round r) {
    if (root_) {
      if (auto next = upcoming_phase(); next != phase_) enter_root_phase(next, r);
      switch (phase_) {
        case ArbPhase::p1_init: return init_.decide(r);
        case ArbPhase::p2_ready: return ready_->decide(r);
        case ArbPhase::p3_final: return final_->decide(r);
      }
    }
    switch (phase_) {
      case ArbPhase::p1_init: return init_.decide(r);
      case ArbPhase::p2_ready:
        if (scheduled_ack_round_ == r) return scheduled_ack_;
        return ready_->decide(r);
      case ArbPhase::p3_final: return final_->decide(r);
    }
    return std::nullopt;
  }

  void receive(Round r, const std::optional<Message>& heard) {
    if (!heard) return;
    if (root_) {
      receive_root(r, *heard);
      return;
    }
    const bool stamped = heard->stamp.has_value();
    switch (heard->kind) {
      case MessageKind::source_payload:
        if (phase_ != ArbPhase::p3_final) {
          phase_ = ArbPhase::p3_final;
          final_.emplace(label_, std::nullopt);
        }
        final_->receive(r, heard);
        if (final_->informed() && !knowledge_round_) {
          const Message& m = *final_->message();
          if (!T_) T_ = m.value;
          note_mu(m.payload, r);
          knowledge_round_ = r + static_cast<Round>(*T_ - *t_v_);
        }
        return;
      case MessageKind::ready:
        if (phase_ == ArbPhase::p1_init) {
          phase_ = ArbPhase::p2_ready;
          ready_.emplace(label_, std::nullopt, AckOptions{false, false});
        }
        if (phase_ != ArbPhase::p2_ready) return;
        ready_->receive(r, heard);
        if (ready_->informed() && !T_) {
          T_ = ready_->message()->value;
          if (mu_ && !scheduled_ack_round_) {
            scheduled_ack_round_ = r + static_cast<Round>(*T_) + 1;
            scheduled_ack_ = Message{MessageKind::ack, *ready_->informed_stamp(), mu_, {}};
          }
        }
        return;
      case MessageKind::initialize:
        if (phase_ != ArbPhase::p1_init) return;
        init_.receive(r, heard);
        if (init_.informed() && !t_v_) t_v_ = *init_.informed_stamp();
        return;
      case MessageKind::ack:
        if (phase_ == ArbPhase::p1_init) init_.receive(r, heard);
        if (phase_ == ArbPhase::p2_ready) {
          ready_->receive(r, heard);
          note_mu(heard->payload, r);
        }
        return;
      case MessageKind::stay:
        if (!stamped) {
          if (final_) final_->receive(r, heard);
        } else if (phase_ == ArbPhase::p1_init) {
          init_.receive(r, heard);
        } else if (phase_ == ArbPhase::p2_ready) {
          ready_->receive(r, heard);
        }
        return;
    }
  }

  bool is_root() const { return root_; }
  ArbPhase phase() const { return phase_; }

  // Phase the root will be in at its next decision.
  ArbPhase upcoming_phase() const {
    if (!root_) return phase_;
    if (phase_ == ArbPhase::p1_init && init_.acknowledged()) return mu_ ? ArbPhase::p3_final : ArbPhase::p2_ready;
    if (phase_ == ArbPhase::p2_ready && ready_->acknowledged()) return ArbPhase::p3_final;
    return phase_;
  }

  // Root-side bookkeeping.
  std::optional<Round> phase_start(ArbPhase p) const { return phase_starts_[static_cast<int>(p) - 1]; }
  std::optional<Round> last_ack_round() const {
    if (ready_ && ready_->acknowledged()) return ready_->ack_round();
    return init_.ack_round();
  }

  std::optional<std::int64_t> timestamp_bound() const {
    if (T_) return T_;
    if (root_ && init_.acknowledged()) return init_.ack_message()->value;
    return std::nullopt;
  }
  std::optional<std::int64_t> t_v() const { return t_v_; }
  std::optional<Round> knowledge_round() const { return knowledge_round_; }
  std::optional<Round> mu_round() const { return mu_round_; }
  const std::optional<Bytes>& mu() const { return mu_; }
  std::optional<Round> final_informed_round() const {
    if (root_) return std::nullopt;
    return final_ ? final_->informed_round() : std::nullopt;
  }

  NodeSummary summary() const {
    NodeSummary s;
    s.informed_round = mu_round_;
    if (final_) {
      auto fs = final_->summary();
      s.transmit_rounds = fs.transmit_rounds;
    }
    if (root_) s.flags.emplace_back("root", 1);
    if (t_v_) s.flags.emplace_back("t_v", *t_v_);
    if (auto T = timestamp_bound()) s.flags.emplace_back("T", *T);
    if (knowledge_round_) s.flags.emplace_back("knowledge_round", *knowledge_round_);
    s.flags.emplace_back("phase", static_cast<int>(phase_));
    return s;
  }

 private:
  void note_mu(const std::optional<Bytes>& payload, Round r) {
    if (payload && !mu_) {
      mu_ = payload;
      mu_round_ = r;
    }
  }

  void enter_root_phase(ArbPhase next, Round r) {
    if (!T_) T_ = init_.ack_message()->value;
    if (!T_) throw InvariantBreach("ArbNode: phase-1 ack carries no T");
    if (next == ArbPhase::p2_ready) {
      ready_.emplace(label_, Message{MessageKind::ready, {}, {}, *T_}, AckOptions{false, false});
    } else {
      if (phase_ == ArbPhase::p2_ready) {
        const auto& ack = ready_->ack_message();
        if (!ack->payload) throw InvariantBreach("ArbNode: phase-2 ack carries no source message");
        note_mu(ack->payload, *ready_->ack_round());
      }
      final_.emplace(label_, Message{MessageKind::source_payload, {}, mu_, *T_});
      knowledge_round_ = r - 1 + static_cast<Round>(*T_);
    }
    phase_ = next;
    phase_starts_[static_cast<int>(next) - 1] = r;
  }

  void receive_root(Round r, const Message& heard) {
    std::optional<Message> m = heard;
    switch (phase_) {
      case ArbPhase::p1_init:
        if (heard.stamp) init_.receive(r, m);
        break;
      case ArbPhase::p2_ready:
        if (heard.stamp) ready_->receive(r, m);
        break;
      case ArbPhase::p3_final:
        if (!heard.stamp) final_->receive(r, m);
        break;
    }
  }

  Label label_;
  bool root_;
  std::optional<Bytes> mu_;
  std::optional<Round> mu_round_;
  ArbPhase phase_ = ArbPhase::p1_init;
  AckBroadcastNode init_;
  std::optional<AckBroadcastNode> ready_;
  std::optional<BroadcastNode> final_;
  std::optional<std::int64_t> t_v_;
  std::optional<std::int64_t> T_;
  std::optional<Round> scheduled_ack_round_;
  std::optional<Message> scheduled_ack_;
  std::optional<Round> knowledge_round_;
  std::optional<Round> phase_starts_[3] = {Round{1}, std::nullopt, std::nullopt};
};

// ---------------------------------------------------------------------------
// Generic runner

// A protocol supplies the node automaton, how to build it from a label (the
// source gets the payload), and the simulator-level stop condition.
template <class P>
concept Protocol = NodeAutomaton<typename P::node_type> &&
    requires(const Label& label, std::optional<Bytes> payload, std::span<const typename P::node_type> nodes) {
  { P::make(label, payload) } -> std::same_as<typename P::node_type>;
  { P::done(nodes) } -> std::convertible_to<bool>;
};

struct BroadcastProtocol {
  using node_type = BroadcastNode;
  static constexpr const char* name = "b";
  static node_type make(const Label& l, std::optional<Bytes> payload) {
    if (!payload) return {l, std::nullopt};
    return {l, Message{MessageKind::source_payload, {}, std::move(payload), {}}};
  }
  static bool done(std::span<const node_type> nodes) {
    return std::all_of(nodes.begin(), nodes.end(), [](const node_type& a) { return a.informed(); });
  }
};

struct AckProtocol {
  using node_type = AckBroadcastNode;
  static constexpr const char* name = "ack";
  static node_type make(const Label& l, std::optional<Bytes> payload) {
    if (!payload) return {l, std::nullopt};
    return {l, Message{MessageKind::source_payload, {}, std::move(payload), {}}};
  }
  static bool done(std::span<const node_type> nodes) {
    return std::any_of(nodes.begin(), nodes.end(), [](const node_type& a) { return a.acknowledged(); });
  }
};

struct CommonRoundProtocol {
  using node_type = CommonRoundNode;
  static constexpr const char* name = "common-round";
  static node_type make(const Label& l, std::optional<Bytes> payload) {
    if (!payload) return {l, std::nullopt};
    return {l, Message{MessageKind::source_payload, {}, std::move(payload), {}}};
  }
  static bool done(std::span<const node_type> nodes) {
    return std::all_of(nodes.begin(), nodes.end(), [](const node_type& a) { return a.common_value().has_value(); });
  }
};

template <Protocol P>
std::vector<typename P::node_type> make_nodes(const LabeledGraph& lg, NodeId source, const Bytes& payload) {
  const std::size_t n = lg.graph.size();
  if (source < 0 || static_cast<std::size_t>(source) >= n)
    throw GraphError(GraphErrc::node_out_of_range, "source " + std::to_string(source));
  if (lg.labels.size() != n) throw std::invalid_argument("label count does not match node count");
  std::vector<typename P::node_type> nodes;
  nodes.reserve(n);
  for (std::size_t v = 0; v < n; ++v)
    nodes.push_back(P::make(lg.labels[v], static_cast<NodeId>(v) == source ? std::optional<Bytes>(payload) : std::nullopt));
  return nodes;
}

template <Protocol P>
SimulationTrace run(const LabeledGraph& lg, NodeId source, const Bytes& payload, int max_rounds) {
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  Simulation sim(lg.graph, make_nodes<P>(lg, source, payload));
  sim.run_until([&] { return P::done(std::as_const(sim).automata()); }, max_rounds, P::name);
  return std::move(sim).finish();
}

// ---------------------------------------------------------------------------
// Protocol-level results

struct ProtocolResult {
  std::string protocol;
  Round completion_round = 0;                       // round the stop condition fired
  std::vector<std::optional<Round>> informed_rounds;  // first round holding mu; 0 = held from the start
  std::optional<Round> ack_round;
  std::optional<Round> common_known_round;
  // common-round wrapper: round each node learned m
  std::vector<std::optional<Round>> common_value_rounds;
  // arbitrary-source broadcast
  std::optional<std::int64_t> timestamp_bound;              // T
  std::vector<std::optional<Round>> phase_starts;           // phases 1..3; absent = skipped
  std::vector<std::optional<Round>> knowledge_rounds;       // round each node knows completion
  std::vector<std::optional<std::int64_t>> timestamps;      // t_v per node
  std::vector<std::optional<Round>> final_informed_rounds;  // phase-3 first delivery, global round

  bool all_informed() const {
    return std::all_of(informed_rounds.begin(), informed_rounds.end(), [](const auto& r) { return r.has_value(); });
  }
  Round last_informed_round() const {
    Round last = 0;
    for (const auto& r : informed_rounds)
      if (r) last = std::max(last, *r);
    return last;
  }

  friend bool operator==(const ProtocolResult&, const ProtocolResult&) = default;
};

struct ProtocolRun {
  SimulationTrace trace;
  ProtocolResult result;
};

namespace detail {

inline void require_scheme(const LabeledGraph& lg, std::initializer_list<Scheme> allowed, const char* protocol) {
  for (auto s : allowed)
    if (lg.scheme == s) return;
  throw std::invalid_argument(std::string("labels of scheme ") + std::string(to_string(lg.scheme)) +
                              " cannot drive protocol " + protocol);
}

template <class Node>
std::vector<std::optional<Round>> informed_from(std::span<const Node> nodes) {
  std::vector<std::optional<Round>> out;
  out.reserve(nodes.size());
  for (const auto& a : nodes) out.push_back(a.is_source() ? std::optional<Round>(0) : a.informed_round());
  return out;
}

}  // namespace detail

inline ProtocolRun run_B(const LabeledGraph& lg, NodeId source, const Bytes& payload, int max_rounds) {
  detail::require_scheme(lg, {Scheme::lambda, Scheme::lambda_ack}, "b");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  Simulation sim(lg.graph, make_nodes<BroadcastProtocol>(lg, source, payload));
  sim.run_until([&] { return BroadcastProtocol::done(std::as_const(sim).automata()); }, max_rounds, "b");
  ProtocolResult res;
  res.protocol = "b";
  res.completion_round = sim.round();
  res.informed_rounds = detail::informed_from(std::as_const(sim).automata());
  return {std::move(sim).finish(), std::move(res)};
}

inline ProtocolRun run_Back(const LabeledGraph& lg, NodeId source, const Bytes& payload, int max_rounds) {
  detail::require_scheme(lg, {Scheme::lambda_ack}, "ack");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  Simulation sim(lg.graph, make_nodes<AckProtocol>(lg, source, payload));
  sim.run_until([&] { return AckProtocol::done(std::as_const(sim).automata()); }, max_rounds, "ack");
  ProtocolResult res;
  res.protocol = "ack";
  res.completion_round = sim.round();
  res.informed_rounds = detail::informed_from(std::as_const(sim).automata());
  res.ack_round = sim.node(source).ack_round();
  return {std::move(sim).finish(), std::move(res)};
}

// Each of the two sub-runs gets its own max_rounds budget.
inline ProtocolRun run_common_round(const LabeledGraph& lg, NodeId source, const Bytes& payload, int max_rounds) {
  detail::require_scheme(lg, {Scheme::lambda_ack}, "common-round");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  Simulation sim(lg.graph, make_nodes<CommonRoundProtocol>(lg, source, payload));
  const auto& src = std::as_const(sim).node(source);
  sim.run_until([&] { return src.first().acknowledged(); }, max_rounds, "common-round/ack");
  sim.run_until([&] { return CommonRoundProtocol::done(std::as_const(sim).automata()); }, max_rounds,
                "common-round/b");

  ProtocolResult res;
  res.protocol = "common-round";
  res.completion_round = sim.round();
  const Round m = *src.first().ack_round();
  res.ack_round = m;
  res.common_known_round = 2 * m;
  for (const auto& a : std::as_const(sim).automata()) {
    res.informed_rounds.push_back(a.first().is_source() ? std::optional<Round>(0) : a.first().informed_round());
    res.common_value_rounds.push_back(a.common_value_round());
  }
  return {std::move(sim).finish(), std::move(res)};
}

// Every phase gets max_rounds rounds; phase 2 additionally gets the T rounds
// the holder of mu must sit out.
inline ProtocolRun run_Barb(const LabeledGraph& lg, NodeId actual_source, const Bytes& payload, int max_rounds) {
  detail::require_scheme(lg, {Scheme::lambda_arb}, "arb");
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  const std::size_t n = lg.graph.size();
  if (actual_source < 0 || static_cast<std::size_t>(actual_source) >= n)
    throw GraphError(GraphErrc::node_out_of_range, "source " + std::to_string(actual_source));

  std::vector<ArbNode> nodes;
  nodes.reserve(n);
  std::optional<NodeId> root;
  for (std::size_t v = 0; v < n; ++v) {
    nodes.emplace_back(lg.labels[v], static_cast<NodeId>(v) == actual_source ? std::optional<Bytes>(payload)
                                                                              : std::nullopt);
    if (nodes.back().is_root()) {
      if (root) throw std::invalid_argument("lambda_arb labels with more than one root");
      root = static_cast<NodeId>(v);
    }
  }
  if (!root) throw std::invalid_argument("lambda_arb labels without a root (label 111)");

  Simulation sim(lg.graph, std::move(nodes));
  const auto& r = std::as_const(sim).node(*root);
  auto done = [&] {
    Round latest = 0;
    for (const auto& a : std::as_const(sim).automata()) {
      if (!a.knowledge_round()) return false;
      latest = std::max(latest, *a.knowledge_round());
    }
    return sim.round() >= latest;
  };

  ArbPhase phase = ArbPhase::p1_init;
  Round phase_start = 1;
  while (!done()) {
    if (auto next = r.upcoming_phase(); next != phase) {
      phase = next;
      phase_start = sim.round() + 1;
    }
    int cap = max_rounds;
    if (phase == ArbPhase::p2_ready) cap += static_cast<int>(r.timestamp_bound().value_or(0));
    if (sim.round() + 1 - phase_start >= cap)
      throw SimulationTimeout("arb/phase " + std::to_string(static_cast<int>(phase)), sim.snapshot());
    sim.advance();
  }

  ProtocolResult res;
  res.protocol = "arb";
  res.completion_round = sim.round();
  res.ack_round = r.last_ack_round();
  res.timestamp_bound = r.timestamp_bound();
  for (auto p : {ArbPhase::p1_init, ArbPhase::p2_ready, ArbPhase::p3_final}) res.phase_starts.push_back(r.phase_start(p));
  std::optional<Round> common;
  bool coincide = true;
  for (const auto& a : std::as_const(sim).automata()) {
    res.informed_rounds.push_back(a.mu_round());
    res.knowledge_rounds.push_back(a.knowledge_round());
    res.timestamps.push_back(a.t_v());
    res.final_informed_rounds.push_back(a.final_informed_round());
    if (common && a.knowledge_round() != common) coincide = false;
    common = a.knowledge_round();
  }
  if (coincide) res.common_known_round = common;
  return {std::move(sim).finish(), std::move(res)};
}

}  // namespace radiocast
