#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "radiocast/decomposition.hpp"
#include "radiocast/labeling.hpp"
#include "radiocast/protocols.hpp"
#include "radiocast/simulator.hpp"
#include "radiocast/verify.hpp"

namespace radiocast {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Bytes <-> lowercase hex

inline std::string to_hex(std::string_view bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out += digits[c >> 4];
    out += digits[c & 0xF];
  }
  return out;
}

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw FormatError("hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw FormatError("invalid hex digit");
    out += static_cast<char>((hi << 4) | lo);
  }
  return out;
}

namespace detail {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::optional<T> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

template <class T>
Json optional_array(const std::vector<std::optional<T>>& v) {
  Json arr = Json::array();
  for (const auto& x : v) arr.push_back(optional_json(x));
  return arr;
}

template <class T>
std::vector<std::optional<T>> optional_array_from(const Json& j, const char* key) {
  std::vector<std::optional<T>> out;
  if (!j.contains(key)) return out;
  for (const auto& x : j.at(key)) out.push_back(x.is_null() ? std::nullopt : std::optional<T>(x.get<T>()));
  return out;
}

inline Json node_array(const NodeSet& s) {
  Json arr = Json::array();
  s.for_each([&](NodeId v) { arr.push_back(v); });
  return arr;
}

inline NodeSet node_set_from(const Json& arr, std::size_t n) {
  NodeSet s(n);
  for (const auto& v : arr) {
    auto id = v.get<NodeId>();
    if (id < 0 || static_cast<std::size_t>(id) >= n) throw FormatError("node id out of range: " + std::to_string(id));
    s.insert(id);
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Labels file: { "scheme": str, "source": int|null, "labels": [bitstring per node] }

inline Json labels_to_json(const LabeledGraph& lg) {
  Json j;
  j["scheme"] = std::string(to_string(lg.scheme));
  j["source"] = detail::optional_json(lg.source_used);
  j["labels"] = lg.bit_strings();
  return j;
}

inline LabeledGraph labels_from_json(const Json& j, const Graph& g) {
  try {
    LabeledGraph lg{g, {}, scheme_from_string(j.at("scheme").get<std::string>()), detail::optional_from<NodeId>(j, "source")};
    for (const auto& s : j.at("labels")) {
      Label l = Label::parse(s.get<std::string>());
      if (l.width != scheme_width(lg.scheme)) throw FormatError("label width does not match scheme");
      lg.labels.push_back(l);
    }
    if (lg.labels.size() != g.size()) throw FormatError("labels file has " + std::to_string(lg.labels.size()) +
                                                        " labels for " + std::to_string(g.size()) + " nodes");
    return lg;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("labels file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("labels file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Stage decomposition

inline Json decomposition_to_json(const StageDecomposition& d) {
  Json j;
  j["source"] = d.source;
  j["last_stage"] = d.last_stage;
  Json stages = Json::array();
  for (std::size_t i = 0; i < d.stages.size(); ++i) {
    const Stage& st = d.stages[i];
    Json s;
    s["stage"] = i + 1;
    s["informed"] = detail::node_array(st.informed);
    s["uninformed"] = detail::node_array(st.uninformed);
    s["frontier"] = detail::node_array(st.frontier);
    s["dominators"] = detail::node_array(st.dominators);
    s["newly_informed"] = detail::node_array(st.newly_informed);
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  return j;
}

inline StageDecomposition decomposition_from_json(const Json& j, std::size_t n) {
  try {
    StageDecomposition d;
    d.source = j.at("source").get<NodeId>();
    d.last_stage = j.at("last_stage").get<int>();
    for (const auto& s : j.at("stages")) {
      d.stages.push_back(Stage{detail::node_set_from(s.at("informed"), n), detail::node_set_from(s.at("uninformed"), n),
                               detail::node_set_from(s.at("frontier"), n), detail::node_set_from(s.at("dominators"), n),
                               detail::node_set_from(s.at("newly_informed"), n)});
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("decomposition: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Messages and traces

inline void put_message(Json& j, const Message& m) {
  j["kind"] = std::string(to_string(m.kind));
  j["stamp"] = detail::optional_json(m.stamp);
  j["aux"] = m.payload ? Json(to_hex(*m.payload)) : Json(nullptr);
  j["value"] = detail::optional_json(m.value);
}

inline Message message_from_json(const Json& j) {
  Message m;
  m.kind = message_kind_from_string(j.at("kind").get<std::string>());
  m.stamp = detail::optional_from<Round>(j, "stamp");
  if (auto aux = detail::optional_from<std::string>(j, "aux")) m.payload = from_hex(*aux);
  m.value = detail::optional_from<std::int64_t>(j, "value");
  return m;
}

inline Json round_to_json(const RoundRecord& rec) {
  Json j;
  j["round"] = rec.round;
  Json tx = Json::array();
  for (const auto& t : rec.transmissions) {
    Json e;
    e["node"] = t.node;
    put_message(e, t.message);
    tx.push_back(std::move(e));
  }
  Json rx = Json::array();
  for (const auto& d : rec.deliveries) {
    Json e;
    e["node"] = d.node;
    e["from"] = d.from;
    put_message(e, d.message);
    rx.push_back(std::move(e));
  }
  j["tx"] = std::move(tx);
  j["rx"] = std::move(rx);
  j["collisions"] = rec.collisions;
  return j;
}

inline RoundRecord round_from_json(const Json& j) {
  RoundRecord rec;
  rec.round = j.at("round").get<Round>();
  for (const auto& e : j.at("tx")) rec.transmissions.push_back({e.at("node").get<NodeId>(), message_from_json(e)});
  for (const auto& e : j.at("rx"))
    rec.deliveries.push_back({e.at("node").get<NodeId>(), e.at("from").get<NodeId>(), message_from_json(e)});
  rec.collisions = j.at("collisions").get<std::vector<NodeId>>();
  return rec;
}

inline Json result_to_json(const ProtocolResult& r) {
  Json j;
  j["protocol"] = r.protocol;
  j["completion_round"] = r.completion_round;
  j["last_informed_round"] = r.last_informed_round();
  j["informed_rounds"] = detail::optional_array(r.informed_rounds);
  j["ack_round"] = detail::optional_json(r.ack_round);
  j["common_known_round"] = detail::optional_json(r.common_known_round);
  if (!r.common_value_rounds.empty()) j["common_value_rounds"] = detail::optional_array(r.common_value_rounds);
  if (r.protocol == "arb") {
    j["T"] = detail::optional_json(r.timestamp_bound);
    j["phase_starts"] = detail::optional_array(r.phase_starts);
    j["knowledge_rounds"] = detail::optional_array(r.knowledge_rounds);
    j["timestamps"] = detail::optional_array(r.timestamps);
    j["final_informed_rounds"] = detail::optional_array(r.final_informed_rounds);
  }
  return j;
}

inline ProtocolResult result_from_json(const Json& j) {
  ProtocolResult r;
  r.protocol = j.at("protocol").get<std::string>();
  r.completion_round = j.at("completion_round").get<Round>();
  r.informed_rounds = detail::optional_array_from<Round>(j, "informed_rounds");
  r.ack_round = detail::optional_from<Round>(j, "ack_round");
  r.common_known_round = detail::optional_from<Round>(j, "common_known_round");
  r.common_value_rounds = detail::optional_array_from<Round>(j, "common_value_rounds");
  r.timestamp_bound = detail::optional_from<std::int64_t>(j, "T");
  r.phase_starts = detail::optional_array_from<Round>(j, "phase_starts");
  r.knowledge_rounds = detail::optional_array_from<Round>(j, "knowledge_rounds");
  r.timestamps = detail::optional_array_from<std::int64_t>(j, "timestamps");
  r.final_informed_rounds = detail::optional_array_from<Round>(j, "final_informed_rounds");
  return r;
}

inline Json summary_to_json(NodeId v, const NodeSummary& s) {
  Json j;
  j["node"] = v;
  j["informed_round"] = detail::optional_json(s.informed_round);
  j["transmit_rounds"] = s.transmit_rounds;
  Json flags = Json::object();
  for (const auto& [k, val] : s.flags) flags[k] = val;
  j["flags"] = std::move(flags);
  return j;
}

inline NodeSummary summary_from_json(const Json& j) {
  NodeSummary s;
  s.informed_round = detail::optional_from<Round>(j, "informed_round");
  s.transmit_rounds = j.at("transmit_rounds").get<std::vector<Round>>();
  for (const auto& [k, val] : j.at("flags").items()) s.flags.emplace_back(k, val.get<std::int64_t>());
  return s;
}

// A simulated run as written to disk.
struct TraceDocument {
  std::string protocol;
  NodeId source = 0;
  Bytes payload;
  SimulationTrace trace;
  std::optional<ProtocolResult> result;
};

inline Json trace_to_json(const TraceDocument& doc) {
  Json j;
  j["protocol"] = doc.protocol;
  j["source"] = doc.source;
  j["payload"] = to_hex(doc.payload);
  Json rounds = Json::array();
  for (const auto& rec : doc.trace.rounds) rounds.push_back(round_to_json(rec));
  j["rounds"] = std::move(rounds);
  Json fin = doc.result ? result_to_json(*doc.result) : Json::object();
  Json nodes = Json::array();
  for (std::size_t v = 0; v < doc.trace.final_states.size(); ++v)
    nodes.push_back(summary_to_json(static_cast<NodeId>(v), doc.trace.final_states[v]));
  fin["nodes"] = std::move(nodes);
  j["final"] = std::move(fin);
  return j;
}

inline TraceDocument trace_from_json(const Json& j) {
  try {
    TraceDocument doc;
    doc.protocol = j.at("protocol").get<std::string>();
    doc.source = j.at("source").get<NodeId>();
    doc.payload = from_hex(j.at("payload").get<std::string>());
    for (const auto& r : j.at("rounds")) doc.trace.rounds.push_back(round_from_json(r));
    const Json& fin = j.at("final");
    if (fin.contains("protocol")) doc.result = result_from_json(fin);
    if (fin.contains("nodes"))
      for (const auto& s : fin.at("nodes")) doc.trace.final_states.push_back(summary_from_json(s));
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("trace: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("trace: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Check reports

inline Json report_to_json(const CheckReport& rep) {
  Json j;
  j["pass"] = rep.ok();
  j["passed"] = rep.checks.size() - rep.failures();
  j["failed"] = rep.failures();
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json e;
    e["name"] = c.full_name();
    e["pass"] = c.passed;
    if (!c.passed) e["witness"] = c.witness;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j;
}

inline Json exhaustive_to_json(const ExhaustiveSummary& s, int min_n) {
  Json j;
  j["pass"] = s.ok();
  Json per_n = Json::array();
  for (std::size_t n = static_cast<std::size_t>(min_n); n < s.graphs_per_n.size(); ++n) {
    Json e;
    e["n"] = n;
    e["graphs"] = s.graphs_per_n[n];
    e["instances"] = s.instances_per_n[n];
    per_n.push_back(std::move(e));
  }
  j["sizes"] = std::move(per_n);
  j["instances"] = s.total_instances();
  j["max_stage_count"] = s.max_stage_count;
  j["max_completion_ratio"] = s.max_completion_ratio;
  j["realized_labels"] = {{"lambda", label_set(s.lambda_label_mask, 2)},
                          {"lambda_ack", label_set(s.ack_label_mask, 3)},
                          {"lambda_arb", label_set(s.arb_label_mask, 3)}};
  Json checks = Json::array();
  for (const auto& [name, t] : s.checks) {
    Json e;
    e["name"] = name;
    e["passed"] = t.passed;
    e["failed"] = t.failed;
    if (t.failed) e["witness"] = t.first_witness;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j;
}

}  // namespace radiocast
