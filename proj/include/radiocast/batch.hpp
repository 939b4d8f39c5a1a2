#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "radiocast/graph.hpp"
#include "radiocast/io.hpp"
#include "radiocast/labeling.hpp"
#include "radiocast/protocols.hpp"
#include "radiocast/verify.hpp"

namespace radiocast {

inline const std::vector<std::string>& known_protocols() {
  static const std::vector<std::string> names{"b", "ack", "arb", "common-round"};
  return names;
}

// Labeling scheme a protocol runs on.
inline Scheme scheme_for_protocol(const std::string& protocol) {
  if (protocol == "b") return Scheme::lambda;
  if (protocol == "ack" || protocol == "common-round") return Scheme::lambda_ack;
  if (protocol == "arb") return Scheme::lambda_arb;
  throw std::invalid_argument("unknown protocol '" + protocol + "'");
}

inline LabeledGraph make_labels(const Graph& g, Scheme scheme, std::optional<NodeId> source) {
  switch (scheme) {
    case Scheme::lambda: return label_broadcast(g, source.value_or(0));
    case Scheme::lambda_ack: return label_ack(g, source.value_or(0));
    case Scheme::lambda_arb: return label_arb(g);
  }
  throw std::invalid_argument("unknown scheme");
}

inline ProtocolRun run_protocol(const std::string& protocol, const LabeledGraph& lg, NodeId source, const Bytes& payload,
                                int max_rounds) {
  if (protocol == "b") return run_B(lg, source, payload, max_rounds);
  if (protocol == "ack") return run_Back(lg, source, payload, max_rounds);
  if (protocol == "common-round") return run_common_round(lg, source, payload, max_rounds);
  if (protocol == "arb") return run_Barb(lg, source, payload, max_rounds);
  throw std::invalid_argument("unknown protocol '" + protocol + "'");
}

// Every checker that applies to a run: decomposition, labels, and the trace.
inline CheckReport check_run(const std::string& protocol, const LabeledGraph& lg, NodeId source, const Bytes& payload,
                             const SimulationTrace& trace, const std::optional<ProtocolResult>& result) {
  CheckReport rep;
  rep.merge(check_labels(lg));
  const Graph& g = lg.graph;
  if (protocol == "arb") {
    if (!result) {
      rep.add("trace.result_present", false, "arb traces need the final result block");
      return rep;
    }
    rep.merge(check_trace_Barb(g, lg, source, payload, trace, *result));
    return rep;
  }
  const auto d = build_stages(g, source);
  if (protocol == "b") rep.merge(check_trace_B(g, d, lg, trace));
  else if (protocol == "ack") rep.merge(check_trace_Back(g, d, lg, trace));
  else if (protocol == "common-round") rep.merge(check_common_round(g, d, lg, trace, result ? &*result : nullptr));
  else rep.add("trace.protocol_known", false, "unknown protocol '" + protocol + "'");
  return rep;
}

struct BatchConfig {
  std::vector<Family> families;
  std::vector<int> sizes;
  int trials = 1;
  std::vector<std::string> protocols;
  std::uint64_t seed = 1;
  double p = 0.2;
  std::optional<int> max_rounds;  // default: 4n+16
  bool keep_traces = false;
  Bytes payload = "mu";
};

struct BatchRow {
  Family family = Family::path;
  int n = 0;
  std::uint64_t seed = 0;
  NodeId source = 0;
  Scheme scheme = Scheme::lambda;
  std::string protocol;
  Round completion_round = 0;
  int bound = 0;  // 2n-3
  std::optional<Round> ack_round;
  int ell = 0;
  bool pass = false;
  std::string failure;  // first failed check or error
};

struct BatchOutcome {
  std::vector<BatchRow> rows;
  std::vector<std::pair<std::string, Json>> traces;  // (file name, document)
  double max_ratio = 0;                              // completion_round / (2n-3)
  bool all_pass = true;
};

inline std::string trace_file_name(const BatchRow& r, int trial) {
  return std::string(to_string(r.family)) + "-n" + std::to_string(r.n) + "-t" + std::to_string(trial) + "-" + r.protocol + ".json";
}

// Rows are ordered by (family, n, trial, protocol) in the order given.
// Trial t uses generator seed cfg.seed + t and source t mod n.
inline BatchOutcome run_batch(const BatchConfig& cfg) {
  if (cfg.families.empty() || cfg.sizes.empty() || cfg.protocols.empty() || cfg.trials < 1)
    throw std::invalid_argument("batch: families, sizes, protocols and trials >= 1 are required");
  for (const auto& pr : cfg.protocols) scheme_for_protocol(pr);
  for (int n : cfg.sizes)
    if (n < 2) throw std::invalid_argument("batch: sizes must be >= 2");

  BatchOutcome out;
  for (Family fam : cfg.families) {
    for (int n : cfg.sizes) {
      for (int trial = 0; trial < cfg.trials; ++trial) {
        GenParams params;
        params.n = static_cast<std::size_t>(n);
        if (fam == Family::random) params.p = cfg.p;
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(trial);
        const Graph g = generate(fam, params, seed);
        const NodeId source = trial % n;
        const int cap = cfg.max_rounds.value_or(default_max_rounds(g.size()));

        for (const auto& protocol : cfg.protocols) {
          BatchRow row;
          row.family = fam;
          row.n = n;
          row.seed = seed;
          row.source = source;
          row.scheme = scheme_for_protocol(protocol);
          row.protocol = protocol;
          row.bound = 2 * n - 3;
          try {
            const LabeledGraph lg = make_labels(g, row.scheme, source);
            const auto d = build_stages(g, row.scheme == Scheme::lambda_arb ? kArbRoot : source);
            row.ell = d.last_stage;
            std::optional<ProtocolRun> run;
            SimulationTrace partial;
            try {
              run = run_protocol(protocol, lg, source, cfg.payload, cap);
            } catch (const SimulationTimeout& e) {
              row.failure = std::string("timeout: ") + e.what();
              partial = e.partial_trace();
            }
            if (run) {
              const ProtocolResult& res = run->result;
              if (protocol == "arb") {
                // local to phase 3, comparable with the other protocols
                Round last = 0;
                for (std::size_t v = 0; v < res.final_informed_rounds.size(); ++v)
                  if (res.final_informed_rounds[v]) last = std::max(last, *res.final_informed_rounds[v] - *res.phase_starts[2] + 1);
                row.completion_round = last;
              } else {
                row.completion_round = res.last_informed_round();
              }
              row.ack_round = res.ack_round;
              const CheckReport rep = check_run(protocol, lg, source, cfg.payload, run->trace, res);
              row.pass = rep.ok() && row.completion_round <= row.bound;
              if (!rep.ok()) row.failure = rep.first_failure();
              else if (!row.pass) row.failure = "completion round exceeds 2n-3";
            }
            if (cfg.keep_traces) {
              TraceDocument doc{protocol, source, cfg.payload, run ? run->trace : partial,
                                run ? std::optional<ProtocolResult>(run->result) : std::nullopt};
              out.traces.emplace_back(trace_file_name(row, trial), trace_to_json(doc));
            }
          } catch (const std::exception& e) {
            row.pass = false;
            row.failure = e.what();
          }
          out.all_pass = out.all_pass && row.pass;
          if (row.bound > 0) out.max_ratio = std::max(out.max_ratio, double(row.completion_round) / double(row.bound));
          out.rows.push_back(std::move(row));
        }
      }
    }
  }
  return out;
}

inline constexpr const char* kBatchCsvHeader =
    "family,n,seed,source,scheme,protocol,completion_round,bound_2n_minus_3,ack_round,ell,pass";

inline std::string batch_csv(const std::vector<BatchRow>& rows) {
  std::ostringstream os;
  os << kBatchCsvHeader << '\n';
  for (const auto& r : rows) {
    os << to_string(r.family) << ',' << r.n << ',' << r.seed << ',' << r.source << ',' << to_string(r.scheme) << ','
       << r.protocol << ',' << r.completion_round << ',' << r.bound << ',';
    if (r.ack_round) os << *r.ack_round;
    os << ',' << r.ell << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace radiocast
