// radiocast: generate graphs, label them, simulate the broadcast protocols and
// check the results.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radiocast/radiocast.hpp"

namespace fs = std::filesystem;
using namespace radiocast;

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kUsage = 2, kTimeout = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

Graph read_graph(const std::string& path) { return parse_edge_list(read_file(path)); }

// "0x..." is hex, anything else is taken as UTF-8 bytes.
Bytes parse_payload(const std::string& text) {
  if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) return from_hex(text.substr(2));
  return text;
}

Scheme scheme_from_flag(const std::string& flag) {
  if (flag == "b") return Scheme::lambda;
  if (flag == "ack") return Scheme::lambda_ack;
  if (flag == "arb") return Scheme::lambda_arb;
  throw UsageError("unknown scheme '" + flag + "' (expected b, ack or arb)");
}

// --max-rounds, then RADIOCAST_MAX_ROUNDS, then 4n+16.
int round_cap(std::optional<int> flag, std::size_t n) {
  if (flag) return *flag;
  if (const char* env = std::getenv("RADIOCAST_MAX_ROUNDS"); env && *env) {
    try {
      std::size_t used = 0;
      int v = std::stoi(env, &used);
      if (used == std::string(env).size() && v >= 1) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("RADIOCAST_MAX_ROUNDS must be a positive integer, got '") + env + "'");
  }
  return default_max_rounds(n);
}

template <class T>
std::vector<T> split_list(const std::string& text, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse(item));
  return out;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string family;
  std::size_t n = 0;
  std::optional<double> p;
  std::size_t rows = 0, cols = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  GenParams params{a.n, a.p, a.rows, a.cols};
  write_output(a.out, serialize_edge_list(generate(family_from_string(a.family), params, a.seed)));
  return kPass;
}

struct LabelArgs {
  std::string scheme;
  std::optional<NodeId> source;
  std::string graph, out;
};

int cmd_label(const LabelArgs& a) {
  const Scheme scheme = scheme_from_flag(a.scheme);
  if (scheme == Scheme::lambda_arb && a.source) throw UsageError("--source is not accepted for scheme arb");
  if (scheme != Scheme::lambda_arb && !a.source) throw UsageError("--source is required for scheme " + a.scheme);
  const Graph g = read_graph(a.graph);
  write_output(a.out, labels_to_json(make_labels(g, scheme, a.source)).dump(2) + "\n");
  return kPass;
}

struct StagesArgs {
  NodeId source = 0;
  std::string graph, out;
};

int cmd_stages(const StagesArgs& a) {
  const Graph g = read_graph(a.graph);
  write_output(a.out, decomposition_to_json(build_stages(g, a.source)).dump(2) + "\n");
  return kPass;
}

struct SimulateArgs {
  std::string protocol;
  std::optional<NodeId> source;
  std::string message = "mu";
  std::optional<int> max_rounds;
  std::string graph, labels, out;
};

int cmd_simulate(const SimulateArgs& a) {
  const Graph g = read_graph(a.graph);
  const LabeledGraph lg = labels_from_json(read_json(a.labels), g);
  const Scheme want = scheme_for_protocol(a.protocol);
  const bool compatible = lg.scheme == want || (a.protocol == "b" && lg.scheme == Scheme::lambda_ack);
  if (!compatible)
    throw UsageError("protocol " + a.protocol + " cannot run on " + std::string(to_string(lg.scheme)) + " labels");

  NodeId source = 0;
  if (a.protocol == "arb") {
    if (!a.source) throw UsageError("--source (the actual source) is required for protocol arb");
    source = *a.source;
  } else {
    if (a.source && lg.source_used && *a.source != *lg.source_used)
      throw UsageError("labels were built for source " + std::to_string(*lg.source_used) + ", not " + std::to_string(*a.source));
    if (!a.source && !lg.source_used) throw UsageError("--source is required");
    source = a.source ? *a.source : *lg.source_used;
  }
  const Bytes payload = parse_payload(a.message);
  const int cap = round_cap(a.max_rounds, g.size());

  try {
    const ProtocolRun run = run_protocol(a.protocol, lg, source, payload, cap);
    write_output(a.out, trace_to_json({a.protocol, source, payload, run.trace, run.result}).dump(2) + "\n");
    std::ostream& log = a.out.empty() || a.out == "-" ? std::cerr : std::cout;
    log << "protocol=" << a.protocol << " source=" << source << " rounds=" << run.trace.last_round()
        << " completion_round=" << run.result.last_informed_round();
    if (run.result.ack_round) log << " ack_round=" << *run.result.ack_round;
    if (run.result.common_known_round) log << " common_known_round=" << *run.result.common_known_round;
    log << "\n";
    return kPass;
  } catch (const SimulationTimeout& e) {
    write_output(a.out, trace_to_json({a.protocol, source, payload, e.partial_trace(), std::nullopt}).dump(2) + "\n");
    std::cerr << "error: " << e.what() << " after " << cap << " rounds\n";
    return kTimeout;
  }
}

struct VerifyArgs {
  bool all = false;
  std::string stages;
  std::string graph, labels, trace;
};

int cmd_verify(const VerifyArgs& a) {
  const Graph g = read_graph(a.graph);
  const LabeledGraph lg = labels_from_json(read_json(a.labels), g);
  CheckReport rep;
  std::optional<TraceDocument> doc;
  if (!a.trace.empty()) doc = trace_from_json(read_json(a.trace));

  if (!a.stages.empty()) {
    const auto d = decomposition_from_json(read_json(a.stages), g.size());
    rep.merge(check_decomposition(g, d));
  }
  if (a.all || !doc) rep.merge(check_labels(lg));
  if (doc) {
    CheckReport tr = check_run(doc->protocol, lg, doc->source, doc->payload, doc->trace, doc->result);
    // check_run repeats the label checks; keep them only once
    CheckReport trimmed;
    const std::size_t label_checks = check_labels(lg).checks.size();
    for (std::size_t i = label_checks; i < tr.checks.size(); ++i) trimmed.checks.push_back(tr.checks[i]);
    rep.merge(trimmed);
  }
  std::cout << report_to_json(rep).dump(2) << "\n";
  if (!rep.ok()) std::cerr << "FAIL " << rep.first_failure() << "\n";
  return rep.ok() ? kPass : kCheckFailure;
}

struct BatchArgs {
  std::string families, sizes, protocols = "b";
  int trials = 1;
  std::uint64_t seed = 1;
  double p = 0.2;
  std::optional<int> max_rounds;
  std::string out, trace_dir;
};

int cmd_batch(const BatchArgs& a) {
  BatchConfig cfg;
  cfg.families = split_list<Family>(a.families, [](const std::string& s) { return family_from_string(s); });
  cfg.sizes = split_list<int>(a.sizes, [](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw UsageError("bad size '" + s + "'");
    return v;
  });
  cfg.protocols = split_list<std::string>(a.protocols, [](const std::string& s) { return s; });
  if (cfg.families.empty()) throw UsageError("--families is empty");
  if (cfg.sizes.empty()) throw UsageError("--sizes is empty");
  if (cfg.protocols.empty()) throw UsageError("--protocols is empty");
  for (const auto& pr : cfg.protocols)
    if (std::find(known_protocols().begin(), known_protocols().end(), pr) == known_protocols().end())
      throw UsageError("unknown protocol '" + pr + "'");
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.p = a.p;
  if (a.max_rounds) cfg.max_rounds = a.max_rounds;
  else if (std::getenv("RADIOCAST_MAX_ROUNDS")) cfg.max_rounds = round_cap(std::nullopt, 0);
  cfg.keep_traces = !a.trace_dir.empty();

  const BatchOutcome res = run_batch(cfg);
  write_output(a.out, batch_csv(res.rows));
  if (cfg.keep_traces) {
    fs::create_directories(a.trace_dir);
    for (const auto& [name, doc] : res.traces) write_output((fs::path(a.trace_dir) / name).string(), doc.dump(2) + "\n");
  }
  std::ostream& log = a.out.empty() || a.out == "-" ? std::cerr : std::cout;
  std::size_t failed = 0;
  for (const auto& r : res.rows)
    if (!r.pass) {
      ++failed;
      std::cerr << "FAIL " << to_string(r.family) << " n=" << r.n << " seed=" << r.seed << " " << r.protocol << ": " << r.failure << "\n";
    }
  log << "rows=" << res.rows.size() << " failed=" << failed << " max_ratio=" << res.max_ratio
      << " all_pass=" << (res.all_pass ? "true" : "false") << "\n";
  return res.all_pass ? kPass : kCheckFailure;
}

struct ExhaustiveArgs {
  int max_n = 5;
  int min_n = 2;
  bool arb = false;
  bool no_common = false;
  unsigned threads = 0;
};

int cmd_exhaustive(const ExhaustiveArgs& a) {
  ExhaustiveOptions opt;
  opt.max_n = a.max_n;
  opt.min_n = a.min_n;
  opt.arb_runs = a.arb;
  opt.common_round = !a.no_common;
  opt.threads = a.threads;
  const auto s = exhaustive_small_graphs(opt);
  std::cout << exhaustive_to_json(s, a.min_n).dump(2) << "\n";
  return s.ok() ? kPass : kCheckFailure;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const GraphError& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DegenerateInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kCheckFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constant-length labeling schemes for radio broadcast"};
  app.require_subcommand(1);
  int code = kPass;

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a connected graph as an edge list");
  g->add_option("--family", gen.family, "path, cycle, star, complete, grid or random")->required();
  g->add_option("--n", gen.n, "node count")->required();
  g->add_option("--p", gen.p, "edge probability (random)");
  g->add_option("--rows", gen.rows, "grid rows");
  g->add_option("--cols", gen.cols, "grid columns");
  g->add_option("--seed", gen.seed, "generator seed");
  g->add_option("-o,--output", gen.out, "output file (default stdout)");
  g->callback([&] { code = guarded([&] { return cmd_gen(gen); }); });

  LabelArgs lab;
  auto* l = app.add_subcommand("label", "Compute a labeling scheme");
  l->add_option("--scheme", lab.scheme, "b, ack or arb")->required();
  l->add_option("--source", lab.source, "source node (b and ack only)");
  l->add_option("graph", lab.graph, "graph file")->required();
  l->add_option("-o,--output", lab.out, "labels JSON (default stdout)");
  l->callback([&] { code = guarded([&] { return cmd_label(lab); }); });

  StagesArgs stg;
  auto* st = app.add_subcommand("stages", "Print the stage decomposition");
  st->add_option("--source", stg.source, "source node")->required();
  st->add_option("graph", stg.graph, "graph file")->required();
  st->add_option("-o,--output", stg.out, "decomposition JSON (default stdout)");
  st->callback([&] { code = guarded([&] { return cmd_stages(stg); }); });

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a protocol and write its trace");
  s->add_option("--protocol", sim.protocol, "b, ack, arb or common-round")->required();
  s->add_option("--source", sim.source, "source node (defaults to the labels' source)");
  s->add_option("--message", sim.message, "payload: 0x-prefixed hex or UTF-8 text");
  s->add_option("--max-rounds", sim.max_rounds, "round cap (default 4n+16)")->check(CLI::PositiveNumber);
  s->add_option("graph", sim.graph, "graph file")->required();
  s->add_option("labels", sim.labels, "labels JSON")->required();
  s->add_option("-o,--output", sim.out, "trace JSON (default stdout)");
  s->callback([&] { code = guarded([&] { return cmd_simulate(sim); }); });

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Check labels, a decomposition and a trace");
  v->add_flag("--all", ver.all, "also check the labels when a trace is given");
  v->add_option("--stages", ver.stages, "decomposition JSON to check");
  v->add_option("graph", ver.graph, "graph file")->required();
  v->add_option("labels", ver.labels, "labels JSON")->required();
  v->add_option("trace", ver.trace, "trace JSON");
  v->callback([&] { code = guarded([&] { return cmd_verify(ver); }); });

  BatchArgs bat;
  auto* b = app.add_subcommand("batch", "Run many simulations and tabulate them");
  b->add_option("--families", bat.families, "comma-separated families")->required();
  b->add_option("--sizes", bat.sizes, "comma-separated node counts")->required();
  b->add_option("--trials", bat.trials, "trials per (family, size)")->check(CLI::PositiveNumber);
  b->add_option("--protocols", bat.protocols, "comma-separated protocols");
  b->add_option("--seed", bat.seed, "base seed; trial t uses seed + t");
  b->add_option("--p", bat.p, "edge probability for random graphs");
  b->add_option("--max-rounds", bat.max_rounds, "round cap per run")->check(CLI::PositiveNumber);
  b->add_option("-o,--output", bat.out, "CSV file (default stdout)");
  b->add_option("--trace-dir", bat.trace_dir, "write every trace here");
  b->callback([&] { code = guarded([&] { return cmd_batch(bat); }); });

  ExhaustiveArgs ex;
  auto* e = app.add_subcommand("exhaustive", "Check every connected graph up to a size");
  e->add_option("--max-n", ex.max_n, "largest node count (<= 8)");
  e->add_option("--min-n", ex.min_n, "smallest node count (>= 2)");
  e->add_flag("--arb", ex.arb, "also run the arbitrary-source broadcast from every node");
  e->add_flag("--no-common-round", ex.no_common, "skip the common-round wrapper");
  e->add_option("--threads", ex.threads, "worker threads (default: all cores)");
  e->callback([&] { code = guarded([&] { return cmd_exhaustive(ex); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }
  return code;
}
