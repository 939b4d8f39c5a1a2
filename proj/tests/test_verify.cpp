#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "radiocast/verify.hpp"

using namespace radiocast;

namespace {

const Bytes kMu = "mu";

std::string report_failures(const CheckReport& rep) {
  std::string out;
  for (const auto& c : rep.checks)
    if (!c.passed) out += c.full_name() + ": " + c.witness + "\n";
  return out;
}

// Moves a transmission to a different node id in one round.
void retarget(SimulationTrace& t, Round r, std::size_t idx, NodeId to) {
  t.rounds[static_cast<std::size_t>(r - 1)].transmissions[idx].node = to;
}

}  // namespace

TEST(CheckDecomposition, FixturesPass) {
  for (const Graph& g : {fixtures::k2(), fixtures::p3(), fixtures::c4(), fixtures::g6()})
    for (NodeId s = 0; s < static_cast<NodeId>(g.size()); ++s) {
      const auto rep = check_decomposition(g, build_stages(g, s));
      EXPECT_TRUE(rep.ok()) << report_failures(rep);
    }
  EXPECT_TRUE(check_decomposition(parse_edge_list("1\n"), build_stages(parse_edge_list("1\n"), 0)).ok());
}

TEST(CheckDecomposition, RedundantDominatorNamed) {
  const Graph g = fixtures::p3();
  auto d = build_stages(g, 0);
  d.stage(2).dominators = NodeSet(3, {0, 1});
  const auto rep = check_decomposition(g, d);
  ASSERT_TRUE(rep.failed("decomp.minimality"));
  EXPECT_EQ(rep.find("decomp.minimality")->witness, "stage 2, node 0 is redundant");
}

TEST(CheckDecomposition, WrongSetsDetected) {
  const Graph g = fixtures::g6();
  auto d = build_stages(g, 0);
  d.stage(2).newly_informed.insert(5);
  EXPECT_TRUE(check_decomposition(g, d).failed("decomp.recurrence"));

  d = build_stages(g, 0);
  d.stage(3).dominators = NodeSet(6, {3, 4});  // dominates nothing
  const auto rep = check_decomposition(g, d);
  EXPECT_TRUE(rep.failed("decomp.domination"));

  d = build_stages(g, 0);
  d.stages.pop_back();
  d.last_stage = 3;
  EXPECT_FALSE(check_decomposition(g, d).ok());

  d = build_stages(g, 0);
  d.stage(1).informed = NodeSet(5, {0});
  EXPECT_TRUE(check_decomposition(g, d).failed("decomp.shape"));
}

TEST(CheckLabels, FixturesPass) {
  for (const Graph& g : {fixtures::k2(), fixtures::p3(), fixtures::c4(), fixtures::g6()}) {
    for (NodeId s = 0; s < static_cast<NodeId>(g.size()); ++s) {
      EXPECT_TRUE(check_labels(label_broadcast(g, s)).ok());
      const auto rep = check_labels(label_ack(g, s));
      EXPECT_TRUE(rep.ok()) << report_failures(rep);
    }
    const auto rep = check_labels(label_arb(g));
    EXPECT_TRUE(rep.ok()) << report_failures(rep);
  }
}

TEST(CheckLabels, InjectedFaults) {
  auto lg = label_ack(fixtures::g6(), 0);
  lg.labels[3] = Label::parse("011");
  auto rep = check_labels(lg);
  EXPECT_TRUE(rep.failed("labels.forbidden_patterns"));
  EXPECT_FALSE(rep.ok());

  lg = label_broadcast(fixtures::g6(), 0);
  lg.labels[2].x1 = false;
  EXPECT_TRUE(check_labels(lg).failed("labels.x1_marks_dominators"));

  lg = label_broadcast(fixtures::g6(), 0);
  lg.labels[4].x2 = false;
  lg.labels[3].x2 = true;
  EXPECT_TRUE(check_labels(lg).failed("labels.x2_sponsors"));

  lg = label_ack(fixtures::g6(), 0);
  lg.labels[5].x3 = false;
  lg.labels[3].x3 = true;
  EXPECT_TRUE(check_labels(lg).failed("labels.single_z"));

  lg = label_arb(fixtures::g6());
  lg.labels[1] = Label::parse("111");
  EXPECT_FALSE(check_labels(lg).ok());

  lg = label_broadcast(fixtures::g6(), 0);
  lg.labels.pop_back();
  EXPECT_TRUE(check_labels(lg).failed("labels.shape"));
}

TEST(CheckTrace, GenuineRunsPass) {
  for (const Graph& g : {fixtures::k2(), fixtures::p3(), fixtures::c4(), fixtures::g6()}) {
    for (NodeId s = 0; s < static_cast<NodeId>(g.size()); ++s) {
      const auto d = build_stages(g, s);
      const auto lam = label_broadcast(g, d);
      const auto ack = label_ack(g, d);
      auto rep = check_trace_B(g, d, lam, run_B(lam, s, kMu, 40).trace);
      EXPECT_TRUE(rep.ok()) << report_failures(rep);
      rep = check_trace_Back(g, d, ack, run_Back(ack, s, kMu, 40).trace);
      EXPECT_TRUE(rep.ok()) << report_failures(rep);
      const auto c = run_common_round(ack, s, kMu, 40);
      rep = check_common_round(g, d, ack, c.trace, &c.result);
      EXPECT_TRUE(rep.ok()) << report_failures(rep);
    }
    const auto arb = label_arb(g);
    for (NodeId s = 0; s < static_cast<NodeId>(g.size()); ++s) {
      const auto r = run_Barb(arb, s, kMu, 40);
      const auto rep = check_trace_Barb(g, arb, s, kMu, r.trace, r.result);
      EXPECT_TRUE(rep.ok()) << report_failures(rep);
    }
  }
}

TEST(CheckTrace, SuppressedTransmitterDetected) {
  const Graph g = fixtures::g6();
  const auto d = build_stages(g, 0);
  const auto lg = label_broadcast(g, d);
  auto trace = run_B(lg, 0, kMu, 40).trace;
  auto& r3 = trace.rounds[2];
  ASSERT_EQ(r3.transmissions.size(), 2u);
  r3.transmissions.erase(r3.transmissions.begin());
  const auto rep = check_trace_B(g, d, lg, trace);
  EXPECT_FALSE(rep.ok());
  EXPECT_TRUE(rep.failed("b.dominators_transmit"));
}

TEST(CheckTrace, AckStampFaultDetected) {
  const Graph g = fixtures::g6();
  const auto d = build_stages(g, 0);
  const auto lg = label_ack(g, d);
  auto trace = run_Back(lg, 0, kMu, 40).trace;
  bool patched = false;
  for (auto& rec : trace.rounds) {
    if (rec.round != 7) continue;
    for (auto& t : rec.transmissions)
      if (t.message.kind == MessageKind::ack) {
        t.message.stamp = 5;
        patched = true;
      }
    for (auto& del : rec.deliveries)
      if (del.message.kind == MessageKind::ack) del.message.stamp = 5;
  }
  ASSERT_TRUE(patched);
  const auto rep = check_trace_Back(g, d, lg, trace);
  EXPECT_TRUE(rep.failed("ack.descent")) << report_failures(rep);
}

TEST(CheckTrace, ChannelViolationsDetected) {
  const Graph g = fixtures::g6();
  const auto d = build_stages(g, 0);
  const auto lg = label_broadcast(g, d);
  const auto clean = run_B(lg, 0, kMu, 40).trace;

  auto t = clean;
  t.rounds[0].deliveries.push_back({5, 0, t.rounds[0].transmissions[0].message});
  EXPECT_TRUE(check_trace_B(g, d, lg, t).failed("trace.delivery_rule"));

  t = clean;
  t.rounds[1].round = 7;
  EXPECT_TRUE(check_trace_B(g, d, lg, t).failed("trace.numbering"));

  t = clean;
  retarget(t, 1, 0, 3);
  EXPECT_FALSE(check_trace_B(g, d, lg, t).ok());

  t = clean;
  t.rounds[0].deliveries[0].message.payload = Bytes("xx");
  t.rounds[0].transmissions[0].message.payload = Bytes("xx");
  EXPECT_TRUE(check_trace_B(g, d, lg, t).failed("b.payload_integrity"));
}

TEST(CheckTrace, WrongDecompositionDetected) {
  const Graph g = fixtures::g6();
  const auto good = build_stages(g, 0);
  auto bad = good;
  bad.stage(3).dominators = NodeSet(6, {1});
  const auto lg = label_broadcast(g, good);
  EXPECT_FALSE(check_trace_B(g, bad, lg, run_B(lg, 0, kMu, 40).trace).ok());
}

TEST(CheckTrace, CommonRoundResultMismatch) {
  const Graph g = fixtures::g6();
  const auto d = build_stages(g, 0);
  const auto lg = label_ack(g, d);
  auto c = run_common_round(lg, 0, kMu, 40);
  c.result.common_known_round = 13;
  EXPECT_TRUE(check_common_round(g, d, lg, c.trace, &c.result).failed("common.reported_round"));
}

TEST(CheckTrace, ArbResultMismatch) {
  const Graph g = fixtures::g6();
  const auto lg = label_arb(g);
  auto r = run_Barb(lg, 3, kMu, 40);
  r.result.timestamp_bound = 4;
  EXPECT_FALSE(check_trace_Barb(g, lg, 3, kMu, r.trace, r.result).ok());
  r = run_Barb(lg, 3, kMu, 40);
  EXPECT_FALSE(check_trace_Barb(g, lg, 3, Bytes("other"), r.trace, r.result).ok());
}

TEST(Exhaustive, GraphCountsMatchRecurrence) {
  const auto want = oracle::connected_graph_counts(6);
  for (int n = 1; n <= 5; ++n)
    EXPECT_EQ(static_cast<std::int64_t>(enumerate_connected_graphs(n).size()), want[static_cast<std::size_t>(n)]) << n;
  EXPECT_EQ(want[6], 26704);
  EXPECT_EQ(oracle::connected_graph_counts(7)[7], 1866256);
}

TEST(Exhaustive, SmallSweepsPass) {
  for (int max_n : {2, 4, 5}) {
    ExhaustiveOptions opt;
    opt.max_n = max_n;
    opt.arb_runs = max_n <= 4;
    const auto s = exhaustive_small_graphs(opt);
    EXPECT_TRUE(s.ok());
    const auto want = oracle::connected_graph_counts(max_n);
    for (int n = 2; n <= max_n; ++n) {
      EXPECT_EQ(s.graphs_per_n[static_cast<std::size_t>(n)], static_cast<std::uint64_t>(want[static_cast<std::size_t>(n)]));
      EXPECT_EQ(s.instances_per_n[static_cast<std::size_t>(n)], static_cast<std::uint64_t>(n * want[static_cast<std::size_t>(n)]));
    }
    EXPECT_LE(s.max_completion_ratio, 1.0);
    for (const auto& [name, t] : s.checks) EXPECT_EQ(t.failed, 0u) << name << ": " << t.first_witness;
  }
}

TEST(Exhaustive, ThreadCountDoesNotChangeResult) {
  ExhaustiveOptions a, b;
  a.max_n = b.max_n = 5;
  a.threads = 1;
  b.threads = 3;
  const auto sa = exhaustive_small_graphs(a), sb = exhaustive_small_graphs(b);
  EXPECT_EQ(sa.graphs_per_n, sb.graphs_per_n);
  EXPECT_EQ(sa.lambda_label_mask, sb.lambda_label_mask);
  ASSERT_EQ(sa.checks.size(), sb.checks.size());
  for (const auto& [name, t] : sa.checks) EXPECT_EQ(t.passed, sb.checks.at(name).passed);
}

TEST(Exhaustive, OptionValidation) {
  ExhaustiveOptions opt;
  opt.max_n = 9;
  EXPECT_THROW(exhaustive_small_graphs(opt), std::invalid_argument);
  opt.max_n = 3;
  opt.min_n = 1;
  EXPECT_THROW(exhaustive_small_graphs(opt), std::invalid_argument);
  EXPECT_EQ(label_set(0b111, 2), "00,01,10");
}
