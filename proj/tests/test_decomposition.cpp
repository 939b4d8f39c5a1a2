#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "radiocast/decomposition.hpp"

using namespace radiocast;

namespace {

oracle::Bits to_bits(const NodeSet& s) {
  oracle::Bits b(s.universe(), false);
  s.for_each([&](NodeId v) { b[static_cast<std::size_t>(v)] = true; });
  return b;
}

void expect_matches_oracle(const Graph& g, NodeId source) {
  const auto d = build_stages(g, source);
  const auto ref = oracle::stages(g, source);
  ASSERT_EQ(d.stages.size(), ref.size()) << "source " << source;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const auto& s = d.stages[i];
    EXPECT_EQ(to_bits(s.informed), ref[i].I) << "stage " << i + 1;
    EXPECT_EQ(to_bits(s.uninformed), ref[i].U) << "stage " << i + 1;
    EXPECT_EQ(to_bits(s.frontier), ref[i].F) << "stage " << i + 1;
    EXPECT_EQ(to_bits(s.dominators), ref[i].D) << "stage " << i + 1;
    EXPECT_EQ(to_bits(s.newly_informed), ref[i].N) << "stage " << i + 1;
  }
}

}  // namespace

TEST(MinimalDominatingSubset, Examples) {
  const Graph c4 = fixtures::c4();
  // {0,1,2} dominating {3}: 0 has no edge to 3, 1 is dropped because 2 covers 3
  EXPECT_EQ(minimal_dominating_subset(c4, NodeSet(4, {0, 1, 2}), NodeSet(4, {3})), NodeSet(4, {2}));
  EXPECT_EQ(minimal_dominating_subset(c4, NodeSet(4, {0, 1}), NodeSet(4)), NodeSet(4));
  EXPECT_EQ(minimal_dominating_subset(fixtures::g6(), NodeSet(6, {0, 1, 2}), NodeSet(6, {3, 4, 5})), NodeSet(6, {1, 2}));
  EXPECT_THROW(minimal_dominating_subset(c4, NodeSet(4, {0}), NodeSet(4, {3})), InvariantBreach);
}

TEST(MinimalDominatingSubset, AgreesWithLexicographicOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Graph g = generate(Family::random, {9, 0.35, 0, 0}, seed);
    std::mt19937 rng(static_cast<unsigned>(seed));
    NodeSet cand(9), targets(9);
    for (NodeId v = 0; v < 9; ++v) {
      if (rng() % 2) cand.insert(v);
      if (rng() % 3 == 0) targets.insert(v);
    }
    if (!is_dominating(g, cand, targets)) continue;
    const auto got = minimal_dominating_subset(g, cand, targets);
    EXPECT_EQ(to_bits(got), oracle::lexmin_dominating_subset(g, to_bits(cand), to_bits(targets))) << "seed " << seed;
    EXPECT_TRUE(oracle::is_inclusion_minimal(g, to_bits(got), to_bits(targets)));
  }
}

TEST(BuildStages, PathOfThree) {
  const auto d = build_stages(fixtures::p3(), 0);
  ASSERT_EQ(d.last_stage, 3);
  EXPECT_EQ(d.stage(1).dominators, NodeSet(3, {0}));
  EXPECT_EQ(d.stage(1).newly_informed, NodeSet(3, {1}));
  EXPECT_EQ(d.stage(2).frontier, NodeSet(3, {2}));
  EXPECT_EQ(d.stage(2).dominators, NodeSet(3, {1}));
  EXPECT_EQ(d.stage(2).newly_informed, NodeSet(3, {2}));
  EXPECT_EQ(d.stage(3).informed, NodeSet::full(3));
  EXPECT_TRUE(d.stage(3).uninformed.empty());
  EXPECT_TRUE(d.stage(3).frontier.empty());
  EXPECT_TRUE(d.stage(3).dominators.empty());
  EXPECT_TRUE(d.stage(3).newly_informed.empty());
}

TEST(BuildStages, SixNodeFixture) {
  const auto d = build_stages(fixtures::g6(), 0);
  ASSERT_EQ(d.last_stage, 4);
  EXPECT_EQ(d.stage(1).newly_informed, NodeSet(6, {1, 2}));
  EXPECT_EQ(d.stage(2).frontier, NodeSet(6, {3, 4, 5}));
  EXPECT_EQ(d.stage(2).dominators, NodeSet(6, {1, 2}));
  EXPECT_EQ(d.stage(2).newly_informed, NodeSet(6, {3, 4}));
  EXPECT_EQ(d.stage(3).frontier, NodeSet(6, {5}));
  EXPECT_EQ(d.stage(3).dominators, NodeSet(6, {2}));
  EXPECT_EQ(d.stage(3).newly_informed, NodeSet(6, {5}));
  EXPECT_EQ(d.stage(4).informed, NodeSet::full(6));
}

TEST(BuildStages, TwoNodesAndSingleton) {
  const auto k2 = build_stages(fixtures::k2(), 1);
  EXPECT_EQ(k2.last_stage, 2);
  EXPECT_EQ(k2.stage(1).newly_informed, NodeSet(2, {0}));
  const auto one = build_stages(parse_edge_list("1\n"), 0);
  EXPECT_EQ(one.last_stage, 1);
  EXPECT_EQ(one.stage(1).dominators, NodeSet(1, {0}));
  EXPECT_TRUE(one.stage(1).frontier.empty());
}

TEST(BuildStages, RejectsBadSource) {
  EXPECT_THROW(build_stages(fixtures::p3(), 3), GraphError);
  EXPECT_THROW(build_stages(fixtures::p3(), -1), GraphError);
}

TEST(BuildStages, MatchesOracleOnSmallGraphs) {
  for (const Graph& g : {fixtures::k2(), fixtures::p3(), fixtures::c4(), fixtures::g6()})
    for (NodeId s = 0; s < static_cast<NodeId>(g.size()); ++s) expect_matches_oracle(g, s);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Graph g = generate(Family::random, {10, 0.25, 0, 0}, seed);
    expect_matches_oracle(g, static_cast<NodeId>(seed % 10));
  }
}

TEST(BuildStages, Deterministic) {
  const Graph g = generate(Family::random, {30, 0.1, 0, 0}, 3);
  EXPECT_EQ(build_stages(g, 4), build_stages(g, 4));
}
