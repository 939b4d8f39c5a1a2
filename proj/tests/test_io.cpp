#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "radiocast/io.hpp"

using namespace radiocast;

TEST(Hex, RoundTrip) {
  const Bytes raw("\x00\x01\xfe\xff mu", 7);
  EXPECT_EQ(to_hex(raw), "0001feff206d75");
  EXPECT_EQ(from_hex(to_hex(raw)), raw);
  EXPECT_EQ(from_hex("ABcd"), Bytes("\xab\xcd"));
  EXPECT_EQ(from_hex(""), Bytes());
  EXPECT_THROW(from_hex("abc"), FormatError);
  EXPECT_THROW(from_hex("zz"), FormatError);
}

TEST(LabelsJson, RoundTrip) {
  const Graph g = fixtures::g6();
  for (const auto& lg : {label_broadcast(g, 0), label_ack(g, 3), label_arb(g)}) {
    const Json j = labels_to_json(lg);
    const auto back = labels_from_json(Json::parse(j.dump()), g);
    EXPECT_EQ(back.labels, lg.labels);
    EXPECT_EQ(back.scheme, lg.scheme);
    EXPECT_EQ(back.source_used, lg.source_used);
  }
  EXPECT_EQ(labels_to_json(label_broadcast(g, 0)).dump(),
            R"({"scheme":"lambda","source":0,"labels":["10","10","10","00","01","00"]})");
}

TEST(LabelsJson, Rejects) {
  const Graph g = fixtures::p3();
  EXPECT_THROW(labels_from_json(Json::parse(R"({"scheme":"lambda","source":0,"labels":["10","10"]})"), g), FormatError);
  EXPECT_THROW(labels_from_json(Json::parse(R"({"scheme":"lambda","source":0,"labels":["10","10","001"]})"), g), FormatError);
  EXPECT_THROW(labels_from_json(Json::parse(R"({"scheme":"lambda9","source":0,"labels":["10","10","00"]})"), g), FormatError);
  EXPECT_THROW(labels_from_json(Json::parse(R"({"scheme":"lambda","labels":["1x","10","00"]})"), g), FormatError);
  EXPECT_THROW(labels_from_json(Json::parse(R"({"source":0})"), g), FormatError);
}

TEST(DecompositionJson, RoundTrip) {
  const Graph g = fixtures::g6();
  const auto d = build_stages(g, 2);
  EXPECT_EQ(decomposition_from_json(Json::parse(decomposition_to_json(d).dump()), g.size()), d);
  EXPECT_THROW(decomposition_from_json(Json::parse(R"({"source":0})"), 6), FormatError);
}

TEST(TraceJson, RoundTripEveryProtocol) {
  const Graph g = fixtures::g6();
  const Bytes payload("\x00hi\xff", 4);
  const std::vector<std::pair<std::string, ProtocolRun>> runs{
      {"b", run_B(label_broadcast(g, 1), 1, payload, 40)},
      {"ack", run_Back(label_ack(g, 1), 1, payload, 40)},
      {"common-round", run_common_round(label_ack(g, 1), 1, payload, 40)},
      {"arb", run_Barb(label_arb(g), 4, payload, 40)},
  };
  for (const auto& [name, run] : runs) {
    TraceDocument doc{name, name == "arb" ? 4 : 1, payload, run.trace, run.result};
    const std::string text = trace_to_json(doc).dump(2);
    const auto back = trace_from_json(Json::parse(text));
    EXPECT_EQ(back.protocol, name);
    EXPECT_EQ(back.payload, payload);
    EXPECT_EQ(back.trace, run.trace) << name;
    ASSERT_TRUE(back.result.has_value());
    EXPECT_EQ(*back.result, run.result) << name;
    EXPECT_EQ(trace_to_json(back).dump(2), text);
  }
}

TEST(TraceJson, PartialTraceWithoutResult) {
  SimulationTrace partial;
  try {
    run_B(label_broadcast(fixtures::g6(), 0), 0, "mu", 2);
  } catch (const SimulationTimeout& e) {
    partial = e.partial_trace();
  }
  ASSERT_EQ(partial.rounds.size(), 2u);
  const auto back = trace_from_json(trace_to_json({"b", 0, "mu", partial, std::nullopt}));
  EXPECT_FALSE(back.result.has_value());
  EXPECT_EQ(back.trace, partial);
  EXPECT_THROW(trace_from_json(Json::parse(R"({"protocol":"b"})")), FormatError);
}

TEST(TraceJson, MessageFields) {
  const auto run = run_common_round(label_ack(fixtures::k2(), 0), 0, "mu", 40);
  const Json j = round_to_json(run.trace.rounds.back());
  ASSERT_FALSE(j.at("tx").empty());
  const Json& tx = j.at("tx").at(0);
  EXPECT_EQ(tx.at("kind"), "source_payload");
  EXPECT_EQ(tx.at("value"), 2);
  EXPECT_TRUE(tx.at("aux").is_null());
}

TEST(ReportJson, Shape) {
  CheckReport rep;
  rep.add("a", true);
  rep.add("b", false, "why");
  const Json j = report_to_json(rep);
  EXPECT_EQ(j.at("pass"), false);
  EXPECT_EQ(j.at("failed"), 1);
  EXPECT_EQ(j.at("checks").at(1).at("witness"), "why");
  EXPECT_FALSE(j.at("checks").at(0).contains("witness"));
}
