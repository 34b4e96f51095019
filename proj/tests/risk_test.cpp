#include <gtest/gtest.h>

#include <regex>

#include "test_support.hpp"

using namespace vh2kg;

namespace {

std::vector<RiskFinding> findings_for(const EnvironmentGraph& env, const std::string& steps) {
  const auto t = run_script(test::script_of("Toy\nd\n" + steps), env);
  return detect_risks(build_activity_kg(t)).findings;
}

}  // namespace

TEST(Risk, HighGrabIsR1LowGrabIsR2) {
  const auto f = findings_for(test::toy_scene(), "[GRAB] <box> (3)\n[GRAB] <cup> (4)\n");
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].rule, RuleId::R1);
  EXPECT_EQ(f[0].eventNumber, 0);
  EXPECT_EQ(f[0].objectLabel, "box");
  EXPECT_DOUBLE_EQ(f[0].evidence.object_top(), 2.2);
  EXPECT_DOUBLE_EQ(f[0].evidence.agent_top(), 1.8);
  EXPECT_EQ(f[1].rule, RuleId::R2);
  EXPECT_EQ(f[1].objectLabel, "cup");
  EXPECT_NEAR(f[1].evidence.object_top(), 0.3, 1e-12);
}

TEST(Risk, BoundariesAreStrict) {
  // box top exactly at agent top (1.8): no R1.
  EXPECT_TRUE(findings_for(test::toy_scene(1.6), "[GRAB] <box> (3)\n").empty());
  // cup top exactly at agent center (0.9): no R2.
  EXPECT_TRUE(findings_for(test::toy_scene(2.0, 0.8), "[GRAB] <cup> (4)\n").empty());
  EXPECT_EQ(findings_for(test::toy_scene(2.0, 0.79), "[GRAB] <cup> (4)\n").size(), 1u);
}

TEST(Risk, ExcludedVerbsNeverFireR1) {
  const auto f = findings_for(test::toy_scene(), "[WALK] <box> (3)\n[LOOKAT] <box> (3)\n[TURNTO] <box> (3)\n");
  EXPECT_TRUE(f.empty());
  EXPECT_FALSE(r1_applies("watch"));
  EXPECT_TRUE(r1_applies("touch"));
}

TEST(Risk, MonotoneInObjectHeight) {
  // Raising the object never removes an R1 finding and never adds an R2 one.
  bool r1Before = false, r2Before = true;
  for (double y = 0.05; y < 2.3; y += 0.05) {
    const auto f = findings_for(test::toy_scene(y), "[WALK] <box> (3)\n[GRAB] <box> (3)\n");
    bool r1 = false, r2 = false;
    for (const auto& x : f) (x.rule == RuleId::R1 ? r1 : r2) = true;
    EXPECT_TRUE(!r1Before || r1) << y;
    EXPECT_TRUE(r2Before || !r2) << y;
    r1Before = r1;
    r2Before = r2;
  }
  EXPECT_TRUE(r1Before);
}

TEST(Risk, UsesGeometryBeforeTheEvent) {
  const auto env = test::toy_scene();
  auto t = run_script(test::script_of("Toy\nd\n[GRAB] <box> (3)\n"), env);
  const auto base = detect_risks(build_activity_kg(t)).findings;
  // Moving the box after the grab must not change the verdict.
  for (double y : {0.0, 0.5, 5.0}) {
    auto moved = t;
    moved.situations.back().graph.find(3)->bbox->center.y = y;
    const auto f = detect_risks(build_activity_kg(moved)).findings;
    ASSERT_EQ(f.size(), base.size());
    EXPECT_EQ(f[0].rule, base[0].rule);
    EXPECT_EQ(f[0].evidence, base[0].evidence);
  }
}

TEST(Risk, TraceAndKgAgreeOnFixtures) {
  for (const auto& a : test::base_corpus().activities) EXPECT_EQ(detect_risks(a.trace, a.meta), a.findings);
}

TEST(Risk, MissingGeometryIsReported) {
  const auto t = run_script(test::script_of("Toy\nd\n[GRAB] <cup> (4)\n"), test::toy_scene());
  auto kg = build_activity_kg(t);
  std::erase_if(kg.triples, [](const rdf::Triple& x) { return x.predicate.value == vocab::kBboxCenter; });
  try {
    detect_risks(kg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingGeometry);
  }
}

TEST(Risk, AugmentedGraphCarriesRiskTriples) {
  const auto t = run_script(test::script_of("Toy\nd\n[GRAB] <cup> (4)\n"), test::toy_scene());
  const auto r = detect_risks(build_activity_kg(t));
  ASSERT_EQ(r.findings.size(), 1u);
  const auto& f = r.findings[0];
  EXPECT_TRUE(r.augmented.contains({rdf::iri(f.activityIri), rdf::iri(vocab::kRiskFactor), rdf::iri(f.eventIri)}));
  EXPECT_TRUE(r.augmented.contains({rdf::iri(f.eventIri), rdf::iri(vocab::kType), rdf::iri(rule(RuleId::R2).riskClass)}));
}

TEST(Risk, ExplanationPathIsInGraphAndRenderedRed) {
  const auto t = run_script(test::script_of("Toy\nd\n[GRAB] <cup> (4)\n"), test::toy_scene());
  const auto kg = build_activity_kg(t);
  const auto f = detect_risks(kg).findings.at(0);
  ASSERT_FALSE(f.explanationPath.empty());
  for (const auto& tr : f.explanationPath) EXPECT_TRUE(kg.contains(tr));
  const auto ex = explain(f, kg);
  EXPECT_TRUE(ex.dot.starts_with("digraph"));
  const std::regex redEdge(R"(n\d+ -> n\d+ \[[^\]]*color=red)");
  const auto redEdges = std::distance(std::sregex_iterator(ex.dot.begin(), ex.dot.end(), redEdge), std::sregex_iterator());
  EXPECT_EQ(static_cast<std::size_t>(redEdges), f.explanationPath.size());
  EXPECT_EQ(ex.text, "grabbed cup whose top (0.30 m) is below the agent's body center (0.90 m)");

  auto broken = f;
  broken.explanationPath.clear();
  EXPECT_THROW(explain(broken, kg), Error);
  broken = f;
  broken.explanationPath.push_back({rdf::iri("http://x/a"), rdf::iri("http://x/b"), rdf::iri("http://x/c")});
  EXPECT_THROW(explain(broken, kg), Error);
}

TEST(Risk, R1ExplanationText) {
  const auto t = run_script(test::script_of("Toy\nd\n[GRAB] <box> (3)\n"), test::toy_scene());
  const auto kg = build_activity_kg(t);
  EXPECT_EQ(explain(detect_risks(kg).findings.at(0), kg).text,
            "grab box whose top (2.20 m) is above the agent's top (1.80 m)");
}

TEST(Risk, FindingsJsonRoundTrip) {
  const auto& f = test::base_corpus().findings;
  ASSERT_FALSE(f.empty());
  EXPECT_EQ(findings_from_json(nlohmann::json::parse(findings_to_json(f).dump())), f);
}

TEST(Risk, Taxonomy) {
  const auto& tax = risk_taxonomy();
  ASSERT_EQ(tax.size(), 16u);
  std::map<RiskCategory, int> perCat;
  int implemented = 0;
  for (const auto& e : tax) {
    ++perCat[e.category];
    implemented += e.implemented();
  }
  EXPECT_EQ(perCat[RiskCategory::DangerousAction], 6);
  EXPECT_EQ(perCat[RiskCategory::DangerousInteraction], 5);
  EXPECT_EQ(perCat[RiskCategory::DangerousSpatialRelationship], 5);
  EXPECT_EQ(implemented, 2);
  EXPECT_EQ(tax[6].text, rule(RuleId::R1).description);
  EXPECT_EQ(tax[7].text, rule(RuleId::R2).description);
}

TEST(Risk, RuleQueries) {
  for (auto id : {RuleId::R1, RuleId::R2}) {
    const auto q = rule_query(id);
    EXPECT_NE(q.find("PREFIX"), std::string::npos);
    EXPECT_NE(q.find("bboxCenter"), std::string::npos);
    EXPECT_EQ(q.find("bbboxCenter"), std::string::npos);
  }
  EXPECT_NE(rule_query(RuleId::R2).find("grab"), std::string::npos);
}
