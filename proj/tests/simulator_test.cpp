#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace vh2kg;

namespace {

FailureReason failure_of(const std::string& text, const EnvironmentGraph& env) {
  const auto report = check_executable(test::script_of(text), env);
  EXPECT_FALSE(report.executable);
  return report.reason.value_or(FailureReason::UnknownVerb);
}

}  // namespace

TEST(Simulator, GrabWhenClose) {
  const auto env = test::toy_scene();
  const auto t = run_script(test::script_of("g\nd\n[GRAB] <cup> (4)\n"), env);
  ASSERT_EQ(t.situations.size(), 2u);
  EXPECT_EQ(t.situations[1].rightHand, 4);
  EXPECT_TRUE(t.situations[1].graph.has_edge(2, Relation::HoldsRh, 4));
  EXPECT_FALSE(t.situations[0].rightHand);
  EXPECT_EQ(t.transitions[0].durationSeconds, 2.0);
}

TEST(Simulator, NotCloseDiagnostic) {
  const auto env = test::toy_scene();
  const auto report = check_executable(test::script_of("o\nd\n[GRAB] <cup> (4)\n[OPEN] <fridge> (5)\n"), env);
  EXPECT_FALSE(report.executable);
  EXPECT_EQ(report.failingStepIndex, 1u);
  EXPECT_EQ(report.reason, FailureReason::NotClose);
  EXPECT_NE(report.detail.find("fridge (5)"), std::string::npos);
  EXPECT_THROW(run_script(test::script_of("o\nd\n[OPEN] <fridge> (5)\n"), env), UnexecutableError);
}

TEST(Simulator, RepairInsertsWalk) {
  const auto env = test::toy_scene();
  const auto t = run_script(test::script_of("o\nd\n[OPEN] <fridge> (5)\n"), env, {}, RunMode::Repair);
  ASSERT_EQ(t.transitions.size(), 2u);
  EXPECT_TRUE(t.transitions[0].inserted);
  EXPECT_EQ(t.transitions[0].step.verb, "walk");
  EXPECT_FALSE(t.transitions[0].sourceStepIndex);
  EXPECT_EQ(t.transitions[1].sourceStepIndex, 0u);
  EXPECT_TRUE(t.situations.back().graph.find(5)->states.contains("OPEN"));
}

TEST(Simulator, RepairDoesNotFixOtherFailures) {
  const auto env = test::toy_scene();
  EXPECT_THROW(run_script(test::script_of("o\nd\n[GRAB] <fridge> (5)\n"), env, {}, RunMode::Repair), UnexecutableError);
}

TEST(Simulator, WalkMovesAgentAndTakesDistanceOverSpeed) {
  const auto env = test::toy_scene();
  SimConfig cfg;
  cfg.durations.walkSpeed = 2.0;
  const auto t = run_script(test::script_of("w\nd\n[WALK] <fridge> (5)\n[OPEN] <fridge> (5)\n"), env, cfg);
  EXPECT_NEAR(t.transitions[0].durationSeconds, std::hypot(4.0, 4.0) / 2.0, 1e-12);
  const auto agent = t.situations[1].graph.agent().bbox->center;
  EXPECT_NEAR(horizontal_distance(agent, {4, 1, 4}), cfg.interactionOffset, 1e-12);
  EXPECT_DOUBLE_EQ(agent.y, 0.9);
  EXPECT_NEAR(t.total_seconds(), t.situations.back().clockSeconds, 1e-12);
}

TEST(Simulator, StatePreconditions) {
  const auto env = test::toy_scene();
  EXPECT_EQ(failure_of("x\nd\n[WALK] <fridge> (5)\n[CLOSE] <fridge> (5)\n", env), FailureReason::WrongState);
  EXPECT_EQ(failure_of("x\nd\n[WALK] <fridge> (5)\n[OPEN] <fridge> (5)\n[OPEN] <fridge> (5)\n", env),
            FailureReason::WrongState);
  EXPECT_EQ(failure_of("x\nd\n[STANDUP]\n", env), FailureReason::WrongState);
  EXPECT_EQ(failure_of("x\nd\n[GRAB] <cup> (4)\n[GRAB] <cup> (4)\n", env), FailureReason::WrongState);
  EXPECT_EQ(failure_of("x\nd\n[DRINK] <cup> (4)\n", env), FailureReason::NotHolding);
  EXPECT_EQ(failure_of("x\nd\n[GRAB] <ghost> (99)\n", env), FailureReason::ObjectAbsent);
  EXPECT_EQ(failure_of("x\nd\n[WALK] <fridge> (5)\n[SIT] <fridge> (5)\n", env), FailureReason::NoAffordance);
  EXPECT_EQ(failure_of("x\nd\n[JUMP] <cup> (4)\n", env), FailureReason::UnknownVerb);
}

TEST(Simulator, HandsFull) {
  auto env = test::toy_scene();
  env.nodes.push_back(ObjectNode{6, "plate", "", false, false, {}, {"GRABBABLE"}, BoundingBox{{0.2, 0.5, 0.2}, {0.2, 0.02, 0.2}}, 0.02, {"grab"}});
  env.edges.push_back({6, 1, Relation::Inside});
  EXPECT_EQ(failure_of("x\nd\n[GRAB] <cup> (4)\n[GRAB] <box> (3)\n[GRAB] <plate> (6)\n", env), FailureReason::HandsFull);
}

TEST(Simulator, PutBackPlacesOnSurface) {
  const auto env = test::toy_scene();
  const auto t = run_script(test::script_of("p\nd\n[GRAB] <cup> (4)\n[PUTBACK] <cup> (4) <box> (3)\n"), env);
  const auto& g = t.situations.back().graph;
  EXPECT_TRUE(g.has_edge(4, Relation::On, 3));
  EXPECT_FALSE(t.situations.back().rightHand);
  EXPECT_NEAR(g.find(4)->bbox->center.y, 2.0 + 0.2 + 0.1, 1e-12);
  EXPECT_TRUE(t.transitions[1].changedObjectIds.contains(4));
}

TEST(Simulator, PostureTokens) {
  auto env = test::toy_scene();
  env.find(3)->affordances.insert("sit");
  const auto t = run_script(test::script_of("s\nd\n[SIT] <box> (3)\n[STANDUP]\n"), env);
  EXPECT_TRUE(t.situations[1].graph.agent().states.contains("SITTING"));
  EXPECT_FALSE(t.situations[1].graph.agent().states.contains("STANDING"));
  EXPECT_TRUE(t.situations[2].graph.agent().states.contains("STANDING"));
}

TEST(Simulator, FindNeedsSameRoom) {
  const auto env = test::toy_scene();
  const auto t = run_script(test::script_of("f\nd\n[FIND] <fridge> (5)\n"), env);
  EXPECT_TRUE(t.situations[1].graph.has_edge(2, Relation::Facing, 5));
}

TEST(Simulator, TraceJsonRoundTrip) {
  const auto& run = test::base_corpus();
  for (const auto& a : run.activities) EXPECT_EQ(trace_from_json(trace_to_json(a.trace)), a.trace);
}

TEST(Simulator, Deterministic) {
  const auto env = test::scene();
  for (const auto& s : test::fixture_scripts()) EXPECT_EQ(run_script(s, env), run_script(s, env));
}

TEST(Simulator, InvalidDurationModel) {
  SimConfig cfg;
  cfg.durations.walkSpeed = 0;
  EXPECT_THROW(run_script(test::script_of("g\nd\n[GRAB] <cup> (4)\n"), test::toy_scene(), cfg), Error);
}
