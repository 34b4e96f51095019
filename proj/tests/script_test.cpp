#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace vh2kg;

TEST(Script, ParsesHeaderAndSteps) {
  const auto s = parse_script("Carry box\nCarry the box.\n[WALK] <box> (194)\n[PUTBACK] <box> (194) <floor> (337)\n");
  EXPECT_EQ(s.name, "Carry box");
  EXPECT_EQ(s.description, "Carry the box.");
  ASSERT_EQ(s.steps.size(), 2u);
  EXPECT_EQ(s.steps[0].verb, "walk");
  EXPECT_EQ(s.steps[0].mainObject, (ObjectRef{"box", 194}));
  EXPECT_FALSE(s.steps[0].targetObject);
  EXPECT_EQ(s.steps[1].verb, "putBack");
  EXPECT_EQ(s.steps[1].targetObject, (ObjectRef{"floor", 337}));
  EXPECT_EQ(s.steps[1].arity(), 2u);
}

TEST(Script, TurnWithDigitZeroIsTurnTo) {
  const auto s = parse_script("a\nb\n[TURNT0] <wallpictureframe> (419)\n");
  EXPECT_EQ(s.steps[0].verb, "turnTo");
  EXPECT_EQ(serialize_step(s.steps[0]), "[TURNTO] <wallpictureframe> (419)");
}

TEST(Script, ZeroArityVerb) {
  const auto s = parse_script("a\nb\n[STANDUP]\n");
  EXPECT_EQ(s.steps[0].verb, "standUp");
  EXPECT_EQ(s.steps[0].arity(), 0u);
}

TEST(Script, BlankLinesAndCrlfIgnored) {
  const auto s = parse_script("a\r\nb\r\n\r\n[WALK] <tv> (1)\r\n\n  \n[WATCH] <tv> (1)");
  EXPECT_EQ(s.steps.size(), 2u);
}

TEST(Script, MissingHeader) {
  try {
    parse_script("only a name\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingHeader);
  }
  EXPECT_THROW(parse_script(""), ParseError);
}

TEST(Script, MalformedStepsReportLine) {
  const std::vector<std::string> bad = {
      "[WALK] <box>",           "[WALK] <box> (x)",     "WALK <box> (1)",     "[WALK <box> (1)",
      "[] <box> (1)",           "[WALK] <box> (1) junk", "[WALK] (1)",        "[WALK]",
      "[GRAB] <a> (1) <b> (2)", "[PUTBACK] <a> (1)",     "[WA-LK] <box> (1)", "[WALK] <box> (-1)",
  };
  for (const auto& line : bad) {
    try {
      parse_script("n\nd\n[WALK] <ok> (1)\n" + line + "\n");
      ADD_FAILURE() << "accepted: " << line;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedStep) << line;
      EXPECT_EQ(e.line(), 4u) << line;
      EXPECT_EQ(e.text(), line);
    }
  }
}

TEST(Script, StrictRejectsUnknownVerb) {
  const std::string text = "n\nd\n[JUMP] <bed> (1)\n";
  const auto lenient = parse_script(text);
  EXPECT_EQ(lenient.steps[0].verb, "jump");
  try {
    parse_script(text, {.strict = true});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownVerb);
    EXPECT_EQ(e.line(), 3u);
  }
  const auto unknown = validate_vocabulary(lenient, default_vocabulary());
  ASSERT_EQ(unknown.size(), 1u);
  EXPECT_EQ(unknown[0].second, "jump");
}

TEST(Script, SerializeRoundTripRandom) {
  std::mt19937 rng(7);
  const auto vocab = default_vocabulary();
  std::vector<std::string> verbList(vocab.begin(), vocab.end());
  for (int trial = 0; trial < 200; ++trial) {
    ActivityScript s{"Activity " + std::to_string(trial), "desc", Category::Other, {}};
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      Step st;
      st.verb = verbList[rng() % verbList.size()];
      const int arity = *verbs::arity(st.verb);
      if (arity >= 1) st.mainObject = ObjectRef{"obj_" + std::to_string(rng() % 5), static_cast<std::int64_t>(rng() % 500)};
      if (arity == 2) st.targetObject = ObjectRef{"tgt", static_cast<std::int64_t>(rng() % 500)};
      s.steps.push_back(st);
    }
    EXPECT_EQ(parse_script(serialize_script(s), {.strict = true}), s);
  }
}

TEST(Script, SnakeCase) {
  EXPECT_EQ(snake_case("Take off clock"), "take_off_clock");
  EXPECT_EQ(snake_case("Browse internet"), "browse_internet");
  EXPECT_EQ(snake_case("  Find some   foods "), "find_some_foods");
}

TEST(Script, Categories) {
  EXPECT_EQ(parse_category("Leisure"), Category::Leisure);
  EXPECT_FALSE(parse_category("leisure"));
  for (auto name : kCategoryNames) EXPECT_EQ(to_string(*parse_category(name)), name);
}

TEST(Script, FixtureScriptsParseStrictly) {
  const auto scripts = test::fixture_scripts();
  ASSERT_EQ(scripts.size(), 20u);
  std::size_t steps = 0;
  for (const auto& s : scripts) steps += s.steps.size();
  EXPECT_EQ(steps, 103u);
  EXPECT_EQ(scripts[3].name, "Carry box");
  EXPECT_EQ(scripts[3].category, Category::HouseArrangement);
}
