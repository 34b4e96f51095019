#pragma once

// Activity programs: a name line, a description line, then one step per line
// of the form `[VERB] <object> (id) [<object> (id)]`.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vh2kg/error.hpp"

namespace vh2kg {

enum class Category {
  BedTimeSleep,
  EatingDrinking,
  FoodPreparation,
  GettingReady,
  HouseArrangement,
  HouseCleaning,
  HygieneStyling,
  Leisure,
  PhysicalActivity,
  SocialInteraction,
  Work,
  Other,
};

inline constexpr std::array<std::string_view, 12> kCategoryNames = {
    "BedTimeSleep",     "EatingDrinking", "FoodPreparation",  "GettingReady",
    "HouseArrangement", "HouseCleaning",  "HygieneStyling",   "Leisure",
    "PhysicalActivity", "SocialInteraction", "Work",          "Other",
};

constexpr std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

inline std::optional<Category> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

struct ObjectRef {
  std::string name;
  std::int64_t id = 0;

  friend bool operator==(const ObjectRef&, const ObjectRef&) = default;
};

struct Step {
  std::string verb;  // canonical lowerCamel token
  std::optional<ObjectRef> mainObject;
  std::optional<ObjectRef> targetObject;

  std::size_t arity() const { return targetObject ? 2 : (mainObject ? 1 : 0); }
  friend bool operator==(const Step&, const Step&) = default;
};

struct ActivityScript {
  std::string name;
  std::string description;
  Category category = Category::Other;
  std::vector<Step> steps;

  friend bool operator==(const ActivityScript&, const ActivityScript&) = default;
};

namespace verbs {

struct VerbInfo {
  std::string_view canonical;
  std::string_view scriptForm;
  int arity;
};

// Script-form spellings; TURNT0 (digit zero) appears in real data and maps to turnTo.
inline constexpr std::array<VerbInfo, 18> kTable = {{
    {"walk", "WALK", 1},         {"find", "FIND", 1},           {"sit", "SIT", 1},
    {"standUp", "STANDUP", 0},   {"grab", "GRAB", 1},           {"switchOn", "SWITCHON", 1},
    {"switchOff", "SWITCHOFF", 1}, {"open", "OPEN", 1},         {"close", "CLOSE", 1},
    {"putBack", "PUTBACK", 2},   {"drink", "DRINK", 1},         {"touch", "TOUCH", 1},
    {"lookAt", "LOOKAT", 1},     {"turnTo", "TURNTO", 1},       {"watch", "WATCH", 1},
    {"pour", "POUR", 2},         {"read", "READ", 1},           {"lie", "LIE", 1},
}};

inline const VerbInfo* find_canonical(std::string_view canonical) {
  for (const auto& v : kTable) {
    if (v.canonical == canonical) return &v;
  }
  return nullptr;
}

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Maps a bracketed script token (any case) to its canonical lowerCamel form.
/// Tokens outside the table are lower-cased and returned with known=false.
inline std::pair<std::string, bool> normalize(std::string_view token) {
  std::string up = upper(token);
  if (up == "TURNT0") up = "TURNTO";
  for (const auto& v : kTable) {
    if (v.scriptForm == up) return {std::string(v.canonical), true};
  }
  return {lower(token), false};
}

inline std::string script_form(std::string_view canonical) {
  if (const auto* v = find_canonical(canonical)) return std::string(v->scriptForm);
  return upper(canonical);
}

inline std::optional<int> arity(std::string_view canonical) {
  if (const auto* v = find_canonical(canonical)) return v->arity;
  return std::nullopt;
}

}  // namespace verbs

using Vocabulary = std::set<std::string, std::less<>>;

inline Vocabulary default_vocabulary() {
  Vocabulary vocab;
  for (const auto& v : verbs::kTable) vocab.emplace(v.canonical);
  return vocab;
}

/// "Take off clock" -> "take_off_clock".
inline std::string snake_case(std::string_view name) {
  std::string out;
  bool pendingSep = false;
  for (char ch : name) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (pendingSep && !out.empty()) out.push_back('_');
      pendingSep = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pendingSep = true;
    }
  }
  return out;
}

struct ParseOptions {
  bool strict = false;
  Vocabulary vocabulary = default_vocabulary();
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline void skip_ws(std::string_view& s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
}

inline Step parse_step_line(std::string_view raw, std::size_t lineNo, const ParseOptions& opts) {
  const std::string original(raw);
  auto fail = [&]() -> Step { throw ParseError(ErrorCode::MalformedStep, lineNo, original); };

  std::string_view s = trim(raw);
  if (s.empty() || s.front() != '[') return fail();
  const auto close = s.find(']');
  if (close == std::string_view::npos || close == 1) return fail();
  const std::string_view token = s.substr(1, close - 1);
  for (char c : token) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return fail();
  }
  s.remove_prefix(close + 1);

  auto [canonical, known] = verbs::normalize(token);
  if (!opts.vocabulary.contains(canonical)) known = false;
  if (!known && opts.strict) throw ParseError(ErrorCode::UnknownVerb, lineNo, original);

  Step step;
  step.verb = std::move(canonical);
  std::vector<ObjectRef> refs;
  while (true) {
    skip_ws(s);
    if (s.empty()) break;
    if (refs.size() == 2 || s.front() != '<') return fail();
    const auto gt = s.find('>');
    if (gt == std::string_view::npos || gt == 1) return fail();
    ObjectRef ref;
    ref.name = std::string(s.substr(1, gt - 1));
    if (ref.name.find('<') != std::string::npos) return fail();
    s.remove_prefix(gt + 1);
    skip_ws(s);
    if (s.empty() || s.front() != '(') return fail();
    const auto rp = s.find(')');
    if (rp == std::string_view::npos) return fail();
    const std::string_view digits = s.substr(1, rp - 1);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return fail();
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), ref.id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return fail();
    s.remove_prefix(rp + 1);
    refs.push_back(std::move(ref));
  }
  if (!refs.empty()) step.mainObject = refs[0];
  if (refs.size() > 1) step.targetObject = refs[1];

  if (auto expected = verbs::arity(step.verb); expected && static_cast<std::size_t>(*expected) != refs.size())
    return fail();
  return step;
}

}  // namespace detail

/// Parses a script. Blank lines after the two header lines are ignored.
/// Throws ParseError (MissingHeader, MalformedStep, or UnknownVerb in strict mode).
inline ActivityScript parse_script(std::string_view text, const ParseOptions& opts = {}) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == text.size()) break;
    start = nl + 1;
  }
  // A trailing newline yields one empty final element; drop it.
  if (!lines.empty() && lines.back().empty() && !text.empty() && text.back() == '\n') lines.pop_back();

  if (lines.size() < 2) throw ParseError(ErrorCode::MissingHeader, lines.size() + 1, "expected name and description lines");
  ActivityScript script;
  script.name = std::string(detail::trim(lines[0]));
  if (script.name.empty()) throw ParseError(ErrorCode::MissingHeader, 1, "empty activity name");
  script.description = std::string(detail::trim(lines[1]));

  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    script.steps.push_back(detail::parse_step_line(lines[i], i + 1, opts));
  }
  return script;
}

inline std::string serialize_step(const Step& step) {
  std::string out = "[" + verbs::script_form(step.verb) + "]";
  for (const auto* ref : {&step.mainObject, &step.targetObject}) {
    if (*ref) out += " <" + (*ref)->name + "> (" + std::to_string((*ref)->id) + ")";
  }
  return out;
}

inline std::string serialize_script(const ActivityScript& script) {
  std::string out = script.name + "\n" + script.description + "\n";
  for (const auto& step : script.steps) out += serialize_step(step) + "\n";
  return out;
}

/// (step index, token) for every verb outside `vocab`.
inline std::vector<std::pair<std::size_t, std::string>> validate_vocabulary(const ActivityScript& script,
                                                                           const Vocabulary& vocab) {
  std::vector<std::pair<std::size_t, std::string>> unknown;
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    if (!vocab.contains(script.steps[i].verb)) unknown.emplace_back(i, script.steps[i].verb);
  }
  return unknown;
}

}  // namespace vh2kg
