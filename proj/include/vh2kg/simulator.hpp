#pragma once

// Symbolic executor for activity scripts. Each verb has a precondition check
// and a deterministic effect on a copy of the environment graph; every step
// records the situation before and after it plus a synthetic duration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vh2kg/error.hpp"
#include "vh2kg/home.hpp"
#include "vh2kg/script.hpp"

namespace vh2kg {

struct DurationModel {
  std::map<std::string, double, std::less<>> perVerbSeconds;  // overrides
  double walkSpeed = 1.0;                                      // m/s
  double defaultSeconds = 2.0;
  double minWalkSeconds = 0.1;

  /// Walk time is the horizontal distance to the target's center over walkSpeed.
  double seconds(std::string_view verb, double walkDistance) const {
    if (auto it = perVerbSeconds.find(verb); it != perVerbSeconds.end()) return it->second;
    if (verb == "walk") return std::max(walkDistance / walkSpeed, minWalkSeconds);
    return defaultSeconds;
  }

  void validate() const {
    if (!(walkSpeed > 0) || !(defaultSeconds > 0) || !(minWalkSeconds > 0))
      throw Error(ErrorCode::MalformedDocument, "duration model values must be positive");
    for (const auto& [verb, s] : perVerbSeconds) {
      if (!(s > 0)) throw Error(ErrorCode::MalformedDocument, "duration for " + verb + " must be positive");
    }
  }
};

struct SimConfig {
  double closeThreshold = 1.5;     // m, inclusive
  double interactionOffset = 0.5;  // m, horizontal stand-off after walking
  double holdOffset = 0.3;         // m, horizontal offset of held objects
  DurationModel durations;
};

enum class FailureReason { NotClose, NoAffordance, WrongState, ObjectAbsent, HandsFull, NotHolding, UnknownVerb };

inline std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::NotClose: return "NotClose";
    case FailureReason::NoAffordance: return "NoAffordance";
    case FailureReason::WrongState: return "WrongState";
    case FailureReason::ObjectAbsent: return "ObjectAbsent";
    case FailureReason::HandsFull: return "HandsFull";
    case FailureReason::NotHolding: return "NotHolding";
    case FailureReason::UnknownVerb: return "UnknownVerb";
  }
  return "?";
}

/// Thrown by execute_step when a precondition does not hold.
class StepFailure : public Error {
 public:
  StepFailure(FailureReason reason, std::optional<std::int64_t> objectId, const std::string& detail)
      : Error(ErrorCode::Unexecutable, std::string(to_string(reason)) + ": " + detail),
        reason_(reason),
        objectId_(objectId),
        detail_(detail) {}

  FailureReason reason() const noexcept { return reason_; }
  /// The object whose condition failed, when there is one.
  std::optional<std::int64_t> objectId() const noexcept { return objectId_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  FailureReason reason_;
  std::optional<std::int64_t> objectId_;
  std::string detail_;
};

struct ExecutabilityReport {
  bool executable = true;
  std::optional<std::size_t> failingStepIndex;
  std::optional<FailureReason> reason;
  std::string detail;
};

class UnexecutableError : public Error {
 public:
  explicit UnexecutableError(ExecutabilityReport report)
      : Error(ErrorCode::Unexecutable, "step " + std::to_string(report.failingStepIndex.value_or(0)) + " " +
                                           std::string(to_string(report.reason.value_or(FailureReason::NotClose))) +
                                           ": " + report.detail),
        report_(std::move(report)) {}

  const ExecutabilityReport& report() const noexcept { return report_; }

 private:
  ExecutabilityReport report_;
};

enum class Hand { Right, Left };

struct SimulationState {
  EnvironmentGraph graph;
  std::string agentPosture = "STANDING";
  std::optional<std::int64_t> rightHand;
  std::optional<std::int64_t> leftHand;
  double clockSeconds = 0.0;
  std::int64_t currentRoomId = 0;

  bool holds(std::int64_t id) const { return rightHand == id || leftHand == id; }
  friend bool operator==(const SimulationState&, const SimulationState&) = default;
};

struct TransitionRecord {
  std::size_t stepIndex = 0;                     // position in the executed sequence
  std::optional<std::size_t> sourceStepIndex;    // position in the script; empty for inserted steps
  Step step;
  bool inserted = false;
  double durationSeconds = 0.0;
  std::set<std::int64_t> changedObjectIds;
  std::int64_t startRoomId = 0;
  std::int64_t endRoomId = 0;

  friend bool operator==(const TransitionRecord&, const TransitionRecord&) = default;
};

struct Trace {
  ActivityScript script;
  std::vector<SimulationState> situations;
  std::vector<TransitionRecord> transitions;

  double total_seconds() const {
    double total = 0.0;
    for (const auto& t : transitions) total += t.durationSeconds;
    return total;
  }
  friend bool operator==(const Trace&, const Trace&) = default;
};

enum class RunMode { Strict, Repair };

inline constexpr std::array<std::string_view, 3> kPostures = {"STANDING", "SITTING", "LYING"};

namespace detail {

inline bool is_posture(std::string_view token) {
  return std::find(kPostures.begin(), kPostures.end(), token) != kPostures.end();
}

inline void set_posture(SimulationState& s, std::string posture) {
  auto& agent = s.graph.agent();
  for (auto p : kPostures) agent.states.erase(std::string(p));
  agent.states.insert(posture);
  s.agentPosture = std::move(posture);
}

inline Vec3 agent_center(const SimulationState& s) { return s.graph.agent().bbox->center; }

inline void place_held(SimulationState& s, const SimConfig& cfg) {
  const Vec3 c = agent_center(s);
  if (s.rightHand) {
    if (auto* o = s.graph.find(*s.rightHand); o && o->bbox) o->bbox->center = {c.x + cfg.holdOffset, c.y, c.z};
  }
  if (s.leftHand) {
    if (auto* o = s.graph.find(*s.leftHand); o && o->bbox) o->bbox->center = {c.x - cfg.holdOffset, c.y, c.z};
  }
}

inline void erase_edges(EnvironmentGraph& g, auto pred) {
  g.edges.erase(std::remove_if(g.edges.begin(), g.edges.end(), pred), g.edges.end());
}

inline bool node_changed(const ObjectNode& a, const ObjectNode& b) {
  return a.states != b.states || a.bbox != b.bbox || a.affordances != b.affordances;
}

}  // namespace detail

/// Ids of nodes whose states, bounding box or affordances differ between two graphs.
inline std::set<std::int64_t> structural_diff(const EnvironmentGraph& before, const EnvironmentGraph& after) {
  std::set<std::int64_t> changed;
  for (const auto& n : after.nodes) {
    const auto* prev = before.find(n.id);
    if (!prev || detail::node_changed(*prev, n)) changed.insert(n.id);
  }
  return changed;
}

/// Rebuilds CLOSE edges from center distances and INSIDE-room edges from room
/// footprints; held objects are re-anchored to the agent first. FACING, ON and
/// HOLDS edges are left as they are.
inline SimulationState recompute_relations(SimulationState state, const SimConfig& cfg = {}) {
  auto& g = state.graph;
  detail::place_held(state, cfg);
  const std::int64_t agentId = g.agent().id;

  detail::erase_edges(g, [](const RelationEdge& e) { return e.relation == Relation::Close; });

  std::vector<const ObjectNode*> things;
  std::vector<const ObjectNode*> rooms;
  for (const auto& n : g.nodes) {
    if (n.isRoom) {
      rooms.push_back(&n);
    } else if (n.bbox) {
      things.push_back(&n);
    }
  }
  std::vector<RelationEdge> added;
  for (std::size_t i = 0; i < things.size(); ++i) {
    for (std::size_t j = i + 1; j < things.size(); ++j) {
      const auto* a = things[i];
      const auto* b = things[j];
      const bool heldPair = (a->id == agentId && state.holds(b->id)) || (b->id == agentId && state.holds(a->id));
      if (heldPair || distance(a->bbox->center, b->bbox->center) <= cfg.closeThreshold) {
        if (b->id == agentId || (a->id != agentId && b->id < a->id)) std::swap(a, b);
        added.push_back({a->id, b->id, Relation::Close});
      }
    }
  }

  for (const auto* n : things) {
    const ObjectNode* container = nullptr;
    for (const auto* r : rooms) {
      if (r->bbox && r->bbox->contains_horizontal(n->bbox->center)) {
        container = r;
        break;
      }
    }
    if (!container) continue;
    const std::int64_t id = n->id;
    detail::erase_edges(g, [&](const RelationEdge& e) {
      return e.fromId == id && e.relation == Relation::Inside && g.find(e.toId)->isRoom;
    });
    added.push_back({id, container->id, Relation::Inside});
  }
  g.edges.insert(g.edges.end(), added.begin(), added.end());
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());

  if (auto room = g.room_of(agentId)) state.currentRoomId = *room;
  return state;
}

inline SimulationState initial_state(const EnvironmentGraph& env, const SimConfig& cfg = {}) {
  validate_environment(env);
  SimulationState s;
  s.graph = env;
  const auto& agent = s.graph.agent();
  if (!agent.bbox) throw Error(ErrorCode::MissingGeometry, "agent has no bounding box");
  s.agentPosture = "STANDING";
  for (auto p : kPostures) {
    if (agent.states.contains(p)) s.agentPosture = std::string(p);
  }
  detail::set_posture(s, s.agentPosture);
  for (const auto& e : s.graph.edges) {
    if (e.fromId != agent.id) continue;
    if (e.relation == Relation::HoldsRh) s.rightHand = e.toId;
    if (e.relation == Relation::HoldsLh) s.leftHand = e.toId;
  }
  s.currentRoomId = *s.graph.room_of(agent.id);
  return recompute_relations(std::move(s), cfg);
}

/// Applies one step. Throws StepFailure when a precondition fails.
inline std::pair<SimulationState, TransitionRecord> execute_step(const SimulationState& state, const Step& step,
                                                                 const SimConfig& cfg = {}) {
  using R = FailureReason;
  SimulationState next = state;
  auto& g = next.graph;
  const std::int64_t agentId = g.agent().id;

  auto resolve = [&](const std::optional<ObjectRef>& ref) -> ObjectNode* {
    if (!ref) throw StepFailure(R::ObjectAbsent, std::nullopt, step.verb + " needs an object");
    auto* node = g.find(ref->id);
    if (!node) throw StepFailure(R::ObjectAbsent, ref->id, ref->name + " (" + std::to_string(ref->id) + ") not in scene");
    return node;
  };
  auto label = [](const ObjectNode& n) { return n.className + " (" + std::to_string(n.id) + ")"; };
  auto is_close = [&](const ObjectNode& n) {
    if (state.holds(n.id)) return true;
    const auto* before = state.graph.find(n.id);
    if (!before->bbox) return false;
    return distance(state.graph.agent().bbox->center, before->bbox->center) <= cfg.closeThreshold;
  };
  auto require_close = [&](const ObjectNode& n) {
    if (!is_close(n)) throw StepFailure(R::NotClose, n.id, "agent is not close to " + label(n));
  };
  auto require_same_room = [&](const ObjectNode& n) {
    const auto room = n.isRoom ? std::optional<std::int64_t>(n.id) : state.graph.room_of(n.id);
    if (!state.holds(n.id) && room != state.currentRoomId)
      throw StepFailure(R::NotClose, n.id, label(n) + " is not in the agent's room");
  };
  auto require_affords = [&](const ObjectNode& n, std::string_view verb) {
    if (!n.affordances.contains(verb))
      throw StepFailure(R::NoAffordance, n.id, label(n) + " does not afford " + std::string(verb));
  };
  auto require_holding = [&](const ObjectNode& n) {
    if (!state.holds(n.id)) throw StepFailure(R::NotHolding, n.id, "agent is not holding " + label(n));
  };
  auto set_facing = [&](std::int64_t target) {
    detail::erase_edges(g, [&](const RelationEdge& e) { return e.fromId == agentId && e.relation == Relation::Facing; });
    g.edges.push_back({agentId, target, Relation::Facing});
  };
  auto swap_state = [&](ObjectNode& n, const char* from, const char* to) {
    if (n.states.contains(to)) throw StepFailure(R::WrongState, n.id, label(n) + " is already " + to);
    n.states.erase(from);
    n.states.insert(to);
  };

  double walkDistance = 0.0;
  const std::string& verb = step.verb;

  if (verb == "walk") {
    auto* target = resolve(step.mainObject);
    if (!target->bbox) throw StepFailure(R::ObjectAbsent, target->id, label(*target) + " has no position");
    auto& agent = g.agent();
    const Vec3 from = agent.bbox->center;
    const Vec3 to = target->bbox->center;
    walkDistance = horizontal_distance(from, to);
    double dx = 1.0;
    double dz = 0.0;
    if (walkDistance > 1e-12) {
      dx = (from.x - to.x) / walkDistance;
      dz = (from.z - to.z) / walkDistance;
    }
    agent.bbox->center = {to.x + cfg.interactionOffset * dx, from.y, to.z + cfg.interactionOffset * dz};
    detail::erase_edges(g, [&](const RelationEdge& e) { return e.fromId == agentId && e.relation == Relation::Facing; });
    if (next.agentPosture != "STANDING") detail::set_posture(next, "STANDING");
  } else if (verb == "find" || verb == "turnTo" || verb == "lookAt" || verb == "watch") {
    auto* target = resolve(step.mainObject);
    require_same_room(*target);
    if (verb != "watch") set_facing(target->id);
  } else if (verb == "grab") {
    auto* target = resolve(step.mainObject);
    require_close(*target);
    require_affords(*target, "grab");
    if (state.holds(target->id)) throw StepFailure(R::WrongState, target->id, label(*target) + " is already held");
    const std::int64_t id = target->id;
    if (!next.rightHand) {
      next.rightHand = id;
      g.edges.push_back({agentId, id, Relation::HoldsRh});
    } else if (!next.leftHand) {
      next.leftHand = id;
      g.edges.push_back({agentId, id, Relation::HoldsLh});
    } else {
      throw StepFailure(R::HandsFull, id, "both hands are occupied");
    }
    detail::erase_edges(g, [&](const RelationEdge& e) {
      return e.fromId == id && (e.relation == Relation::On ||
                                (e.relation == Relation::Inside && !g.find(e.toId)->isRoom));
    });
  } else if (verb == "switchOn" || verb == "switchOff") {
    auto* target = resolve(step.mainObject);
    require_close(*target);
    require_affords(*target, verb);
    if (verb == "switchOn") {
      swap_state(*target, "OFF", "ON");
    } else {
      swap_state(*target, "ON", "OFF");
    }
  } else if (verb == "open" || verb == "close") {
    auto* target = resolve(step.mainObject);
    require_close(*target);
    require_affords(*target, verb);
    if (verb == "open") {
      swap_state(*target, "CLOSED", "OPEN");
    } else {
      swap_state(*target, "OPEN", "CLOSED");
    }
  } else if (verb == "sit" || verb == "lie") {
    auto* target = resolve(step.mainObject);
    require_close(*target);
    require_affords(*target, verb);
    const std::string posture = verb == "sit" ? "SITTING" : "LYING";
    if (next.agentPosture == posture) throw StepFailure(R::WrongState, agentId, "agent is already " + posture);
    detail::set_posture(next, posture);
  } else if (verb == "standUp") {
    if (next.agentPosture == "STANDING") throw StepFailure(R::WrongState, agentId, "agent is already standing");
    detail::set_posture(next, "STANDING");
  } else if (verb == "putBack") {
    auto* held = resolve(step.mainObject);
    auto* surface = resolve(step.targetObject);
    require_holding(*held);
    require_close(*surface);
    if (!held->bbox || !surface->bbox) throw StepFailure(R::ObjectAbsent, held->id, "missing geometry");
    const std::int64_t id = held->id;
    if (next.rightHand == id) next.rightHand.reset();
    if (next.leftHand == id) next.leftHand.reset();
    detail::erase_edges(g, [&](const RelationEdge& e) {
      return e.fromId == agentId && e.toId == id && (e.relation == Relation::HoldsRh || e.relation == Relation::HoldsLh);
    });
    held->bbox->center = {surface->bbox->center.x, surface->bbox->top() + 0.5 * held->bbox->size.y,
                          surface->bbox->center.z};
    g.edges.push_back({id, surface->id, Relation::On});
  } else if (verb == "drink" || verb == "read") {
    auto* target = resolve(step.mainObject);
    require_holding(*target);
  } else if (verb == "pour") {
    auto* held = resolve(step.mainObject);
    auto* into = resolve(step.targetObject);
    require_holding(*held);
    require_close(*into);
  } else if (verb == "touch") {
    require_close(*resolve(step.mainObject));
  } else {
    throw StepFailure(R::UnknownVerb, std::nullopt, "no semantics for verb '" + verb + "'");
  }

  const double duration = cfg.durations.seconds(verb, walkDistance);
  next.clockSeconds = state.clockSeconds + duration;
  next = recompute_relations(std::move(next), cfg);

  TransitionRecord rec;
  rec.step = step;
  rec.durationSeconds = duration;
  rec.changedObjectIds = structural_diff(state.graph, next.graph);
  rec.startRoomId = state.currentRoomId;
  rec.endRoomId = next.currentRoomId;
  return {std::move(next), std::move(rec)};
}

/// Runs a script from the environment's initial state. Strict mode throws
/// UnexecutableError at the first failing step; repair mode inserts a walk to
/// the blocking object before a step failing with NotClose and retries it once.
inline Trace run_script(const ActivityScript& script, const EnvironmentGraph& env, const SimConfig& cfg = {},
                        RunMode mode = RunMode::Strict) {
  cfg.durations.validate();
  Trace trace;
  trace.script = script;
  trace.situations.push_back(initial_state(env, cfg));

  auto push = [&](SimulationState&& s, TransitionRecord&& rec, std::optional<std::size_t> source) {
    rec.stepIndex = trace.transitions.size();
    rec.sourceStepIndex = source;
    rec.inserted = !source.has_value();
    trace.transitions.push_back(std::move(rec));
    trace.situations.push_back(std::move(s));
  };
  auto fail = [&](std::size_t index, const StepFailure& f) {
    throw UnexecutableError(ExecutabilityReport{false, index, f.reason(), f.detail()});
  };

  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const Step& step = script.steps[i];
    try {
      auto [s, rec] = execute_step(trace.situations.back(), step, cfg);
      push(std::move(s), std::move(rec), i);
    } catch (const StepFailure& f) {
      if (mode == RunMode::Strict || f.reason() != FailureReason::NotClose || !f.objectId()) fail(i, f);
      const auto* blocker = trace.situations.back().graph.find(*f.objectId());
      Step walk{"walk", ObjectRef{blocker->className, blocker->id}, std::nullopt};
      try {
        auto [ws, wrec] = execute_step(trace.situations.back(), walk, cfg);
        auto [s, rec] = execute_step(ws, step, cfg);
        push(std::move(ws), std::move(wrec), std::nullopt);
        push(std::move(s), std::move(rec), i);
      } catch (const StepFailure& again) {
        fail(i, again);
      }
    }
  }
  return trace;
}

inline ExecutabilityReport check_executable(const ActivityScript& script, const EnvironmentGraph& env,
                                            const SimConfig& cfg = {}) {
  try {
    run_script(script, env, cfg, RunMode::Strict);
  } catch (const UnexecutableError& e) {
    return e.report();
  }
  return {};
}

// ---------------------------------------------------------------------------
// Trace JSON

namespace detail {

inline nlohmann::json step_to_json(const Step& s) {
  nlohmann::json j{{"verb", s.verb}};
  if (s.mainObject) j["main"] = {{"name", s.mainObject->name}, {"id", s.mainObject->id}};
  if (s.targetObject) j["target"] = {{"name", s.targetObject->name}, {"id", s.targetObject->id}};
  return j;
}

inline Step step_from_json(const nlohmann::json& j) {
  Step s;
  s.verb = j.at("verb").get<std::string>();
  if (j.contains("main")) s.mainObject = ObjectRef{j["main"].at("name").get<std::string>(), j["main"].at("id").get<std::int64_t>()};
  if (j.contains("target"))
    s.targetObject = ObjectRef{j["target"].at("name").get<std::string>(), j["target"].at("id").get<std::int64_t>()};
  return s;
}

}  // namespace detail

inline nlohmann::json script_to_json(const ActivityScript& script) {
  nlohmann::json j{{"name", script.name},
                   {"description", script.description},
                   {"category", std::string(to_string(script.category))},
                   {"steps", nlohmann::json::array()}};
  for (const auto& s : script.steps) j["steps"].push_back(detail::step_to_json(s));
  return j;
}

inline ActivityScript script_from_json(const nlohmann::json& j) {
  ActivityScript script;
  script.name = j.at("name").get<std::string>();
  script.description = j.value("description", std::string{});
  const auto cat = j.value("category", std::string("Other"));
  script.category = parse_category(cat).value_or(Category::Other);
  for (const auto& s : j.at("steps")) script.steps.push_back(detail::step_from_json(s));
  return script;
}

inline nlohmann::json trace_to_json(const Trace& trace) {
  nlohmann::json j;
  j["script"] = script_to_json(trace.script);
  j["situations"] = nlohmann::json::array();
  for (const auto& s : trace.situations) {
    nlohmann::json js{{"clock_seconds", s.clockSeconds},
                      {"agent_posture", s.agentPosture},
                      {"current_room_id", s.currentRoomId},
                      {"held", nlohmann::json::object()}};
    if (s.rightHand) js["held"]["RH"] = *s.rightHand;
    if (s.leftHand) js["held"]["LH"] = *s.leftHand;
    js["graph"] = environment_to_json(s.graph, true);
    j["situations"].push_back(std::move(js));
  }
  j["transitions"] = nlohmann::json::array();
  for (const auto& t : trace.transitions) {
    nlohmann::json jt{{"step_index", t.stepIndex},
                      {"inserted", t.inserted},
                      {"step", detail::step_to_json(t.step)},
                      {"duration_seconds", t.durationSeconds},
                      {"changed_object_ids", std::vector<std::int64_t>(t.changedObjectIds.begin(), t.changedObjectIds.end())},
                      {"start_room_id", t.startRoomId},
                      {"end_room_id", t.endRoomId}};
    if (t.sourceStepIndex) jt["source_step_index"] = *t.sourceStepIndex;
    j["transitions"].push_back(std::move(jt));
  }
  return j;
}

/// Inverse of trace_to_json; checks the situation/transition count invariant.
inline Trace trace_from_json(const nlohmann::json& j) {
  Trace trace;
  try {
    trace.script = script_from_json(j.at("script"));
    for (const auto& js : j.at("situations")) {
      SimulationState s;
      s.clockSeconds = js.at("clock_seconds").get<double>();
      s.agentPosture = js.at("agent_posture").get<std::string>();
      s.currentRoomId = js.at("current_room_id").get<std::int64_t>();
      const auto& held = js.at("held");
      if (held.contains("RH")) s.rightHand = held["RH"].get<std::int64_t>();
      if (held.contains("LH")) s.leftHand = held["LH"].get<std::int64_t>();
      s.graph = environment_from_json(js.at("graph"));
      trace.situations.push_back(std::move(s));
    }
    for (const auto& jt : j.at("transitions")) {
      TransitionRecord t;
      t.stepIndex = jt.at("step_index").get<std::size_t>();
      t.inserted = jt.at("inserted").get<bool>();
      if (jt.contains("source_step_index")) t.sourceStepIndex = jt["source_step_index"].get<std::size_t>();
      t.step = detail::step_from_json(jt.at("step"));
      t.durationSeconds = jt.at("duration_seconds").get<double>();
      for (const auto& id : jt.at("changed_object_ids")) t.changedObjectIds.insert(id.get<std::int64_t>());
      t.startRoomId = jt.at("start_room_id").get<std::int64_t>();
      t.endRoomId = jt.at("end_room_id").get<std::int64_t>();
      trace.transitions.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidTrace, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidTrace, e.what());
  }
  if (trace.situations.size() != trace.transitions.size() + 1)
    throw Error(ErrorCode::InvalidTrace, "situation count must be transition count + 1");
  return trace;
}

}  // namespace vh2kg
