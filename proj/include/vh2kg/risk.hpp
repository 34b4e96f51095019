#pragma once

// Fall-risk rules evaluated natively over traces and over synthesized KGs.
//
// R1: an action other than walk/watch/turnTo/lookAt on a non-room object whose
//     top is strictly above the agent's top.
// R2: grabbing a non-room object whose top is strictly below the agent's
//     body center.
// Geometry is always read from the situation before the event.

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "vh2kg/error.hpp"
#include "vh2kg/kg.hpp"
#include "vh2kg/rdf.hpp"
#include "vh2kg/simulator.hpp"

namespace vh2kg {

enum class RuleId { R1, R2 };

inline std::string_view to_string(RuleId id) { return id == RuleId::R1 ? "R1" : "R2"; }

inline std::optional<RuleId> parse_rule_id(std::string_view s) {
  if (s == "R1") return RuleId::R1;
  if (s == "R2") return RuleId::R2;
  return std::nullopt;
}

struct RiskRule {
  RuleId id;
  std::string riskClass;
  std::string description;
};

inline const std::array<RiskRule, 2>& risk_rules() {
  static const std::array<RiskRule, 2> rules = {{
      {RuleId::R1, std::string(rdf::ns::kHra) + "DoSomethingToHighPositionObject",
       "Reach an object that is in a high place"},
      {RuleId::R2, std::string(rdf::ns::kHra) + "GrabLowPositionObject", "Take an object out of low shelves"},
  }};
  return rules;
}

inline const RiskRule& rule(RuleId id) { return risk_rules()[static_cast<std::size_t>(id)]; }

enum class RiskCategory { DangerousAction, DangerousInteraction, DangerousSpatialRelationship };

struct TaxonomyEntry {
  RiskCategory category;
  std::string_view text;
  std::optional<RuleId> rule;  // set only for entries with an executable rule

  bool implemented() const { return rule.has_value(); }
};

inline const std::vector<TaxonomyEntry>& risk_taxonomy() {
  using C = RiskCategory;
  static const std::vector<TaxonomyEntry> entries = {
      {C::DangerousAction, "Go up or down the steps", {}},
      {C::DangerousAction, "Straddle an object", {}},
      {C::DangerousAction, "Walk backwards", {}},
      {C::DangerousAction, "Stand on one leg", {}},
      {C::DangerousAction, "Do some work using one’s foot", {}},
      {C::DangerousAction, "Stand up without support", {}},
      {C::DangerousInteraction, "Reach an object that is in a high place", RuleId::R1},
      {C::DangerousInteraction, "Take an object out of low shelves", RuleId::R2},
      {C::DangerousInteraction, "Carry a heavy object", {}},
      {C::DangerousInteraction, "Lean on an unstable object", {}},
      {C::DangerousInteraction, "Pick up an object on the floor while sitting on a chair", {}},
      {C::DangerousSpatialRelationship, "An object is placed on an aisle.", {}},
      {C::DangerousSpatialRelationship, "There is a gap between the bed and the wall.", {}},
      {C::DangerousSpatialRelationship, "A cushion is laid on a chair.", {}},
      {C::DangerousSpatialRelationship, "A bed has no side rails.", {}},
      {C::DangerousSpatialRelationship, "A chair has no armrest.", {}},
  };
  return entries;
}

struct Evidence {
  double agentCenterY = 0;
  double agentHeight = 0;
  double objectCenterY = 0;
  double objectHeight = 0;

  double agent_top() const { return agentCenterY + 0.5 * agentHeight; }
  double object_top() const { return objectCenterY + 0.5 * objectHeight; }
  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct RiskFinding {
  std::string activityIri;
  std::string eventIri;
  std::int64_t eventNumber = 0;
  RuleId rule = RuleId::R1;
  std::string agentIri;
  std::string objectIri;
  std::string action;  // verb
  std::string objectLabel;
  Evidence evidence;
  std::vector<rdf::Triple> explanationPath;

  friend bool operator==(const RiskFinding&, const RiskFinding&) = default;
};

inline constexpr std::array<std::string_view, 4> kR1ExcludedVerbs = {"walk", "watch", "turnTo", "lookAt"};

inline bool r1_applies(std::string_view verb) {
  return std::find(kR1ExcludedVerbs.begin(), kR1ExcludedVerbs.end(), verb) == kR1ExcludedVerbs.end();
}
inline bool r1_holds(const Evidence& e) { return e.object_top() > e.agent_top(); }
inline bool r2_holds(const Evidence& e) { return e.object_top() < e.agentCenterY; }

namespace detail {

inline void sort_findings(std::vector<RiskFinding>& findings) {
  std::sort(findings.begin(), findings.end(), [](const RiskFinding& a, const RiskFinding& b) {
    return std::tie(a.activityIri, a.eventNumber, a.rule) < std::tie(b.activityIri, b.eventNumber, b.rule);
  });
}

// Path triples for one finding, given the IRIs involved. The same shape is
// produced from a trace and from a KG, so both can be checked against a KG.
struct PathParts {
  rdf::Term activity, event, agent, object, situation, objectPredicate, action;
  rdf::Term agentHeightNode, objectHeightNode;
  double agentHeight, objectHeight;
  rdf::Term agentState, objectState, agentShape, objectShape;
  double agentCenterY, objectCenterY;
};

inline std::vector<rdf::Triple> build_path(const PathParts& p) {
  using namespace vocab;
  std::vector<rdf::Triple> path;
  auto add = [&](const rdf::Term& s, const std::string& pred, const rdf::Term& o) {
    path.push_back({s, rdf::iri(pred), o});
  };
  add(p.activity, kHasEvent, p.event);
  add(p.event, kAgent, p.agent);
  add(p.event, kSituationBefore, p.situation);
  add(p.event, p.objectPredicate.value, p.object);
  add(p.event, kAction, p.action);
  add(p.object, kHeight, p.objectHeightNode);
  add(p.objectHeightNode, kValue, rdf::decimal(p.objectHeight));
  add(p.agent, kHeight, p.agentHeightNode);
  add(p.agentHeightNode, kValue, rdf::decimal(p.agentHeight));
  for (const auto& [state, shape, owner, cy] :
       {std::tuple{p.agentState, p.agentShape, p.agent, p.agentCenterY},
        std::tuple{p.objectState, p.objectShape, p.object, p.objectCenterY}}) {
    add(state, kIsStateOf, owner);
    add(state, kPartOf, p.situation);
    add(state, kBbox, shape);
    const std::string local = shape.value.substr(rdf::ns::kEx.size());
    add(shape, kBboxCenter, rdf::blank(local + "_c0"));
    add(rdf::blank(local + "_c0"), kRest, rdf::blank(local + "_c1"));
    add(rdf::blank(local + "_c1"), kFirst, rdf::decimal(cy));
  }
  return path;
}

inline bool rule_matches(RuleId id, std::string_view verb, const Evidence& e) {
  if (id == RuleId::R1) return r1_applies(verb) && r1_holds(e);
  return verb == "grab" && r2_holds(e);
}

}  // namespace detail

/// Evaluates one rule over a simulation trace.
inline std::vector<RiskFinding> eval_rule(RuleId id, const Trace& trace, const ActivityMeta& meta = {}) {
  const auto& initial = trace.situations.front().graph;
  const IriFactory iris(snake_case(trace.script.name), meta.activityIndex, initial.sceneId);

  // Situation index at which the current State of each object was minted.
  std::map<std::int64_t, std::size_t> minted;
  std::vector<std::map<std::int64_t, std::size_t>> mintedAt;
  for (std::size_t i = 0; i < trace.situations.size(); ++i) {
    for (const auto& n : trace.situations[i].graph.nodes) {
      const ObjectNode* prev = i ? trace.situations[i - 1].graph.find(n.id) : nullptr;
      if (!prev || prev->states != n.states || prev->bbox != n.bbox || prev->affordances != n.affordances)
        minted[n.id] = i;
    }
    mintedAt.push_back(minted);
  }

  std::vector<RiskFinding> findings;
  for (std::size_t k = 0; k < trace.transitions.size(); ++k) {
    const auto& t = trace.transitions[k];
    if (id == RuleId::R1 && !r1_applies(t.step.verb)) continue;
    if (id == RuleId::R2 && t.step.verb != "grab") continue;
    const auto& before = trace.situations[k].graph;
    const ObjectNode& agent = before.agent();
    for (const auto& [ref, pred] : {std::pair{&t.step.mainObject, &vocab::kMainObject},
                                    std::pair{&t.step.targetObject, &vocab::kTargetObject}}) {
      if (!*ref) continue;
      const ObjectNode* obj = before.find((*ref)->id);
      if (!obj) throw Error(ErrorCode::InvalidTrace, "unknown object " + std::to_string((*ref)->id));
      if (obj->isRoom) continue;
      if (!obj->bbox || !obj->heightMeters || !agent.bbox || !agent.heightMeters)
        throw Error(ErrorCode::MissingGeometry, obj->className + std::to_string(obj->id));
      Evidence ev{agent.bbox->center.y, *agent.heightMeters, obj->bbox->center.y, *obj->heightMeters};
      if (!detail::rule_matches(id, t.step.verb, ev)) continue;

      RiskFinding f;
      f.activityIri = iris.activity().value;
      f.eventIri = iris.event(k).value;
      f.eventNumber = static_cast<std::int64_t>(k);
      f.rule = id;
      f.agentIri = iris.node(agent).value;
      f.objectIri = iris.node(*obj).value;
      f.action = t.step.verb;
      f.objectLabel = obj->className;
      f.evidence = ev;
      const std::size_t sa = mintedAt[k].at(agent.id), so = mintedAt[k].at(obj->id);
      f.explanationPath = detail::build_path({iris.activity(), iris.event(k), iris.node(agent), iris.node(*obj),
                                              iris.situation(k), rdf::iri(*pred), vocab::action(t.step.verb),
                                              iris.height(agent), iris.height(*obj), ev.agentHeight, ev.objectHeight,
                                              iris.state(sa, agent), iris.state(so, *obj), iris.shape(sa, agent),
                                              iris.shape(so, *obj), ev.agentCenterY, ev.objectCenterY});
      findings.push_back(std::move(f));
      break;  // one finding per (event, rule)
    }
  }
  return findings;
}

inline std::vector<RiskFinding> eval_r1(const Trace& trace, const ActivityMeta& meta = {}) {
  return eval_rule(RuleId::R1, trace, meta);
}
inline std::vector<RiskFinding> eval_r2(const Trace& trace, const ActivityMeta& meta = {}) {
  return eval_rule(RuleId::R2, trace, meta);
}

/// Both rules over a trace, sorted by (activity, event number, rule).
inline std::vector<RiskFinding> detect_risks(const Trace& trace, const ActivityMeta& meta = {}) {
  auto findings = eval_r1(trace, meta);
  auto r2 = eval_r2(trace, meta);
  findings.insert(findings.end(), r2.begin(), r2.end());
  detail::sort_findings(findings);
  return findings;
}

namespace detail {

struct KgGeometry {
  const rdf::Term* state = nullptr;
  const rdf::Term* shape = nullptr;
  double centerY = 0;
  const rdf::Term* heightNode = nullptr;
  double height = 0;
};

inline std::optional<KgGeometry> kg_geometry(const rdf::KgIndex& idx, const rdf::Term& entity,
                                             const rdf::Term& situation) {
  using namespace vocab;
  KgGeometry g;
  g.heightNode = idx.object(entity, kHeight);
  if (!g.heightNode) return std::nullopt;
  const rdf::Term* hv = idx.object(*g.heightNode, kValue);
  if (!hv || !rdf::numeric_value(*hv)) return std::nullopt;
  g.height = *rdf::numeric_value(*hv);
  for (const auto* state : idx.subjects(kIsStateOf, entity)) {
    if (idx.has(*state, kPartOf, situation)) {
      g.state = state;
      break;
    }
  }
  if (!g.state) return std::nullopt;
  g.shape = idx.object(*g.state, kBbox);
  if (!g.shape) return std::nullopt;
  const rdf::Term* c0 = idx.object(*g.shape, kBboxCenter);
  const rdf::Term* c1 = c0 ? idx.object(*c0, kRest) : nullptr;
  const rdf::Term* y = c1 ? idx.object(*c1, kFirst) : nullptr;
  if (!y || !rdf::numeric_value(*y)) return std::nullopt;
  g.centerY = *rdf::numeric_value(*y);
  return g;
}

inline std::string local_after(const std::string& value, std::string_view base) {
  return value.starts_with(base) ? value.substr(base.size()) : value;
}

}  // namespace detail

/// Evaluates one rule over a KG (one or many activities).
inline std::vector<RiskFinding> eval_rule(RuleId id, const rdf::KgDocument& kg) {
  using namespace vocab;
  const rdf::KgIndex idx(kg);
  std::vector<RiskFinding> findings;
  for (const auto* activity : idx.subjects_with(kHasEvent)) {
    for (const auto* event : idx.objects(*activity, kHasEvent)) {
      const rdf::Term* action = idx.object(*event, kAction);
      const rdf::Term* agent = idx.object(*event, kAgent);
      const rdf::Term* situation = idx.object(*event, kSituationBefore);
      const rdf::Term* number = idx.object(*event, kEventNumber);
      if (!action || !agent || !situation || !number) continue;
      const std::string verb = detail::local_after(action->value, rdf::ns::kAction);
      if (id == RuleId::R1 && !r1_applies(verb)) continue;
      if (id == RuleId::R2 && verb != "grab") continue;
      for (const auto* pred : {&kMainObject, &kTargetObject}) {
        const rdf::Term* object = idx.object(*event, *pred);
        if (!object) continue;
        if (idx.has(*object, kType, rdf::iri(kRoom))) continue;
        auto ag = detail::kg_geometry(idx, *agent, *situation);
        auto og = detail::kg_geometry(idx, *object, *situation);
        if (!ag || !og) throw Error(ErrorCode::MissingGeometry, object->value);
        Evidence ev{ag->centerY, ag->height, og->centerY, og->height};
        if (!detail::rule_matches(id, verb, ev)) continue;

        RiskFinding f;
        f.activityIri = activity->value;
        f.eventIri = event->value;
        f.eventNumber = static_cast<std::int64_t>(rdf::numeric_value(*number).value_or(0));
        f.rule = id;
        f.agentIri = agent->value;
        f.objectIri = object->value;
        f.action = verb;
        const rdf::Term* label = idx.object(*object, kLabel);
        f.objectLabel = label ? label->value : detail::local_after(object->value, rdf::ns::kEx);
        f.evidence = ev;
        f.explanationPath = detail::build_path({*activity, *event, *agent, *object, *situation, rdf::iri(*pred),
                                                *action, *ag->heightNode, *og->heightNode, ev.agentHeight,
                                                ev.objectHeight, *ag->state, *og->state, *ag->shape, *og->shape,
                                                ev.agentCenterY, ev.objectCenterY});
        findings.push_back(std::move(f));
        break;
      }
    }
  }
  return findings;
}

inline std::vector<RiskFinding> eval_r1(const rdf::KgDocument& kg) { return eval_rule(RuleId::R1, kg); }
inline std::vector<RiskFinding> eval_r2(const rdf::KgDocument& kg) { return eval_rule(RuleId::R2, kg); }

struct DetectionResult {
  std::vector<RiskFinding> findings;
  rdf::KgDocument augmented;
};

/// Runs both rules and materializes riskFactor and risk-class triples.
inline DetectionResult detect_risks(const rdf::KgDocument& kg) {
  DetectionResult out;
  out.findings = eval_r1(kg);
  auto r2 = eval_r2(kg);
  out.findings.insert(out.findings.end(), r2.begin(), r2.end());
  detail::sort_findings(out.findings);
  out.augmented = kg;
  for (const auto& f : out.findings) {
    out.augmented.add(rdf::iri(f.activityIri), rdf::iri(vocab::kRiskFactor), rdf::iri(f.eventIri));
    out.augmented.add(rdf::iri(f.eventIri), rdf::iri(vocab::kType), rdf::iri(rule(f.rule).riskClass));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Explanations

struct Explanation {
  std::string dot;
  std::string text;
};

namespace detail {

inline std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string dot_label(const rdf::Term& t) {
  std::string s = t.is_literal() ? t.value : rdf::compact(t, rdf::default_prefixes());
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

inline std::string explanation_text(const RiskFinding& f) {
  const auto& e = f.evidence;
  if (f.rule == RuleId::R1) {
    return f.action + " " + f.objectLabel + " whose top (" + detail::fixed2(e.object_top()) +
           " m) is above the agent's top (" + detail::fixed2(e.agent_top()) + " m)";
  }
  return "grabbed " + f.objectLabel + " whose top (" + detail::fixed2(e.object_top()) +
         " m) is below the agent's body center (" + detail::fixed2(e.agentCenterY) + " m)";
}

/// DOT digraph of the event's neighborhood plus the rule path; path edges are red.
inline Explanation explain(const RiskFinding& f, const rdf::KgDocument& kg) {
  if (f.explanationPath.empty()) throw Error(ErrorCode::EmptyPath, "finding has no explanation path");
  for (const auto& t : f.explanationPath) {
    if (!kg.contains(t)) throw Error(ErrorCode::EmptyPath, "path triple missing from KG: " + rdf::to_ntriples(t));
  }
  std::set<rdf::Triple> path(f.explanationPath.begin(), f.explanationPath.end());
  std::set<rdf::Triple> edges = path;
  const rdf::Term event = rdf::iri(f.eventIri);
  for (const auto& t : kg.triples) {
    if (t.subject == event) edges.insert(t);
  }

  std::map<rdf::Term, std::string> ids;
  auto node_id = [&](const rdf::Term& t) -> const std::string& {
    auto [it, inserted] = ids.try_emplace(t, "n" + std::to_string(ids.size()));
    return it->second;
  };
  std::string body;
  for (const auto& t : edges) {
    const auto& s = node_id(t.subject);
    const auto& o = node_id(t.object);
    body += "  " + s + " -> " + o + " [label=\"" + detail::dot_label(t.predicate) + "\"" +
            (path.contains(t) ? ", color=red, fontcolor=red" : "") + "];\n";
  }
  std::string dot = "digraph finding {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n";
  for (const auto& [term, id] : ids) {
    dot += "  " + id + " [label=\"" + detail::dot_label(term) + "\"" + (term == event ? ", color=red" : "") + "];\n";
  }
  dot += body + "}\n";
  return {std::move(dot), explanation_text(f)};
}

// ---------------------------------------------------------------------------
// Findings JSON

inline nlohmann::json findings_to_json(const std::vector<RiskFinding>& findings) {
  auto arr = nlohmann::json::array();
  for (const auto& f : findings) {
    nlohmann::json j;
    j["activity"] = f.activityIri;
    j["event"] = f.eventIri;
    j["event_number"] = f.eventNumber;
    j["rule"] = std::string(to_string(f.rule));
    j["agent"] = f.agentIri;
    j["object"] = f.objectIri;
    j["action"] = f.action;
    j["object_label"] = f.objectLabel;
    j["evidence"] = {{"agent_center_y", f.evidence.agentCenterY},
                     {"agent_height", f.evidence.agentHeight},
                     {"object_center_y", f.evidence.objectCenterY},
                     {"object_height", f.evidence.objectHeight}};
    auto path = nlohmann::json::array();
    for (const auto& t : f.explanationPath) {
      path.push_back({rdf::to_ntriples(t.subject), rdf::to_ntriples(t.predicate), rdf::to_ntriples(t.object)});
    }
    j["path"] = std::move(path);
    arr.push_back(std::move(j));
  }
  return arr;
}

inline std::vector<RiskFinding> findings_from_json(const nlohmann::json& arr) {
  std::vector<RiskFinding> out;
  try {
    for (const auto& j : arr) {
      RiskFinding f;
      f.activityIri = j.at("activity").get<std::string>();
      f.eventIri = j.at("event").get<std::string>();
      f.eventNumber = j.value("event_number", std::int64_t{0});
      auto rid = parse_rule_id(j.at("rule").get<std::string>());
      if (!rid) throw Error(ErrorCode::MalformedDocument, "unknown rule " + j.at("rule").get<std::string>());
      f.rule = *rid;
      f.agentIri = j.value("agent", std::string{});
      f.objectIri = j.value("object", std::string{});
      f.action = j.value("action", std::string{});
      f.objectLabel = j.value("object_label", std::string{});
      if (j.contains("evidence")) {
        const auto& e = j["evidence"];
        f.evidence = {e.at("agent_center_y").get<double>(), e.at("agent_height").get<double>(),
                      e.at("object_center_y").get<double>(), e.at("object_height").get<double>()};
      }
      for (const auto& t : j.value("path", nlohmann::json::array())) {
        f.explanationPath.push_back({rdf::parse_term(t.at(0).get<std::string>()),
                                     rdf::parse_term(t.at(1).get<std::string>()),
                                     rdf::parse_term(t.at(2).get<std::string>())});
      }
      out.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Query export for external triplestores

inline constexpr std::string_view kRulePrefixes =
    "PREFIX : <http://example.org/virtualhome2kg/ontology/>\n"
    "PREFIX ac: <http://example.org/virtualhome2kg/ontology/action/>\n"
    "PREFIX ho: <http://example.org/virtualhome2kg/ontology/ho/>\n"
    "PREFIX hra: <http://example.org/virtualhome2kg/ontology/hra/>\n"
    "PREFIX x3do: <https://www.web3d.org/specifications/X3dOntology4.0#>\n"
    "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\n"
    "PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n\n";

// ho:object matches mainObject/targetObject only under RDFS subproperty inference.
inline constexpr std::string_view kR1Query =
    "CONSTRUCT { ?a hra:riskFactor ?e . ?e a hra:DoSomethingToHighPositionObject . }\n"
    "WHERE {\n"
    "  ?a :hasEvent ?e .\n"
    "  ?e :agent ?person ; :situationBeforeEvent ?situation ; ho:object ?o ; :action ?action .\n"
    "  ?o :height/rdf:value ?oh .\n"
    "  ?person :height/rdf:value ?ph .\n"
    "  ?state1 :isStateOf ?person ; :partOf ?situation ; :bbox ?shape1 .\n"
    "  ?state2 :isStateOf ?o ; :partOf ?situation ; :bbox ?shape2 .\n"
    "  ?shape1 x3do:bboxCenter ?center1 .\n"
    "  ?center1 rdf:rest/rdf:first ?center_y1 .\n"
    "  ?shape2 x3do:bboxCenter ?center2 .\n"
    "  ?center2 rdf:rest/rdf:first ?center_y2 .\n"
    "  FILTER ((?center_y2 + (?oh * 0.5)) > (?center_y1 + (?ph * 0.5)))\n"
    "  FILTER (?action != ac:walk && ?action != ac:watch && ?action != ac:turnTo && ?action != ac:lookAt)\n"
    "  MINUS { ?o rdf:type/rdfs:subClassOf* :Room }\n"
    "}\n";

inline constexpr std::string_view kR2Query =
    "CONSTRUCT { ?a hra:riskFactor ?e . ?e a hra:GrabLowPositionObject . }\n"
    "WHERE {\n"
    "  ?a :hasEvent ?e .\n"
    "  ?e :agent ?person ; :situationBeforeEvent ?situation ; ho:object ?o ; :action ac:grab .\n"
    "  ?o :height/rdf:value ?oh .\n"
    "  ?person :height/rdf:value ?ph .\n"
    "  ?state1 :isStateOf ?person ; :partOf ?situation ; :bbox ?shape1 .\n"
    "  ?state2 :isStateOf ?o ; :partOf ?situation ; :bbox ?shape2 .\n"
    "  ?shape1 x3do:bboxCenter ?center1 .\n"
    "  ?center1 rdf:rest/rdf:first ?center_y1 .\n"
    "  ?shape2 x3do:bboxCenter ?center2 .\n"
    "  ?center2 rdf:rest/rdf:first ?center_y2 .\n"
    "  FILTER ((?center_y2 + (?oh * 0.5)) < ?center_y1)\n"
    "  MINUS { ?o rdf:type/rdfs:subClassOf* :Room }\n"
    "}\n";

inline std::string rule_query(RuleId id) {
  return std::string(kRulePrefixes) + std::string(id == RuleId::R1 ? kR1Query : kR2Query);
}

}  // namespace vh2kg
