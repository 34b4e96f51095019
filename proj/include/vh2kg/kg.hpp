#pragma once

// Event-centric knowledge graph synthesis from simulation traces.
//
// An activity links to numbered events; each event binds an action, its
// objects, the agent, the room(s) and the situations before and after it.
// Every situation aggregates exactly one State per object. A State is minted
// only when an object's state tokens, bounding box or affordances change, and
// consecutive States of one object are chained with nextState/previousState.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "vh2kg/error.hpp"
#include "vh2kg/home.hpp"
#include "vh2kg/rdf.hpp"
#include "vh2kg/script.hpp"
#include "vh2kg/simulator.hpp"

namespace vh2kg {

namespace vocab {

using rdf::Term;

inline Term vh(std::string_view local) { return rdf::iri(rdf::ns::kVh, local); }
inline Term ho(std::string_view local) { return rdf::iri(rdf::ns::kHo, local); }
inline Term hra(std::string_view local) { return rdf::iri(rdf::ns::kHra, local); }
inline Term action(std::string_view verb) { return rdf::iri(rdf::ns::kAction, verb); }
inline Term x3do(std::string_view local) { return rdf::iri(rdf::ns::kX3do, local); }

inline std::string vh_iri(std::string_view local) { return std::string(rdf::ns::kVh) + std::string(local); }

// Predicates (full IRIs, for index lookups).
inline const std::string kType = std::string(rdf::ns::kRdf) + "type";
inline const std::string kFirst = std::string(rdf::ns::kRdf) + "first";
inline const std::string kRest = std::string(rdf::ns::kRdf) + "rest";
inline const std::string kNil = std::string(rdf::ns::kRdf) + "nil";
inline const std::string kValue = std::string(rdf::ns::kRdf) + "value";
inline const std::string kLabel = std::string(rdf::ns::kRdfs) + "label";
inline const std::string kComment = std::string(rdf::ns::kRdfs) + "comment";
inline const std::string kAgent = vh_iri("agent");
inline const std::string kHasEvent = vh_iri("hasEvent");
inline const std::string kEventNumber = vh_iri("eventNumber");
inline const std::string kAction = vh_iri("action");
inline const std::string kMainObject = vh_iri("mainObject");
inline const std::string kTargetObject = vh_iri("targetObject");
inline const std::string kPlace = vh_iri("place");
inline const std::string kFrom = vh_iri("from");
inline const std::string kTo = vh_iri("to");
inline const std::string kPreviousEvent = vh_iri("previousEvent");
inline const std::string kNextEvent = vh_iri("nextEvent");
inline const std::string kSituationBefore = vh_iri("situationBeforeEvent");
inline const std::string kSituationAfter = vh_iri("situationAfterEvent");
inline const std::string kPartOf = vh_iri("partOf");
inline const std::string kIsStateOf = vh_iri("isStateOf");
inline const std::string kState = vh_iri("state");
inline const std::string kNextState = vh_iri("nextState");
inline const std::string kPreviousState = vh_iri("previousState");
inline const std::string kAffords = vh_iri("affords");
inline const std::string kAttribute = vh_iri("attribute");
inline const std::string kBbox = vh_iri("bbox");
inline const std::string kHeight = vh_iri("height");
inline const std::string kTime = vh_iri("time");
inline const std::string kVirtualHome = vh_iri("virtualHome");
inline const std::string kHasActivity = vh_iri("hasActivity");
inline const std::string kBboxCenter = std::string(rdf::ns::kX3do) + "bboxCenter";
inline const std::string kBboxSize = std::string(rdf::ns::kX3do) + "bboxSize";
inline const std::string kRiskFactor = std::string(rdf::ns::kHra) + "riskFactor";
inline const std::string kHoObject = std::string(rdf::ns::kHo) + "object";

// Classes.
inline const std::string kEvent = vh_iri("Event");
inline const std::string kEndEvent = vh_iri("EndEvent");
inline const std::string kSituation = vh_iri("Situation");
inline const std::string kStateClass = vh_iri("State");
inline const std::string kStateType = vh_iri("StateType");
inline const std::string kCharacter = vh_iri("Character");
inline const std::string kRoom = vh_iri("Room");
inline const std::string kObject = vh_iri("Object");
inline const std::string kAttributeClass = vh_iri("Attribute");
inline const std::string kShape = std::string(rdf::ns::kX3do) + "Shape";

inline Term p(const std::string& full) { return rdf::iri(full); }

inline std::string category_iri(Category c) { return std::string(rdf::ns::kHo) + std::string(to_string(c)); }

}  // namespace vocab

/// Deterministic instance IRIs for one activity run in one scene.
class IriFactory {
 public:
  IriFactory(std::string activityName, std::size_t activityIndex, std::string sceneId)
      : suffix_(std::move(activityName) + std::to_string(activityIndex) + "_" + scene_label(sceneId)),
        scene_(scene_label(sceneId)) {}

  static std::string scene_label(std::string_view sceneId) {
    std::string s(sceneId);
    if (!s.starts_with("scene")) s = "scene" + s;
    return sanitize(s);
  }

  /// Replaces characters outside [A-Za-z0-9_-] so local names stay prefixable.
  static std::string sanitize(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
    }
    return out;
  }

  std::string activity_local() const { return suffix_; }
  std::string event_local(std::size_t n) const { return "event" + std::to_string(n) + "_" + suffix_; }
  std::string situation_local(std::size_t n) const { return "home_situation" + std::to_string(n) + "_" + suffix_; }
  std::string object_local(std::string_view className, std::int64_t id) const {
    return sanitize(className) + std::to_string(id) + "_" + scene_;
  }
  std::string agent_local() const { return "character1_" + scene_; }
  std::string state_local(std::size_t n, std::string_view className, std::int64_t id) const {
    return "state" + std::to_string(n) + "_" + sanitize(className) + std::to_string(id) + "_" + suffix_;
  }
  std::string shape_local(std::size_t n, std::string_view className, std::int64_t id) const {
    return "shape" + std::to_string(n) + "_" + sanitize(className) + std::to_string(id) + "_" + suffix_;
  }
  std::string height_local(std::string_view className, std::int64_t id) const {
    return "height_" + sanitize(className) + std::to_string(id) + "_" + scene_;
  }

  rdf::Term activity() const { return ex(activity_local()); }
  rdf::Term event(std::size_t n) const { return ex(event_local(n)); }
  rdf::Term situation(std::size_t n) const { return ex(situation_local(n)); }
  rdf::Term scene() const { return ex(scene_); }
  rdf::Term agent() const { return ex(agent_local()); }
  rdf::Term node(const ObjectNode& n) const { return n.isAgent ? agent() : ex(object_local(n.className, n.id)); }
  rdf::Term state(std::size_t n, const ObjectNode& o) const { return ex(state_local(n, o.isAgent ? "character" : o.className, o.isAgent ? 1 : o.id)); }
  rdf::Term shape(std::size_t n, const ObjectNode& o) const { return ex(shape_local(n, o.isAgent ? "character" : o.className, o.isAgent ? 1 : o.id)); }
  rdf::Term height(const ObjectNode& o) const { return ex(height_local(o.isAgent ? "character" : o.className, o.isAgent ? 1 : o.id)); }

 private:
  static rdf::Term ex(const std::string& local) { return rdf::iri(rdf::ns::kEx, local); }

  std::string suffix_;
  std::string scene_;
};

inline IriFactory mint_iris(std::string activityName, std::size_t activityIndex, std::string sceneId) {
  return IriFactory(std::move(activityName), activityIndex, std::move(sceneId));
}

struct ActivityMeta {
  std::size_t activityIndex = 0;
  PropertyTable properties = default_property_table();
};

namespace detail {

/// Emits a three-cell RDF collection (x, y, z) with deterministic blank labels.
inline rdf::Term add_vector_list(rdf::KgDocument& doc, const std::string& labelBase, Vec3 v) {
  const double values[3] = {v.x, v.y, v.z};
  for (int i = 0; i < 3; ++i) {
    const rdf::Term cell = rdf::blank(labelBase + std::to_string(i));
    doc.add(cell, vocab::p(vocab::kFirst), rdf::decimal(values[i]));
    doc.add(cell, vocab::p(vocab::kRest),
            i < 2 ? rdf::blank(labelBase + std::to_string(i + 1)) : vocab::p(vocab::kNil));
  }
  return rdf::blank(labelBase + "0");
}

inline void add_node_facts(rdf::KgDocument& doc, const IriFactory& iris, const ObjectNode& n,
                           const PropertyTable& props) {
  using namespace vocab;
  const rdf::Term subject = iris.node(n);
  doc.add(subject, p(kType), p(n.isAgent ? kCharacter : n.isRoom ? kRoom : kObject));
  doc.add(subject, p(kLabel), rdf::literal(n.className, {}));
  if (n.heightMeters) {
    const rdf::Term h = iris.height(n);
    doc.add(subject, p(kHeight), h);
    doc.add(h, p(kValue), rdf::decimal(*n.heightMeters));
  }
  for (const auto& verb : n.affordances) doc.add(subject, p(kAffords), action(verb));
  for (const auto& attr : attributes_of(n, props)) {
    doc.add(subject, p(kAttribute), vh(attr));
    doc.add(vh(attr), p(kType), p(kAttributeClass));
  }
}

}  // namespace detail

/// Builds the knowledge graph of one simulated activity.
inline rdf::KgDocument build_activity_kg(const Trace& trace, const ActivityMeta& meta = {}) {
  using namespace vocab;
  if (trace.situations.size() != trace.transitions.size() + 1)
    throw Error(ErrorCode::InvalidTrace, "situation count must be transition count + 1");
  if (trace.script.name.empty()) throw Error(ErrorCode::InvalidTrace, "activity has no name");

  const auto& initial = trace.situations.front().graph;
  const IriFactory iris(snake_case(trace.script.name), meta.activityIndex, initial.sceneId);
  rdf::KgDocument doc;

  const rdf::Term activity = iris.activity();
  const rdf::Term agent = iris.agent();
  const std::size_t eventCount = trace.transitions.size();

  doc.add(activity, p(kType), rdf::iri(category_iri(trace.script.category)));
  doc.add(activity, p(kType), ho(snake_case(trace.script.name)));
  doc.add(activity, p(kLabel), rdf::literal(trace.script.name, {}));
  if (!trace.script.description.empty()) doc.add(activity, p(kComment), rdf::literal(trace.script.description, {}));
  doc.add(activity, p(kAgent), agent);
  doc.add(activity, p(kVirtualHome), iris.scene());
  doc.add(activity, p(kTime), rdf::decimal(trace.total_seconds()));

  auto roomTerm = [&](std::int64_t roomId) {
    const auto* room = initial.find(roomId);
    if (!room) throw Error(ErrorCode::InvalidTrace, "unknown room " + std::to_string(roomId));
    return iris.node(*room);
  };

  for (std::size_t n = 0; n < eventCount; ++n) {
    const auto& t = trace.transitions[n];
    const rdf::Term event = iris.event(n);
    doc.add(activity, p(kHasEvent), event);
    doc.add(event, p(kType), p(kEvent));
    if (n + 1 == eventCount) doc.add(event, p(kType), p(kEndEvent));
    doc.add(event, p(kEventNumber), rdf::integer(static_cast<std::int64_t>(n)));
    doc.add(event, p(kAction), action(t.step.verb));
    doc.add(event, p(kAgent), agent);
    auto objectTerm = [&](const ObjectRef& ref) {
      const auto* node = initial.find(ref.id);
      if (!node) throw Error(ErrorCode::InvalidTrace, "unknown object " + std::to_string(ref.id));
      return iris.node(*node);
    };
    if (t.step.mainObject) doc.add(event, p(kMainObject), objectTerm(*t.step.mainObject));
    if (t.step.targetObject) doc.add(event, p(kTargetObject), objectTerm(*t.step.targetObject));
    if (n > 0) doc.add(event, p(kPreviousEvent), iris.event(n - 1));
    if (n + 1 < eventCount) doc.add(event, p(kNextEvent), iris.event(n + 1));
    doc.add(event, p(kSituationBefore), iris.situation(n));
    doc.add(event, p(kSituationAfter), iris.situation(n + 1));
    doc.add(event, p(kTime), rdf::decimal(t.durationSeconds));
    if (t.startRoomId == t.endRoomId) {
      doc.add(event, p(kPlace), roomTerm(t.startRoomId));
    } else {
      doc.add(event, p(kFrom), roomTerm(t.startRoomId));
      doc.add(event, p(kTo), roomTerm(t.endRoomId));
    }
  }

  for (std::size_t i = 0; i < trace.situations.size(); ++i) doc.add(iris.situation(i), p(kType), p(kSituation));

  for (const auto& node : initial.nodes) detail::add_node_facts(doc, iris, node, meta.properties);

  // States: one chain per object, a new link only on change.
  for (const auto& node0 : initial.nodes) {
    const rdf::Term object = iris.node(node0);
    const ObjectNode* prev = nullptr;
    std::optional<rdf::Term> current;
    for (std::size_t i = 0; i < trace.situations.size(); ++i) {
      const ObjectNode* node = trace.situations[i].graph.find(node0.id);
      if (!node) throw Error(ErrorCode::InvalidTrace, "object " + std::to_string(node0.id) + " vanished");
      const bool changed = !prev || prev->states != node->states || prev->bbox != node->bbox ||
                           prev->affordances != node->affordances;
      if (changed) {
        const rdf::Term state = iris.state(i, *node);
        doc.add(state, p(kType), p(kStateClass));
        doc.add(state, p(kIsStateOf), object);
        for (const auto& token : node->states) {
          doc.add(state, p(kState), vh(token));
          doc.add(vh(token), p(kType), p(kStateType));
        }
        if (node->bbox) {
          const rdf::Term shape = iris.shape(i, *node);
          doc.add(state, p(kBbox), shape);
          doc.add(shape, p(kType), p(kShape));
          doc.add(shape, p(kBboxCenter), detail::add_vector_list(doc, shape.value.substr(rdf::ns::kEx.size()) + "_c", node->bbox->center));
          doc.add(shape, p(kBboxSize), detail::add_vector_list(doc, shape.value.substr(rdf::ns::kEx.size()) + "_s", node->bbox->size));
        }
        if (current) {
          doc.add(*current, p(kNextState), state);
          doc.add(state, p(kPreviousState), *current);
        }
        current = state;
        prev = node;
      }
      doc.add(*current, p(kPartOf), iris.situation(i));
    }
  }
  return doc;
}

/// Class hierarchy, property axioms and alignment links, emitted verbatim.
inline constexpr std::string_view kSchemaTurtle = R"TTL(@prefix : <http://example.org/virtualhome2kg/ontology/> .
@prefix vh2kg-an: <http://example.org/virtualhome2kg/ontology/action/> .
@prefix ho: <http://example.org/virtualhome2kg/ontology/ho/> .
@prefix hra: <http://example.org/virtualhome2kg/ontology/hra/> .
@prefix x3do: <https://www.web3d.org/specifications/X3dOntology4.0#> .
@prefix time: <http://www.w3.org/2006/time#> .
@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
@prefix skos: <http://www.w3.org/2004/02/skos/core#> .
@prefix sem: <http://semanticweb.cs.vu.nl/2009/11/sem/> .
@prefix event: <http://purl.org/NET/c4dm/event.owl#> .

# Activities
ho:Activity a owl:Class .
ho:BedTimeSleep rdfs:subClassOf ho:Activity .
ho:EatingDrinking rdfs:subClassOf ho:Activity .
ho:FoodPreparation rdfs:subClassOf ho:Activity .
ho:GettingReady rdfs:subClassOf ho:Activity .
ho:HouseArrangement rdfs:subClassOf ho:Activity .
ho:HouseCleaning rdfs:subClassOf ho:Activity .
ho:HygieneStyling rdfs:subClassOf ho:Activity .
ho:Leisure rdfs:subClassOf ho:Activity .
ho:PhysicalActivity rdfs:subClassOf ho:Activity .
ho:SocialInteraction rdfs:subClassOf ho:Activity .
ho:Work rdfs:subClassOf ho:Activity .
ho:Other rdfs:subClassOf ho:Activity .
:Episode a owl:Class .

# Events and situations
:Event a owl:Class ; skos:closeMatch sem:Event, event:Event .
:EndEvent rdfs:subClassOf :Event .
:Situation a owl:Class .
:State a owl:Class .
:StateType a owl:Class .
:Attribute a owl:Class .
:Object a owl:Class .
:Room rdfs:subClassOf :Object ; skos:closeMatch sem:Place .
:Character a owl:Class ; skos:closeMatch sem:Actor, event:Agent .
x3do:Shape a owl:Class .
vh2kg-an:Action a owl:Class .

# Event properties (number-based list, sequence pattern)
:hasEvent a owl:ObjectProperty ; rdfs:domain ho:Activity ; rdfs:range :Event ; skos:closeMatch sem:hasSubEvent .
:eventNumber a owl:DatatypeProperty ; rdfs:domain :Event ; rdfs:range xsd:int .
:action a owl:ObjectProperty ; rdfs:domain :Event ; rdfs:range vh2kg-an:Action .
ho:object a owl:ObjectProperty .
:mainObject a owl:ObjectProperty ; rdfs:subPropertyOf ho:object .
:targetObject a owl:ObjectProperty ; rdfs:subPropertyOf ho:object .
:agent a owl:ObjectProperty ; skos:closeMatch sem:hasActor, event:agent .
:place a owl:ObjectProperty ; rdfs:range :Room ; skos:closeMatch sem:hasPlace, event:place .
:from a owl:ObjectProperty ; rdfs:range :Room .
:to a owl:ObjectProperty ; rdfs:range :Room .
:previousEvent a owl:ObjectProperty ; owl:inverseOf :nextEvent .
:nextEvent a owl:ObjectProperty .
:situationBeforeEvent a owl:ObjectProperty ; rdfs:domain :Event ; rdfs:range :Situation .
:situationAfterEvent a owl:ObjectProperty ; rdfs:domain :Event ; rdfs:range :Situation .
:time a owl:DatatypeProperty ; rdfs:comment "Duration in seconds (xsd:decimal)." ; skos:closeMatch time:hasDuration .
:virtualHome a owl:ObjectProperty .

# States
:partOf a owl:ObjectProperty ; rdfs:domain :State ; rdfs:range :Situation .
:isStateOf a owl:ObjectProperty ; rdfs:domain :State ; rdfs:range :Object .
:state a owl:ObjectProperty ; rdfs:domain :State ; rdfs:range :StateType .
:nextState a owl:ObjectProperty ; owl:inverseOf :previousState .
:previousState a owl:ObjectProperty .
:bbox a owl:ObjectProperty ; rdfs:domain :State ; rdfs:range x3do:Shape .
x3do:bboxCenter a owl:ObjectProperty ; rdfs:range rdf:List .
x3do:bboxSize a owl:ObjectProperty ; rdfs:range rdf:List .

# Objects
:affords a owl:ObjectProperty ; rdfs:domain :Object ; rdfs:range vh2kg-an:Action .
:attribute a owl:ObjectProperty ; rdfs:domain :Object ; rdfs:range :Attribute .
:height a owl:ObjectProperty .

# Fall risk
hra:RiskActivity rdfs:subClassOf ho:Activity .
hra:RiskEvent rdfs:subClassOf :Event .
hra:DoSomethingToHighPositionObject rdfs:subClassOf hra:RiskEvent .
hra:GrabLowPositionObject rdfs:subClassOf hra:RiskEvent .
hra:riskFactor a owl:ObjectProperty ; rdfs:domain hra:RiskActivity ; rdfs:range hra:RiskEvent .
)TTL";

}  // namespace vh2kg
