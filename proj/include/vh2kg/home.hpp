#pragma once

// The home scene as a graph of objects and spatial relations, plus the
// attribute/affordance classification of object properties.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vh2kg/error.hpp"
#include "vh2kg/script.hpp"

namespace vh2kg {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
};

inline double distance(Vec3 a, Vec3 b) {
  const Vec3 d = a - b;
  return std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
}

inline double horizontal_distance(Vec3 a, Vec3 b) { return std::hypot(a.x - b.x, a.z - b.z); }

/// Axis-aligned box in meters; y is vertical.
struct BoundingBox {
  Vec3 center;
  Vec3 size;

  double top() const { return center.y + 0.5 * size.y; }
  bool contains_horizontal(Vec3 p) const {
    return std::abs(p.x - center.x) <= 0.5 * size.x && std::abs(p.z - center.z) <= 0.5 * size.z;
  }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class Relation { Inside, On, Close, Facing, HoldsRh, HoldsLh };

inline constexpr std::array<std::pair<Relation, std::string_view>, 6> kRelationNames = {{
    {Relation::Inside, "INSIDE"},
    {Relation::On, "ON"},
    {Relation::Close, "CLOSE"},
    {Relation::Facing, "FACING"},
    {Relation::HoldsRh, "HOLDS_RH"},
    {Relation::HoldsLh, "HOLDS_LH"},
}};

inline std::string_view to_string(Relation r) {
  for (const auto& [rel, name] : kRelationNames) {
    if (rel == r) return name;
  }
  return "?";
}

inline std::optional<Relation> parse_relation(std::string_view name) {
  for (const auto& [rel, n] : kRelationNames) {
    if (n == name) return rel;
  }
  return std::nullopt;
}

struct RelationEdge {
  std::int64_t fromId = 0;
  std::int64_t toId = 0;
  Relation relation = Relation::Close;

  friend auto operator<=>(const RelationEdge&, const RelationEdge&) = default;
};

using TokenSet = std::set<std::string, std::less<>>;

/// Seed of the open state vocabulary; scenes may use tokens outside it.
inline const TokenSet& seed_state_tokens() {
  static const TokenSet tokens = {"ON",       "OFF",       "OPEN",        "CLOSED",   "CLEAN",   "DIRTY",
                                  "PLUGGED_IN", "PLUGGED_OUT", "SITTING", "STANDING", "LYING"};
  return tokens;
}

struct ObjectNode {
  std::int64_t id = 0;
  std::string className;
  std::string category;
  bool isRoom = false;
  bool isAgent = false;
  TokenSet states;
  TokenSet properties;
  std::optional<BoundingBox> bbox;
  std::optional<double> heightMeters;  // bbox.size.y, fixed at load time
  TokenSet affordances;                // verbs, derived from properties and affordance data

  friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

struct EnvironmentGraph {
  std::string sceneId;
  std::vector<ObjectNode> nodes;
  std::vector<RelationEdge> edges;

  const ObjectNode* find(std::int64_t id) const {
    for (const auto& n : nodes) {
      if (n.id == id) return &n;
    }
    return nullptr;
  }
  ObjectNode* find(std::int64_t id) {
    for (auto& n : nodes) {
      if (n.id == id) return &n;
    }
    return nullptr;
  }
  const ObjectNode& agent() const {
    for (const auto& n : nodes) {
      if (n.isAgent) return n;
    }
    throw Error(ErrorCode::NoAgent, "environment has no agent node");
  }
  ObjectNode& agent() {
    return const_cast<ObjectNode&>(static_cast<const EnvironmentGraph&>(*this).agent());
  }
  bool has_edge(std::int64_t from, Relation rel, std::int64_t to) const {
    return std::find(edges.begin(), edges.end(), RelationEdge{from, to, rel}) != edges.end();
  }
  /// Room a node is INSIDE, if any.
  std::optional<std::int64_t> room_of(std::int64_t id) const {
    for (const auto& e : edges) {
      if (e.fromId == id && e.relation == Relation::Inside) {
        if (const auto* r = find(e.toId); r && r->isRoom) return r->id;
      }
    }
    return std::nullopt;
  }

  friend bool operator==(const EnvironmentGraph&, const EnvironmentGraph&) = default;
};

// ---------------------------------------------------------------------------
// Property classification

enum class PropertyKind { Attribute, Affordance };

struct PropertyClass {
  std::string token;
  PropertyKind kind = PropertyKind::Attribute;
  TokenSet affordedVerbs;  // non-empty iff kind == Affordance

  friend bool operator==(const PropertyClass&, const PropertyClass&) = default;
};

using PropertyTable = std::map<std::string, PropertyClass, std::less<>>;

/// Token -> kind -> verbs. Also shipped as data/properties.csv.
inline const PropertyTable& default_property_table() {
  static const PropertyTable table = [] {
    PropertyTable t;
    auto aff = [&t](std::string token, TokenSet verbs) {
      t[token] = PropertyClass{token, PropertyKind::Affordance, std::move(verbs)};
    };
    auto attr = [&t](std::string token) { t[token] = PropertyClass{token, PropertyKind::Attribute, {}}; };
    aff("GRABBABLE", {"grab"});
    aff("HAS_SWITCH", {"switchOn", "switchOff"});
    aff("CAN_OPEN", {"open", "close"});
    aff("SITTABLE", {"sit"});
    aff("LIEABLE", {"lie"});
    aff("DRINKABLE", {"drink"});
    aff("READABLE", {"read"});
    aff("LOOKABLE", {"lookAt", "watch"});
    aff("POURABLE", {"pour"});
    for (const char* a : {"CLOTHES", "MOVABLE", "SURFACES", "CONTAINERS", "RECIPIENT", "HAS_PLUG", "EATABLE",
                          "CUTTABLE", "CREAM", "COVER_OBJECT", "BODY_PART", "HANGABLE", "HAS_PAPER",
                          "PERSON"}) {
      attr(a);
    }
    return t;
  }();
  return table;
}

inline PropertyClass classify_property(std::string_view token, const PropertyTable& table = default_property_table()) {
  auto it = table.find(token);
  if (it == table.end()) throw Error(ErrorCode::UnknownProperty, std::string(token));
  return it->second;
}

/// CSV `token,kind,verbs` with verbs separated by ';'. Header line optional.
inline PropertyTable parse_property_table(std::string_view csv) {
  PropertyTable table;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("token,")) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() < 2) throw Error(ErrorCode::MalformedDocument, "properties line " + std::to_string(lineNo));
    PropertyClass pc;
    pc.token = cols[0];
    if (cols[1] == "Affordance") {
      pc.kind = PropertyKind::Affordance;
    } else if (cols[1] != "Attribute") {
      throw Error(ErrorCode::MalformedDocument, "properties line " + std::to_string(lineNo) + ": kind " + cols[1]);
    }
    if (cols.size() > 2) {
      std::stringstream vs(cols[2]);
      std::string v;
      while (std::getline(vs, v, ';')) {
        if (!v.empty()) pc.affordedVerbs.insert(v);
      }
    }
    if ((pc.kind == PropertyKind::Affordance) == pc.affordedVerbs.empty())
      throw Error(ErrorCode::MalformedDocument, "properties line " + std::to_string(lineNo) + ": verbs/kind mismatch");
    table[pc.token] = std::move(pc);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Crowdsourced affordance scores

struct AffordanceRecord {
  std::string objectClass;
  std::string verb;
  std::vector<double> raterScores;

  double mean() const {
    if (raterScores.empty()) return 0.0;
    return std::accumulate(raterScores.begin(), raterScores.end(), 0.0) / static_cast<double>(raterScores.size());
  }
};

using AffordanceTable = std::map<std::string, TokenSet, std::less<>>;

inline constexpr double kDefaultAffordanceThreshold = 4.0;

/// CSV `object_class,verb,s1,...,s5`. Rows with fewer than five scores are kept
/// and reported in `warnings`.
inline std::vector<AffordanceRecord> parse_affordance_csv(std::string_view csv,
                                                          std::vector<std::string>* warnings = nullptr) {
  std::vector<AffordanceRecord> records;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("object_class")) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() < 3) throw Error(ErrorCode::MalformedDocument, "affordance line " + std::to_string(lineNo));
    AffordanceRecord rec{cols[0], cols[1], {}};
    for (std::size_t i = 2; i < cols.size(); ++i) {
      if (cols[i].empty()) continue;
      try {
        rec.raterScores.push_back(std::stod(cols[i]));
      } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedDocument, "affordance line " + std::to_string(lineNo) + ": score " + cols[i]);
      }
    }
    if (rec.raterScores.size() < 5 && warnings) {
      warnings->push_back("affordance line " + std::to_string(lineNo) + ": only " +
                          std::to_string(rec.raterScores.size()) + " scores");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

/// Keeps (class, verb) pairs whose mean rater score reaches `threshold`.
inline AffordanceTable filter_affordances(const std::vector<AffordanceRecord>& records,
                                          double threshold = kDefaultAffordanceThreshold) {
  if (!(threshold >= 1.0 && threshold <= 5.0))
    throw Error(ErrorCode::ScoreOutOfRange, "threshold " + std::to_string(threshold));
  AffordanceTable table;
  for (const auto& r : records) {
    for (double s : r.raterScores) {
      if (!(s >= 1.0 && s <= 5.0))
        throw Error(ErrorCode::ScoreOutOfRange, r.objectClass + "/" + r.verb + " score " + std::to_string(s));
    }
    if (!r.raterScores.empty() && r.mean() >= threshold) table[r.objectClass].insert(r.verb);
  }
  return table;
}

/// Recomputes every node's affordance verbs from its properties and the scored table.
/// Properties absent from the classification table count as attributes.
inline void apply_affordances(EnvironmentGraph& env, const PropertyTable& props = default_property_table(),
                              const AffordanceTable& scored = {}) {
  for (auto& node : env.nodes) {
    node.affordances.clear();
    for (const auto& p : node.properties) {
      auto it = props.find(p);
      if (it != props.end() && it->second.kind == PropertyKind::Affordance)
        node.affordances.insert(it->second.affordedVerbs.begin(), it->second.affordedVerbs.end());
    }
    if (auto it = scored.find(node.className); it != scored.end())
      node.affordances.insert(it->second.begin(), it->second.end());
  }
}

inline TokenSet attributes_of(const ObjectNode& node, const PropertyTable& props = default_property_table()) {
  TokenSet out;
  for (const auto& p : node.properties) {
    auto it = props.find(p);
    if (it == props.end() || it->second.kind == PropertyKind::Attribute) out.insert(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Environment JSON

namespace detail {

inline Vec3 vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::MalformedDocument, "expected [x,y,z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline nlohmann::json vec3_to_json(Vec3 v) { return nlohmann::json::array({v.x, v.y, v.z}); }

}  // namespace detail

/// Checks node/edge invariants. Throws DuplicateId, DanglingEdge, NoAgent,
/// Orphan or MalformedDocument.
inline void validate_environment(const EnvironmentGraph& env) {
  std::set<std::int64_t> ids;
  std::size_t agents = 0;
  for (const auto& n : env.nodes) {
    if (n.id < 0) throw Error(ErrorCode::MalformedDocument, "negative id " + std::to_string(n.id));
    if (!ids.insert(n.id).second) throw Error(ErrorCode::DuplicateId, "id " + std::to_string(n.id));
    if (n.isAgent) ++agents;
    if (n.isRoom && !n.states.empty())
      throw Error(ErrorCode::MalformedDocument, "room " + std::to_string(n.id) + " has states");
    if (n.bbox && (n.bbox->size.x < 0 || n.bbox->size.y < 0 || n.bbox->size.z < 0))
      throw Error(ErrorCode::MalformedDocument, "negative size on " + std::to_string(n.id));
    for (const auto& s : n.states) {
      if (s.empty() || std::any_of(s.begin(), s.end(), [](char c) { return std::islower(static_cast<unsigned char>(c)); }))
        throw Error(ErrorCode::MalformedDocument, "state token '" + s + "' on " + std::to_string(n.id));
    }
  }
  if (agents == 0) throw Error(ErrorCode::NoAgent, "no node has is_agent=true");
  if (agents > 1) throw Error(ErrorCode::NoAgent, "more than one agent node");
  if (!env.agent().heightMeters || *env.agent().heightMeters <= 0)
    throw Error(ErrorCode::MalformedDocument, "agent has no positive height");

  for (const auto& e : env.edges) {
    if (!ids.contains(e.fromId) || !ids.contains(e.toId))
      throw Error(ErrorCode::DanglingEdge,
                  std::to_string(e.fromId) + " " + std::string(to_string(e.relation)) + " " + std::to_string(e.toId));
  }
  for (const auto& n : env.nodes) {
    if (n.isRoom) continue;
    std::size_t rooms = 0;
    for (const auto& e : env.edges) {
      if (e.fromId == n.id && e.relation == Relation::Inside && env.find(e.toId)->isRoom) ++rooms;
    }
    if (rooms != 1)
      throw Error(ErrorCode::Orphan, n.className + " " + std::to_string(n.id) + " is INSIDE " +
                                         std::to_string(rooms) + " rooms");
  }
}

inline EnvironmentGraph environment_from_json(const nlohmann::json& doc,
                                              const PropertyTable& props = default_property_table()) {
  EnvironmentGraph env;
  std::map<std::int64_t, TokenSet> storedAffordances;
  try {
    env.sceneId = doc.at("scene_id").get<std::string>();
    for (const auto& jn : doc.at("nodes")) {
      ObjectNode n;
      n.id = jn.at("id").get<std::int64_t>();
      n.className = jn.at("class_name").get<std::string>();
      n.category = jn.value("category", std::string{});
      n.isRoom = jn.value("is_room", false);
      n.isAgent = jn.value("is_agent", false);
      for (const auto& s : jn.value("states", nlohmann::json::array())) n.states.insert(s.get<std::string>());
      for (const auto& p : jn.value("properties", nlohmann::json::array())) n.properties.insert(p.get<std::string>());
      if (jn.contains("bounding_box") && !jn["bounding_box"].is_null()) {
        const auto& bb = jn["bounding_box"];
        n.bbox = BoundingBox{detail::vec3_from_json(bb.at("center")), detail::vec3_from_json(bb.at("size"))};
        n.heightMeters = n.bbox->size.y;
      }
      if (jn.contains("affordances")) {
        auto& aff = storedAffordances[n.id];
        for (const auto& v : jn["affordances"]) aff.insert(v.get<std::string>());
      }
      env.nodes.push_back(std::move(n));
    }
    for (const auto& je : doc.at("edges")) {
      const auto relName = je.at("relation_type").get<std::string>();
      auto rel = parse_relation(relName);
      if (!rel) throw Error(ErrorCode::MalformedDocument, "relation " + relName);
      env.edges.push_back({je.at("from_id").get<std::int64_t>(), je.at("to_id").get<std::int64_t>(), *rel});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  validate_environment(env);
  apply_affordances(env, props);
  for (auto& n : env.nodes) {
    if (auto it = storedAffordances.find(n.id); it != storedAffordances.end()) n.affordances = it->second;
  }
  return env;
}

inline EnvironmentGraph load_environment(std::string_view text,
                                         const PropertyTable& props = default_property_table()) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  return environment_from_json(doc, props);
}

inline nlohmann::json node_to_json(const ObjectNode& n, bool withAffordances = false) {
  nlohmann::json jn;
  jn["id"] = n.id;
  jn["class_name"] = n.className;
  jn["category"] = n.category;
  jn["is_room"] = n.isRoom;
  jn["is_agent"] = n.isAgent;
  jn["states"] = std::vector<std::string>(n.states.begin(), n.states.end());
  jn["properties"] = std::vector<std::string>(n.properties.begin(), n.properties.end());
  if (n.bbox) {
    jn["bounding_box"] = {{"center", detail::vec3_to_json(n.bbox->center)},
                          {"size", detail::vec3_to_json(n.bbox->size)}};
  }
  if (withAffordances) jn["affordances"] = std::vector<std::string>(n.affordances.begin(), n.affordances.end());
  return jn;
}

/// `withAffordances` adds the derived verb set per node (used by trace export).
inline nlohmann::json environment_to_json(const EnvironmentGraph& env, bool withAffordances = false) {
  nlohmann::json doc;
  doc["scene_id"] = env.sceneId;
  doc["nodes"] = nlohmann::json::array();
  for (const auto& n : env.nodes) doc["nodes"].push_back(node_to_json(n, withAffordances));
  doc["edges"] = nlohmann::json::array();
  for (const auto& e : env.edges) {
    doc["edges"].push_back({{"from_id", e.fromId}, {"relation_type", std::string(to_string(e.relation))}, {"to_id", e.toId}});
  }
  return doc;
}

}  // namespace vh2kg
