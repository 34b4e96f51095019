#pragma once

// Structural checks on one activity KG, computed from raw triples only.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vh2kg/vh2kg.hpp"

namespace vh2kg::test {

struct TripleView {
  std::map<std::string, std::multimap<std::string, rdf::Term>> out;

  explicit TripleView(const rdf::KgDocument& kg) {
    for (const auto& t : kg.triples) out[t.subject.value].emplace(t.predicate.value, t.object);
  }
  std::vector<rdf::Term> all(const std::string& s, const std::string& p) const {
    std::vector<rdf::Term> r;
    auto it = out.find(s);
    if (it == out.end()) return r;
    auto [lo, hi] = it->second.equal_range(p);
    for (auto i = lo; i != hi; ++i) r.push_back(i->second);
    return r;
  }
  std::string one(const std::string& s, const std::string& p) const {
    const auto r = all(s, p);
    return r.size() == 1 ? r[0].value : std::string{};
  }
  std::vector<double> list(const std::string& head) const {
    std::vector<double> v;
    std::string cur = head;
    while (!cur.empty() && cur != vocab::kNil && v.size() < 16) {
      const auto first = all(cur, vocab::kFirst);
      if (first.size() != 1) break;
      v.push_back(std::stod(first[0].value));
      cur = one(cur, vocab::kRest);
    }
    return v;
  }
};

/// Empty on success; otherwise one message per violated property.
inline std::vector<std::string> kg_structure_violations(const rdf::KgDocument& kg, const Trace& trace) {
  using namespace vocab;
  std::vector<std::string> bad;
  const TripleView v(kg);

  std::string activity;
  for (const auto& t : kg.triples)
    if (t.predicate.value == kHasEvent) activity = t.subject.value;
  if (activity.empty()) return {"no activity"};

  std::map<long, std::string> byNumber;
  for (const auto& e : v.all(activity, kHasEvent)) {
    const auto n = v.one(e.value, kEventNumber);
    if (n.empty()) bad.push_back("event without number " + e.value);
    else if (!byNumber.emplace(std::stol(n), e.value).second) bad.push_back("duplicate event number " + n);
  }
  const long count = static_cast<long>(trace.transitions.size());
  if (static_cast<long>(byNumber.size()) != count) bad.push_back("event count mismatch");
  long expect = 0;
  for (const auto& [n, e] : byNumber) {
    if (n != expect++) bad.push_back("event numbers not contiguous at " + std::to_string(n));
  }

  for (auto it = byNumber.begin(); it != byNumber.end(); ++it) {
    auto next = std::next(it);
    if (next == byNumber.end()) break;
    const auto after = v.one(it->second, kSituationAfter);
    if (after.empty() || after != v.one(next->second, kSituationBefore))
      bad.push_back("situation chain broken after event " + std::to_string(it->first));
  }

  std::size_t endEvents = 0;
  std::string endEvent;
  for (const auto& t : kg.triples) {
    if (t.predicate.value == kType && t.object.value == kEndEvent) {
      ++endEvents;
      endEvent = t.subject.value;
    }
  }
  if (endEvents != 1) bad.push_back("EndEvent count " + std::to_string(endEvents));
  else if (!byNumber.empty() && endEvent != byNumber.rbegin()->second) bad.push_back("EndEvent is not the last event");

  // One State per (object, situation).
  std::set<std::string> situations;
  for (const auto& [n, e] : byNumber) {
    situations.insert(v.one(e, kSituationBefore));
    situations.insert(v.one(e, kSituationAfter));
  }
  std::set<std::string> objects;
  for (const auto& t : kg.triples) {
    if (t.predicate.value == kType &&
        (t.object.value == kObject || t.object.value == kRoom || t.object.value == kCharacter))
      objects.insert(t.subject.value);
  }
  std::map<std::pair<std::string, std::string>, int> perPair;
  std::map<std::string, std::string> stateOwner;
  for (const auto& t : kg.triples) {
    if (t.predicate.value == kIsStateOf) stateOwner[t.subject.value] = t.object.value;
  }
  for (const auto& t : kg.triples) {
    if (t.predicate.value == kPartOf) ++perPair[{stateOwner[t.subject.value], t.object.value}];
  }
  for (const auto& o : objects) {
    for (const auto& s : situations) {
      const auto it = perPair.find({o, s});
      const int n = it == perPair.end() ? 0 : it->second;
      if (n != 1) bad.push_back("object " + o + " has " + std::to_string(n) + " states in " + s);
    }
  }

  // Consecutive states of one object differ in tokens or geometry.
  auto signature = [&](const std::string& state) {
    std::set<std::string> tokens;
    for (const auto& t : v.all(state, kState)) tokens.insert(t.value);
    std::vector<double> geom;
    const auto shape = v.one(state, kBbox);
    if (!shape.empty()) {
      for (auto x : v.list(v.one(shape, kBboxCenter))) geom.push_back(x);
      for (auto x : v.list(v.one(shape, kBboxSize))) geom.push_back(x);
    }
    return std::make_pair(tokens, geom);
  };
  for (const auto& [state, owner] : stateOwner) {
    const auto next = v.one(state, kNextState);
    if (!next.empty() && signature(state) == signature(next))
      bad.push_back("redundant state " + next);
    if (!next.empty() && v.one(next, kPreviousState) != state) bad.push_back("previousState missing for " + next);
  }

  // Minimality against the trace: states per object = 1 + number of changes.
  for (const auto& node0 : trace.situations.front().graph.nodes) {
    std::size_t expected = 1;
    for (std::size_t i = 1; i < trace.situations.size(); ++i) {
      const auto* a = trace.situations[i - 1].graph.find(node0.id);
      const auto* b = trace.situations[i].graph.find(node0.id);
      if (a->states != b->states || a->bbox != b->bbox || a->affordances != b->affordances) ++expected;
    }
    const std::string scene = IriFactory::scene_label(trace.situations.front().graph.sceneId);
    const std::string ownerIri = std::string(rdf::ns::kEx) +
                                 (node0.isAgent ? "character1" : node0.className + std::to_string(node0.id)) + "_" +
                                 scene;
    std::size_t owned = 0;
    for (const auto& [state, owner] : stateOwner) owned += owner == ownerIri;
    if (owned != expected)
      bad.push_back("object " + std::to_string(node0.id) + " has " + std::to_string(owned) + " states, expected " +
                    std::to_string(expected));
  }

  // Durations.
  double sum = 0;
  for (const auto& [n, e] : byNumber) sum += std::stod(v.one(e, kTime));
  const double total = std::stod(v.one(activity, kTime));
  if (std::abs(sum - total) > 1e-9) bad.push_back("durations do not sum to activity time");
  if (std::abs(total - trace.total_seconds()) > 1e-9) bad.push_back("activity time differs from trace");

  // N-Triples round trip.
  if (rdf::parse_ntriples(rdf::serialize_ntriples(kg)).triples != kg.triples) bad.push_back("N-Triples round trip");
  return bad;
}

}  // namespace vh2kg::test
