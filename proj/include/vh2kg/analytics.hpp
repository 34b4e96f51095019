#pragma once

// Aggregations over activity KGs and detection metrics.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vh2kg/error.hpp"
#include "vh2kg/kg.hpp"
#include "vh2kg/rdf.hpp"
#include "vh2kg/risk.hpp"
#include "vh2kg/walks.hpp"

namespace vh2kg {

using Ranking = std::vector<std::pair<std::string, std::size_t>>;

namespace detail {

inline Ranking rank_counts(const std::map<std::string, std::size_t>& counts) {
  Ranking r(counts.begin(), counts.end());
  std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return r;
}

inline std::string label_of(const rdf::KgIndex& idx, const rdf::Term& t) {
  if (const auto* l = idx.object(t, vocab::kLabel)) return l->value;
  return walk_token(t);
}

}  // namespace detail

/// Grab events per grabbed object class, descending, ties alphabetical.
inline Ranking grab_frequency(const rdf::KgDocument& kg) {
  const rdf::KgIndex idx(kg);
  const rdf::Term grab = vocab::action("grab");
  std::map<std::string, std::size_t> counts;
  for (const auto* event : idx.subjects(vocab::kAction, grab)) {
    if (const auto* obj = idx.object(*event, vocab::kMainObject)) ++counts[detail::label_of(idx, *obj)];
  }
  return detail::rank_counts(counts);
}

/// nextState transitions per object class. By default only transitions that
/// change the state-token set count; `includeCoordinates` counts every one.
inline Ranking state_change_frequency(const rdf::KgDocument& kg, bool includeCoordinates = false) {
  const rdf::KgIndex idx(kg);
  std::map<std::string, std::size_t> counts;
  auto tokens = [&](const rdf::Term& state) {
    std::set<std::string> s;
    for (const auto* t : idx.objects(state, vocab::kState)) s.insert(t->value);
    return s;
  };
  for (const auto* state : idx.subjects_with(vocab::kIsStateOf)) {
    const auto* object = idx.object(*state, vocab::kIsStateOf);
    const std::string label = detail::label_of(idx, *object);
    auto& c = counts[label];
    const auto* next = idx.object(*state, vocab::kNextState);
    if (next && (includeCoordinates || tokens(*state) != tokens(*next))) ++c;
  }
  return detail::rank_counts(counts);
}

struct ActivityDuration {
  std::string activityIri;
  std::string label;
  double seconds = 0;
};

/// Sum of event durations per activity, optionally restricted to one category, descending.
inline std::vector<ActivityDuration> duration_by_activity(const rdf::KgDocument& kg,
                                                          std::optional<Category> category = std::nullopt) {
  const rdf::KgIndex idx(kg);
  std::vector<ActivityDuration> out;
  for (const auto* activity : idx.subjects_with(vocab::kHasEvent)) {
    if (category && !idx.has(*activity, vocab::kType, rdf::iri(vocab::category_iri(*category)))) continue;
    ActivityDuration d{activity->value, detail::label_of(idx, *activity), 0.0};
    for (const auto* event : idx.objects(*activity, vocab::kHasEvent)) {
      const auto* t = idx.object(*event, vocab::kTime);
      if (!t || !rdf::numeric_value(*t)) throw Error(ErrorCode::MissingDurations, event->value);
      d.seconds += *rdf::numeric_value(*t);
    }
    out.push_back(std::move(d));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.seconds > b.seconds; });
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

struct ConfusionMatrix {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Prf1 {
  double precision = 0, recall = 0, f1 = 0;
};

inline Prf1 prf1(const ConfusionMatrix& cm) {
  Prf1 r;
  r.precision = cm.tp + cm.fp ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp) : 0.0;
  r.recall = cm.tp + cm.fn ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn) : 0.0;
  // Same value as 2PR/(P+R) but from counts, so simple ratios come out exact.
  r.f1 = cm.tp ? static_cast<double>(2 * cm.tp) / static_cast<double>(2 * cm.tp + cm.fp + cm.fn) : 0.0;
  return r;
}

/// Event IRI -> annotated rule.
using GroundTruth = std::map<std::string, RuleId>;

/// `event_iri,risk_type` lines; a header row and blank lines are skipped.
/// IRIs may use the `ex:` prefix.
inline GroundTruth parse_ground_truth(std::string_view csv) {
  GroundTruth gt;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("event_iri")) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::MalformedDocument, "ground truth line " + std::to_string(lineNo));
    std::string iri = line.substr(0, comma);
    if (iri.starts_with("ex:")) iri = std::string(rdf::ns::kEx) + iri.substr(3);
    auto rule = parse_rule_id(line.substr(comma + 1));
    if (!rule) throw Error(ErrorCode::MalformedDocument, "risk type on line " + std::to_string(lineNo));
    gt[iri] = *rule;
  }
  return gt;
}

/// Every :Event instance in the document.
inline std::set<std::string> all_events(const rdf::KgDocument& kg) {
  std::set<std::string> events;
  for (const auto& t : kg.triples) {
    if (t.predicate.value == vocab::kType && t.object.value == vocab::kEvent) events.insert(t.subject.value);
  }
  return events;
}

/// Event-level confusion. An event counts as flagged if any rule fired on it.
inline ConfusionMatrix confusion(const std::vector<RiskFinding>& findings, const GroundTruth& gt,
                                 const std::set<std::string>& allEvents) {
  std::set<std::string> flagged;
  for (const auto& f : findings) flagged.insert(f.eventIri);
  for (const auto& e : flagged) {
    if (!allEvents.contains(e)) throw Error(ErrorCode::EventNotInCorpus, e);
  }
  for (const auto& [e, rule] : gt) {
    if (!allEvents.contains(e)) throw Error(ErrorCode::EventNotInCorpus, e);
  }
  ConfusionMatrix cm;
  for (const auto& e : allEvents) {
    const bool f = flagged.contains(e), g = gt.contains(e);
    if (f && g) ++cm.tp;
    else if (f) ++cm.fp;
    else if (g) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

// ---------------------------------------------------------------------------
// Reports

/// Left-aligned columns separated by two spaces.
inline std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out += cells[i];
      if (i + 1 < cells.size()) out += std::string(width[i] - cells[i].size() + 2, ' ');
    }
    return out + "\n";
  };
  std::string out = line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  out += line(rule);
  for (const auto& r : rows) out += line(r);
  return out;
}

inline std::string ranking_table(const std::string& keyHeader, const Ranking& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [k, n] : r) rows.push_back({k, std::to_string(n)});
  return format_table({keyHeader, "count"}, rows);
}

inline std::string duration_table(const std::vector<ActivityDuration>& d) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& a : d) rows.push_back({a.label, rdf::format_decimal(a.seconds)});
  return format_table({"activity", "seconds"}, rows);
}

inline nlohmann::json ranking_json(const Ranking& r) {
  auto arr = nlohmann::json::array();
  for (const auto& [k, n] : r) arr.push_back({{"class", k}, {"count", n}});
  return arr;
}

inline nlohmann::json metrics_json(const ConfusionMatrix& cm) {
  const auto m = prf1(cm);
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn},
          {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

/// Rankings for the whole corpus plus, when given, detection metrics.
inline nlohmann::json analytics_report(const rdf::KgDocument& kg, std::optional<ConfusionMatrix> cm = std::nullopt,
                                       bool includeCoordinates = false) {
  nlohmann::json j;
  j["grab_frequency"] = ranking_json(grab_frequency(kg));
  j["state_change_frequency"] = ranking_json(state_change_frequency(kg, includeCoordinates));
  auto durations = nlohmann::json::array();
  for (const auto& d : duration_by_activity(kg, Category::Leisure))
    durations.push_back({{"activity", d.activityIri}, {"label", d.label}, {"seconds", d.seconds}});
  j["leisure_durations"] = std::move(durations);
  if (cm) j["metrics"] = metrics_json(*cm);
  return j;
}

}  // namespace vh2kg
