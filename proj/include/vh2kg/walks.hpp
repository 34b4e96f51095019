#pragma once

// Graph walks over a KG for RDF2Vec-style embedding, with optional
// Weisfeiler-Lehman relabeling of walk vertices.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "vh2kg/error.hpp"
#include "vh2kg/kg.hpp"
#include "vh2kg/rdf.hpp"

namespace vh2kg {

struct WalkConfig {
  int depth = 8;
  int walksPerEntity = 100;
  int wlIterations = 6;
  std::set<std::string> skipPredicates = {vocab::kAgent, vocab::kHasActivity, vocab::kVirtualHome,
                                          vocab::kPartOf, vocab::kPreviousEvent};
  std::vector<std::string> roots;  // full IRIs; empty selects activity instances
  std::uint64_t seed = 42;
  bool exhaustive = false;    // enumerate every walk instead of sampling (depth <= 3)
  bool canonicalize = false;  // strip instance suffixes from non-root tokens
  unsigned jobs = 1;

  void validate() const {
    if (depth < 1) throw Error(ErrorCode::MalformedDocument, "walk depth must be >= 1");
    if (walksPerEntity < 1) throw Error(ErrorCode::MalformedDocument, "walksPerEntity must be >= 1");
    if (wlIterations < 0) throw Error(ErrorCode::MalformedDocument, "wlIterations must be >= 0");
    if (exhaustive && depth > 3) throw Error(ErrorCode::MalformedDocument, "exhaustive walks require depth <= 3");
  }
};

using Walk = std::vector<std::string>;

struct WalkCorpus {
  std::vector<Walk> sequences;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& w : sequences) n += w.size();
    return n;
  }
};

/// Walk token for a term: prefixed name for IRIs, `_:label` for blank nodes,
/// and the lexical form (whitespace replaced by '_') for literals.
inline std::string walk_token(const rdf::Term& t) {
  if (t.is_blank()) return "_:" + t.value;
  if (t.is_iri()) return rdf::compact(t, rdf::default_prefixes());
  std::string out = t.value;
  for (auto& c : out) {
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  }
  return out.empty() ? std::string("\"\"") : out;
}

/// "ex:event3_brush_teeth0_scene1" -> "ex:event3_brush_teeth".
inline std::string canonicalize_token(const std::string& token) {
  if (!token.starts_with("ex:") && !token.starts_with("_:")) return token;
  static const std::regex suffix(R"(\d*_scene[A-Za-z0-9-]*)");
  return std::regex_replace(token, suffix, "");
}

/// Vertices and non-skipped outgoing edges, with iteration-0 labels.
struct WalkGraph {
  std::vector<rdf::Term> terms;
  std::vector<std::string> labels;
  std::vector<std::vector<std::pair<std::string, std::size_t>>> out;  // (predicate token, target)
  std::map<rdf::Term, std::size_t> index;

  std::size_t vertex(const rdf::Term& t) {
    auto [it, inserted] = index.try_emplace(t, terms.size());
    if (inserted) {
      terms.push_back(t);
      labels.push_back(walk_token(t));
      out.emplace_back();
    }
    return it->second;
  }
  std::optional<std::size_t> find(const rdf::Term& t) const {
    auto it = index.find(t);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

inline WalkGraph build_walk_graph(const rdf::KgDocument& kg, const std::set<std::string>& skip) {
  WalkGraph g;
  for (const auto& t : kg.triples) {
    const std::size_t s = g.vertex(t.subject);
    const std::size_t o = g.vertex(t.object);
    if (!skip.contains(t.predicate.value)) g.out[s].emplace_back(walk_token(t.predicate), o);
  }
  return g;
}

/// Instances typed by an activity category class, sorted.
inline std::vector<rdf::Term> activity_roots(const rdf::KgDocument& kg) {
  std::set<std::string> categories;
  for (auto name : kCategoryNames) categories.insert(std::string(rdf::ns::kHo) + std::string(name));
  std::set<rdf::Term> roots;
  for (const auto& t : kg.triples) {
    if (t.predicate.value == vocab::kType && categories.contains(t.object.value)) roots.insert(t.subject);
  }
  return {roots.begin(), roots.end()};
}

inline std::vector<rdf::Term> select_roots(const rdf::KgDocument& kg, const WalkConfig& cfg) {
  std::vector<rdf::Term> roots;
  if (cfg.roots.empty()) {
    roots = activity_roots(kg);
  } else {
    for (const auto& r : cfg.roots) roots.push_back(rdf::iri(r));
  }
  if (roots.empty()) throw Error(ErrorCode::NoRoots, "no walk roots");
  return roots;
}

/// A walk as vertex indices; predicates are read back from the graph.
struct VertexWalk {
  std::vector<std::size_t> vertices;
  std::vector<std::string> predicates;
  auto operator<=>(const VertexWalk&) const = default;
};

namespace detail {

inline void enumerate_walks(const WalkGraph& g, VertexWalk& cur, int depth, std::vector<VertexWalk>& out) {
  const auto& edges = g.out[cur.vertices.back()];
  if (static_cast<int>(cur.predicates.size()) == depth || edges.empty()) {
    out.push_back(cur);
    return;
  }
  for (const auto& [p, o] : edges) {
    cur.predicates.push_back(p);
    cur.vertices.push_back(o);
    enumerate_walks(g, cur, depth, out);
    cur.predicates.pop_back();
    cur.vertices.pop_back();
  }
}

inline std::vector<VertexWalk> walks_from_root(const WalkGraph& g, std::size_t root, std::size_t rootOrdinal,
                                               const WalkConfig& cfg) {
  std::vector<VertexWalk> walks;
  if (cfg.exhaustive) {
    VertexWalk cur{{root}, {}};
    enumerate_walks(g, cur, cfg.depth, walks);
    return walks;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(rootOrdinal)};
  std::mt19937_64 rng(seq);
  std::set<VertexWalk> seen;
  for (int w = 0; w < cfg.walksPerEntity; ++w) {
    VertexWalk cur{{root}, {}};
    for (int hop = 0; hop < cfg.depth; ++hop) {
      const auto& edges = g.out[cur.vertices.back()];
      if (edges.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
      const auto& [p, o] = edges[pick(rng)];
      cur.predicates.push_back(p);
      cur.vertices.push_back(o);
    }
    if (seen.insert(cur).second) walks.push_back(std::move(cur));
  }
  return walks;
}

}  // namespace detail

/// Structural walks per root, in root order. Per-root generators make the
/// result independent of `cfg.jobs`.
inline std::vector<VertexWalk> sample_vertex_walks(const WalkGraph& g, const std::vector<rdf::Term>& roots,
                                                   const WalkConfig& cfg) {
  cfg.validate();
  std::vector<std::size_t> rootIds;
  for (const auto& r : roots) {
    auto id = g.find(r);
    if (!id) throw Error(ErrorCode::NoRoots, "root not in graph: " + r.value);
    rootIds.push_back(*id);
  }
  std::vector<std::vector<VertexWalk>> perRoot(rootIds.size());
  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(rootIds.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < rootIds.size(); ++i) perRoot[i] = detail::walks_from_root(g, rootIds[i], i, cfg);
  } else {
    std::vector<std::thread> workers;
    for (unsigned j = 0; j < jobs; ++j) {
      workers.emplace_back([&, j] {
        for (std::size_t i = j; i < rootIds.size(); i += jobs) perRoot[i] = detail::walks_from_root(g, rootIds[i], i, cfg);
      });
    }
    for (auto& w : workers) w.join();
  }
  std::vector<VertexWalk> all;
  for (auto& v : perRoot) all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  return all;
}

/// Renders walks with per-vertex labels. The root keeps its own token.
inline WalkCorpus render_walks(const WalkGraph& g, const std::vector<VertexWalk>& walks,
                               const std::vector<std::string>& labels) {
  WalkCorpus corpus;
  corpus.sequences.reserve(walks.size());
  for (const auto& w : walks) {
    Walk seq;
    seq.push_back(g.labels[w.vertices[0]]);
    for (std::size_t i = 0; i < w.predicates.size(); ++i) {
      seq.push_back(w.predicates[i]);
      seq.push_back(labels[w.vertices[i + 1]]);
    }
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

inline std::vector<std::string> base_labels(const WalkGraph& g, bool canonicalize) {
  if (!canonicalize) return g.labels;
  std::vector<std::string> labels;
  labels.reserve(g.labels.size());
  for (const auto& l : g.labels) labels.push_back(canonicalize_token(l));
  return labels;
}

inline WalkCorpus extract_walks(const rdf::KgDocument& kg, const WalkConfig& cfg) {
  cfg.validate();
  const WalkGraph g = build_walk_graph(kg, cfg.skipPredicates);
  const auto walks = sample_vertex_walks(g, select_roots(kg, cfg), cfg);
  return render_walks(g, walks, base_labels(g, cfg.canonicalize));
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// WL label tables for iterations 0..h. A label at iteration i hashes the
/// vertex's previous label with the sorted multiset of (predicate, neighbor
/// label) pairs over its outgoing edges.
inline std::vector<std::vector<std::string>> wl_labels(const WalkGraph& g, std::vector<std::string> initial, int h) {
  std::vector<std::vector<std::string>> tables;
  tables.push_back(std::move(initial));
  for (int i = 1; i <= h; ++i) {
    const auto& prev = tables.back();
    std::vector<std::string> next(prev.size());
    for (std::size_t v = 0; v < prev.size(); ++v) {
      std::vector<std::string> neigh;
      neigh.reserve(g.out[v].size());
      for (const auto& [p, o] : g.out[v]) neigh.push_back(p + '\x1f' + prev[o]);
      std::sort(neigh.begin(), neigh.end());
      std::string key = prev[v];
      for (const auto& n : neigh) key += '\x1e' + n;
      char buf[40];
      std::snprintf(buf, sizeof buf, "wl%d_%016llx", i, static_cast<unsigned long long>(fnv1a(key)));
      next[v] = buf;
    }
    tables.push_back(std::move(next));
  }
  return tables;
}

/// Union of walk corpora relabeled at iterations 0..h over one set of sampled walk structures.
inline WalkCorpus wl_relabel(const rdf::KgDocument& kg, const WalkConfig& cfg) {
  cfg.validate();
  const WalkGraph g = build_walk_graph(kg, cfg.skipPredicates);
  const auto walks = sample_vertex_walks(g, select_roots(kg, cfg), cfg);
  WalkCorpus corpus;
  for (const auto& labels : wl_labels(g, base_labels(g, cfg.canonicalize), cfg.wlIterations)) {
    auto part = render_walks(g, walks, labels);
    corpus.sequences.insert(corpus.sequences.end(), std::make_move_iterator(part.sequences.begin()),
                            std::make_move_iterator(part.sequences.end()));
  }
  return corpus;
}

/// One walk per line, tokens separated by spaces.
inline std::string serialize_walks(const WalkCorpus& corpus) {
  std::string out;
  for (const auto& w : corpus.sequences) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) out += ' ';
      out += w[i];
    }
    out += '\n';
  }
  return out;
}

inline WalkCorpus parse_walks(std::string_view text) {
  WalkCorpus corpus;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    Walk w;
    std::size_t p = 0;
    while (p < line.size()) {
      auto sp = line.find(' ', p);
      if (sp == std::string_view::npos) sp = line.size();
      if (sp > p) w.emplace_back(line.substr(p, sp - p));
      p = sp + 1;
    }
    if (!w.empty()) corpus.sequences.push_back(std::move(w));
    start = nl + 1;
  }
  return corpus;
}

}  // namespace vh2kg
