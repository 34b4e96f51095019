#pragma once

// Minimal RDF model: terms, triples, a set-semantics document, N-Triples
// reading/writing and a Turtle writer with prefix compaction.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "vh2kg/error.hpp"

namespace vh2kg::rdf {

namespace ns {
inline constexpr std::string_view kEx = "http://example.org/virtualhome2kg/instance/";
inline constexpr std::string_view kVh = "http://example.org/virtualhome2kg/ontology/";
inline constexpr std::string_view kAction = "http://example.org/virtualhome2kg/ontology/action/";
inline constexpr std::string_view kHo = "http://example.org/virtualhome2kg/ontology/ho/";
inline constexpr std::string_view kHra = "http://example.org/virtualhome2kg/ontology/hra/";
inline constexpr std::string_view kX3do = "https://www.web3d.org/specifications/X3dOntology4.0#";
inline constexpr std::string_view kTime = "http://www.w3.org/2006/time#";
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kSkos = "http://www.w3.org/2004/02/skos/core#";
}  // namespace ns

using PrefixTable = std::vector<std::pair<std::string, std::string>>;

/// Prefix block emitted in Turtle output, in this order.
inline const PrefixTable& default_prefixes() {
  static const PrefixTable table = {
      {"ex", std::string(ns::kEx)},     {"", std::string(ns::kVh)},         {"vh2kg-an", std::string(ns::kAction)},
      {"ho", std::string(ns::kHo)},     {"hra", std::string(ns::kHra)},     {"x3do", std::string(ns::kX3do)},
      {"time", std::string(ns::kTime)}, {"rdf", std::string(ns::kRdf)},     {"rdfs", std::string(ns::kRdfs)},
      {"xsd", std::string(ns::kXsd)},   {"owl", std::string(ns::kOwl)},     {"skos", std::string(ns::kSkos)},
  };
  return table;
}

struct Term {
  enum class Kind : std::uint8_t { Iri, Blank, Literal };

  Kind kind = Kind::Iri;
  std::string value;     // IRI, blank label (without "_:"), or lexical form
  std::string datatype;  // literals only; "@tag" for language-tagged strings

  bool is_iri() const { return kind == Kind::Iri; }
  bool is_blank() const { return kind == Kind::Blank; }
  bool is_literal() const { return kind == Kind::Literal; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;
};

inline Term iri(std::string value) { return {Term::Kind::Iri, std::move(value), {}}; }
inline Term iri(std::string_view base, std::string_view local) {
  return {Term::Kind::Iri, std::string(base) + std::string(local), {}};
}
inline Term blank(std::string label) { return {Term::Kind::Blank, std::move(label), {}}; }
inline Term literal(std::string lexical, std::string datatype) {
  return {Term::Kind::Literal, std::move(lexical), std::move(datatype)};
}

/// Shortest round-trip decimal text, always containing a '.', never an exponent.
inline std::string format_decimal(double v) {
  if (v == 0.0) return "0.0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  std::string out(buf, res.ptr);
  if (out.find('.') == std::string::npos) out += ".0";
  return out;
}

inline Term decimal(double v) { return literal(format_decimal(v), std::string(ns::kXsd) + "decimal"); }
inline Term integer(std::int64_t v) { return literal(std::to_string(v), std::string(ns::kXsd) + "int"); }
inline Term string_literal(std::string s) { return literal(std::move(s), std::string(ns::kXsd) + "string"); }

/// Numeric value of a literal's lexical form.
inline std::optional<double> numeric_value(const Term& t) {
  if (!t.is_literal()) return std::nullopt;
  double v = 0.0;
  const auto* first = t.value.data();
  const auto* last = first + t.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return v;
}

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

struct KgDocument {
  PrefixTable prefixes = default_prefixes();
  std::set<Triple> triples;

  void add(Term s, Term p, Term o) { triples.insert(Triple{std::move(s), std::move(p), std::move(o)}); }
  void merge(const KgDocument& other) { triples.insert(other.triples.begin(), other.triples.end()); }
  bool contains(const Triple& t) const { return triples.contains(t); }
  std::size_t size() const { return triples.size(); }
};

// ---------------------------------------------------------------------------
// N-Triples

namespace detail {

inline std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace detail

inline std::string to_ntriples(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Iri: return "<" + t.value + ">";
    case Term::Kind::Blank: return "_:" + t.value;
    case Term::Kind::Literal: {
      std::string out = "\"" + detail::escape_literal(t.value) + "\"";
      if (t.datatype.starts_with('@')) return out + t.datatype;
      if (!t.datatype.empty()) out += "^^<" + t.datatype + ">";
      return out;
    }
  }
  return {};
}

inline std::string to_ntriples(const Triple& t) {
  return to_ntriples(t.subject) + " " + to_ntriples(t.predicate) + " " + to_ntriples(t.object) + " .";
}

inline std::string serialize_ntriples(const KgDocument& doc) {
  std::string out;
  for (const auto& t : doc.triples) {
    out += to_ntriples(t);
    out += '\n';
  }
  return out;
}

namespace detail {

class NTriplesReader {
 public:
  NTriplesReader(std::string_view line, std::size_t lineNo) : s_(line), lineNo_(lineNo) {}

  std::optional<Triple> read() {
    skip_ws();
    if (eof() || peek() == '#') return std::nullopt;
    Triple t;
    t.subject = subject();
    skip_ws();
    if (eof() || peek() != '<') fail("predicate must be an IRI");
    t.predicate = iri_ref();
    skip_ws();
    t.object = object();
    skip_ws();
    if (eof() || peek() != '.') fail("missing terminating '.'");
    ++pos_;
    skip_ws();
    if (!eof() && peek() != '#') fail("trailing content");
    return t;
  }

  Term term() {
    skip_ws();
    Term t = object();
    skip_ws();
    if (!eof()) fail("trailing content after term");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::MalformedDocument, "N-Triples line " + std::to_string(lineNo_) + ": " + why);
  }
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  Term subject() {
    if (eof()) fail("unexpected end of line");
    if (peek() == '<') return iri_ref();
    if (peek() == '_') return blank_node();
    fail("subject must be an IRI or blank node");
  }

  Term object() {
    if (eof()) fail("unexpected end of line");
    if (peek() == '<') return iri_ref();
    if (peek() == '_') return blank_node();
    if (peek() == '"') return literal_term();
    fail("bad object term");
  }

  Term iri_ref() {
    ++pos_;
    std::string value;
    while (true) {
      if (eof()) fail("unterminated IRI");
      char c = s_[pos_++];
      if (c == '>') break;
      if (c == ' ' || c == '<' || c == '"') fail("illegal character in IRI");
      if (c == '\\') {
        value += unicode_escape();
        continue;
      }
      value.push_back(c);
    }
    return iri(std::move(value));
  }

  Term blank_node() {
    if (s_.substr(pos_, 2) != "_:") fail("bad blank node");
    pos_ += 2;
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
          static_cast<unsigned char>(c) >= 0x80) {
        ++pos_;
      } else {
        break;
      }
    }
    while (pos_ > start && s_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    return blank(std::string(s_.substr(start, pos_ - start)));
  }

  std::string unicode_escape() {
    if (eof()) fail("dangling escape");
    const char kind = s_[pos_++];
    std::size_t digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (digits == 0) fail("bad escape in IRI");
    if (pos_ + digits > s_.size()) fail("short unicode escape");
    std::uint32_t cp = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + pos_ + digits, cp, 16);
    if (ec != std::errc{} || ptr != s_.data() + pos_ + digits) fail("bad unicode escape");
    pos_ += digits;
    std::string out;
    append_utf8(out, cp);
    return out;
  }

  Term literal_term() {
    ++pos_;
    std::string lex;
    while (true) {
      if (eof()) fail("unterminated literal");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("dangling escape");
        char e = s_[pos_++];
        switch (e) {
          case 't': lex.push_back('\t'); break;
          case 'b': lex.push_back('\b'); break;
          case 'n': lex.push_back('\n'); break;
          case 'r': lex.push_back('\r'); break;
          case 'f': lex.push_back('\f'); break;
          case '"': lex.push_back('"'); break;
          case '\'': lex.push_back('\''); break;
          case '\\': lex.push_back('\\'); break;
          case 'u':
          case 'U':
            --pos_;
            lex += unicode_escape();
            break;
          default: fail("unknown escape");
        }
        continue;
      }
      lex.push_back(c);
    }
    std::string datatype;
    if (!eof() && peek() == '^') {
      if (s_.substr(pos_, 3) != "^^<") fail("bad datatype marker");
      pos_ += 2;
      datatype = iri_ref().value;
    } else if (!eof() && peek() == '@') {
      const std::size_t start = pos_++;
      while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
      if (pos_ == start + 1) fail("empty language tag");
      datatype = std::string(s_.substr(start, pos_ - start));
    }
    return literal(std::move(lex), std::move(datatype));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t lineNo_;
};

}  // namespace detail

/// Reads N-Triples text (one statement per line; comments and blank lines skipped).
inline KgDocument parse_ntriples(std::string_view text) {
  KgDocument doc;
  std::size_t lineNo = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++lineNo;
    if (auto t = detail::NTriplesReader(line, lineNo).read()) doc.triples.insert(std::move(*t));
    start = nl + 1;
  }
  return doc;
}

/// Parses a single N-Triples term, e.g. `<http://x>` or `"1.5"^^<...#decimal>`.
inline Term parse_term(std::string_view text) { return detail::NTriplesReader(text, 1).term(); }

// ---------------------------------------------------------------------------
// Turtle

namespace detail {

inline bool valid_local_name(std::string_view local) {
  if (local.empty()) return false;
  for (char c : local) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return local.front() != '-';
}

}  // namespace detail

inline std::string compact(const Term& t, const PrefixTable& prefixes) {
  if (t.is_literal()) {
    std::string out = "\"" + detail::escape_literal(t.value) + "\"";
    if (t.datatype.starts_with('@')) return out + t.datatype;
    if (!t.datatype.empty()) out += "^^" + compact(iri(t.datatype), prefixes);
    return out;
  }
  if (t.is_blank()) return "_:" + t.value;
  const std::pair<std::string, std::string>* best = nullptr;
  for (const auto& p : prefixes) {
    if (t.value.starts_with(p.second) && detail::valid_local_name(std::string_view(t.value).substr(p.second.size())) &&
        (!best || p.second.size() > best->second.size())) {
      best = &p;
    }
  }
  if (best) return best->first + ":" + t.value.substr(best->second.size());
  return "<" + t.value + ">";
}

/// Turtle with the document's prefix block; statements grouped by subject in sorted order.
inline std::string serialize_turtle(const KgDocument& doc) {
  std::string out;
  for (const auto& [prefix, base] : doc.prefixes) out += "@prefix " + prefix + ": <" + base + "> .\n";
  const std::string rdfType = std::string(ns::kRdf) + "type";

  auto it = doc.triples.begin();
  while (it != doc.triples.end()) {
    out += "\n" + compact(it->subject, doc.prefixes);
    const Term& subject = it->subject;
    bool firstPredicate = true;
    while (it != doc.triples.end() && it->subject == subject) {
      const Term& predicate = it->predicate;
      out += firstPredicate ? " " : " ;\n    ";
      firstPredicate = false;
      out += predicate.value == rdfType ? "a" : compact(predicate, doc.prefixes);
      bool firstObject = true;
      while (it != doc.triples.end() && it->subject == subject && it->predicate == predicate) {
        out += firstObject ? " " : ", ";
        firstObject = false;
        out += compact(it->object, doc.prefixes);
        ++it;
      }
    }
    out += " .\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

struct GraphStats {
  std::size_t entities = 0;
  std::size_t properties = 0;
  std::size_t triples = 0;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

/// IRIs under the ontology or standard vocabularies are schema constants.
inline bool is_schema_iri(std::string_view value) {
  for (auto base : {ns::kVh, ns::kX3do, ns::kTime, ns::kRdf, ns::kRdfs, ns::kXsd, ns::kOwl, ns::kSkos}) {
    if (value.starts_with(base)) return true;
  }
  return false;
}

/// entities: distinct non-schema IRIs in subject or object position;
/// properties: distinct predicates; triples: document size.
inline GraphStats graph_stats(const KgDocument& doc) {
  std::set<std::string_view> entities;
  std::set<std::string_view> predicates;
  for (const auto& t : doc.triples) {
    for (const Term* term : {&t.subject, &t.object}) {
      if (term->is_iri() && !is_schema_iri(term->value)) entities.insert(term->value);
    }
    predicates.insert(t.predicate.value);
  }
  return {entities.size(), predicates.size(), doc.triples.size()};
}

// ---------------------------------------------------------------------------
// Lookup index

/// Adjacency over a document. Holds pointers into `doc`, which must outlive it.
class KgIndex {
 public:
  using Edge = std::pair<const Term*, const Term*>;  // (predicate, other end)

  explicit KgIndex(const KgDocument& doc) {
    for (const auto& t : doc.triples) {
      out_[&t.subject].push_back({&t.predicate, &t.object});
      in_[&t.object].push_back({&t.predicate, &t.subject});
    }
  }

  const std::vector<Edge>& outgoing(const Term& s) const { return lookup(out_, s); }
  const std::vector<Edge>& incoming(const Term& o) const { return lookup(in_, o); }

  std::vector<const Term*> objects(const Term& s, std::string_view predicate) const {
    std::vector<const Term*> found;
    for (const auto& [p, o] : outgoing(s)) {
      if (p->value == predicate) found.push_back(o);
    }
    return found;
  }
  const Term* object(const Term& s, std::string_view predicate) const {
    for (const auto& [p, o] : outgoing(s)) {
      if (p->value == predicate) return o;
    }
    return nullptr;
  }
  std::vector<const Term*> subjects(std::string_view predicate, const Term& o) const {
    std::vector<const Term*> found;
    for (const auto& [p, s] : incoming(o)) {
      if (p->value == predicate) found.push_back(s);
    }
    return found;
  }
  bool has(const Term& s, std::string_view predicate, const Term& o) const {
    for (const auto& [p, obj] : outgoing(s)) {
      if (p->value == predicate && *obj == o) return true;
    }
    return false;
  }
  /// Subjects that appear with the given predicate, in sorted order.
  std::vector<const Term*> subjects_with(std::string_view predicate) const {
    std::vector<const Term*> found;
    for (const auto& [s, edges] : out_) {
      for (const auto& [p, o] : edges) {
        if (p->value == predicate) {
          found.push_back(s);
          break;
        }
      }
    }
    return found;
  }

 private:
  struct PtrLess {
    bool operator()(const Term* a, const Term* b) const { return *a < *b; }
  };
  using Map = std::map<const Term*, std::vector<Edge>, PtrLess>;

  static const std::vector<Edge>& lookup(const Map& m, const Term& t) {
    static const std::vector<Edge> empty;
    auto it = m.find(&t);
    return it == m.end() ? empty : it->second;
  }

  Map out_;
  Map in_;
};

}  // namespace vh2kg::rdf
