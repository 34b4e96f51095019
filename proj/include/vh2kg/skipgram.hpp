#pragma once

// Skip-gram embeddings. Exact softmax for small vocabularies and gradient
// checks; negative sampling (unigram^0.75 noise) for everything else.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "vh2kg/error.hpp"
#include "vh2kg/walks.hpp"

namespace vh2kg {

struct SkipGramConfig {
  int vectorSize = 100;
  int window = 9;
  int epochs = 5;
  double learningRate = 0.025;
  double minLearningRateFraction = 1e-4;
  int negativeSamples = 5;  // 0 = exact softmax
  std::uint64_t seed = 42;

  void validate() const {
    if (vectorSize < 1) throw Error(ErrorCode::MalformedDocument, "vectorSize must be >= 1");
    if (window < 1) throw Error(ErrorCode::MalformedDocument, "window must be >= 1");
    if (epochs < 1) throw Error(ErrorCode::MalformedDocument, "epochs must be >= 1");
    if (!(learningRate > 0)) throw Error(ErrorCode::MalformedDocument, "learningRate must be > 0");
    if (negativeSamples < 0) throw Error(ErrorCode::MalformedDocument, "negativeSamples must be >= 0");
  }
};

struct Vocab {
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return tokens.size(); }
  std::optional<std::size_t> find(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

/// Tokens ordered by count (descending), then lexically.
inline Vocab build_vocab(const WalkCorpus& corpus) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& w : corpus.sequences) {
    for (const auto& t : w) ++counts[t];
  }
  std::vector<std::pair<std::string, std::uint64_t>> sorted(counts.begin(), counts.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab v;
  for (auto& [tok, n] : sorted) {
    v.index.emplace(tok, v.tokens.size());
    v.tokens.push_back(tok);
    v.counts.push_back(n);
  }
  return v;
}

/// Row-major |V| x dim matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct EmbeddingModel {
  Vocab vocab;
  Matrix inputVectors;   // v_w
  Matrix outputVectors;  // v'_w
  std::vector<double> epochLosses;

  std::size_t dim() const { return inputVectors.cols; }
  std::vector<double> vector(const std::string& token) const {
    auto i = vocab.find(token);
    if (!i) throw Error(ErrorCode::UnknownToken, token);
    const double* r = inputVectors.row(*i);
    return {r, r + dim()};
  }
};

/// Model with input rows uniform in (-0.5, 0.5)/dim and zero output rows.
inline EmbeddingModel init_model(Vocab vocab, int dim, std::uint64_t seed) {
  EmbeddingModel m;
  m.inputVectors = Matrix(vocab.size(), static_cast<std::size_t>(dim));
  m.outputVectors = Matrix(vocab.size(), static_cast<std::size_t>(dim));
  m.vocab = std::move(vocab);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& x : m.inputVectors.data) x = u(rng) / dim;
  return m;
}

inline double dot(const double* a, const double* b, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

/// p(w | center) for every w under the full softmax.
inline std::vector<double> softmax_row(const EmbeddingModel& m, std::size_t center) {
  if (center >= m.vocab.size()) throw Error(ErrorCode::IndexOutOfRange, "center index");
  const std::size_t n = m.vocab.size(), d = m.dim();
  std::vector<double> p(n);
  double mx = -INFINITY;
  for (std::size_t w = 0; w < n; ++w) {
    p[w] = dot(m.inputVectors.row(center), m.outputVectors.row(w), d);
    mx = std::max(mx, p[w]);
  }
  double z = 0;
  for (auto& x : p) z += (x = std::exp(x - mx));
  for (auto& x : p) x /= z;
  return p;
}

struct SgGradients {
  std::vector<double> input;                          // d loss / d v_center
  std::map<std::size_t, std::vector<double>> output;  // d loss / d v'_w for the rows it touches
};

struct SgResult {
  double loss = 0;
  SgGradients grad;
};

inline double sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

/// Loss and gradients for one (center, context) pair. With no negatives the
/// loss is -log p(context | center) under the full softmax; otherwise it is
/// the negative-sampling objective over the given noise tokens.
inline SgResult sg_loss_and_grad(const EmbeddingModel& m, std::size_t center, std::size_t context,
                                 const std::vector<std::size_t>& negatives = {}) {
  const std::size_t n = m.vocab.size(), d = m.dim();
  if (center >= n || context >= n) throw Error(ErrorCode::IndexOutOfRange, "token index");
  const double* vc = m.inputVectors.row(center);
  SgResult r;
  r.grad.input.assign(d, 0.0);
  auto add_output = [&](std::size_t w, double g) {
    auto& row = r.grad.output[w];
    if (row.empty()) row.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) row[i] += g * vc[i];
    const double* u = m.outputVectors.row(w);
    for (std::size_t i = 0; i < d; ++i) r.grad.input[i] += g * u[i];
  };
  if (negatives.empty()) {
    const auto p = softmax_row(m, center);
    r.loss = -std::log(p[context]);
    for (std::size_t w = 0; w < n; ++w) add_output(w, p[w] - (w == context ? 1.0 : 0.0));
    return r;
  }
  for (auto w : negatives) {
    if (w >= n) throw Error(ErrorCode::IndexOutOfRange, "negative index");
  }
  const double sp = sigmoid(dot(vc, m.outputVectors.row(context), d));
  r.loss = -std::log(sp);
  add_output(context, sp - 1.0);
  for (auto w : negatives) {
    const double sn = sigmoid(dot(vc, m.outputVectors.row(w), d));
    r.loss -= std::log(1.0 - sn);
    add_output(w, sn);
  }
  return r;
}

/// SGD over all (center, context) pairs within the window, learning rate
/// decayed linearly. Deterministic for a given seed.
inline EmbeddingModel train_skipgram(const WalkCorpus& corpus, const SkipGramConfig& cfg) {
  cfg.validate();
  if (corpus.token_count() == 0) throw Error(ErrorCode::EmptyCorpus, "no tokens to train on");
  EmbeddingModel m = init_model(build_vocab(corpus), cfg.vectorSize, cfg.seed);
  const std::size_t d = m.dim();

  std::vector<std::vector<std::size_t>> seqs;
  std::size_t totalPairs = 0;
  for (const auto& w : corpus.sequences) {
    std::vector<std::size_t> ids;
    for (const auto& t : w) ids.push_back(*m.vocab.find(t));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const std::size_t lo = i >= static_cast<std::size_t>(cfg.window) ? i - cfg.window : 0;
      const std::size_t hi = std::min(ids.size() - 1, i + cfg.window);
      totalPairs += hi - lo;
    }
    seqs.push_back(std::move(ids));
  }
  if (totalPairs == 0) throw Error(ErrorCode::EmptyCorpus, "no context pairs (all walks have one token)");

  std::vector<double> noiseWeights;
  for (auto c : m.vocab.counts) noiseWeights.push_back(std::pow(static_cast<double>(c), 0.75));
  std::discrete_distribution<std::size_t> noise(noiseWeights.begin(), noiseWeights.end());
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  const double total = static_cast<double>(totalPairs) * cfg.epochs;
  std::size_t processed = 0;
  std::vector<double> gradIn(d);
  std::vector<std::size_t> negatives;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epochLoss = 0;
    for (const auto& ids : seqs) {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::size_t lo = i >= static_cast<std::size_t>(cfg.window) ? i - cfg.window : 0;
        const std::size_t hi = std::min(ids.size() - 1, i + cfg.window);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const double lr =
              cfg.learningRate * std::max(1.0 - static_cast<double>(processed++) / total, cfg.minLearningRateFraction);
          const std::size_t center = ids[i], context = ids[j];
          if (cfg.negativeSamples == 0) {
            const auto r = sg_loss_and_grad(m, center, context);
            epochLoss += r.loss;
            for (const auto& [w, g] : r.grad.output) {
              double* u = m.outputVectors.row(w);
              for (std::size_t k = 0; k < d; ++k) u[k] -= lr * g[k];
            }
            double* vc = m.inputVectors.row(center);
            for (std::size_t k = 0; k < d; ++k) vc[k] -= lr * r.grad.input[k];
            continue;
          }
          // Inlined negative-sampling step; same objective as sg_loss_and_grad.
          negatives.clear();
          for (int s = 0; s < cfg.negativeSamples; ++s) {
            const std::size_t w = noise(rng);
            if (w != context) negatives.push_back(w);
          }
          double* vc = m.inputVectors.row(center);
          std::fill(gradIn.begin(), gradIn.end(), 0.0);
          auto step = [&](std::size_t w, bool positive) {
            double* u = m.outputVectors.row(w);
            const double s = sigmoid(dot(vc, u, d));
            epochLoss -= std::log(std::max(positive ? s : 1.0 - s, 1e-300));
            const double g = positive ? s - 1.0 : s;
            for (std::size_t k = 0; k < d; ++k) {
              gradIn[k] += g * u[k];
              u[k] -= lr * g * vc[k];
            }
          };
          step(context, true);
          for (auto w : negatives) step(w, false);
          for (std::size_t k = 0; k < d; ++k) vc[k] -= lr * gradIn[k];
        }
      }
    }
    m.epochLosses.push_back(epochLoss / static_cast<double>(totalPairs));
  }
  return m;
}

inline double cosine(const double* a, const double* b, std::size_t n) {
  const double na = std::sqrt(dot(a, a, n)), nb = std::sqrt(dot(b, b, n));
  if (na == 0 || nb == 0) return 0.0;
  return dot(a, b, n) / (na * nb);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  return cosine(a.data(), b.data(), std::min(a.size(), b.size()));
}

/// The n most similar tokens by cosine over input vectors, excluding `token`.
inline std::vector<std::pair<std::string, double>> cosine_neighbors(const EmbeddingModel& m, const std::string& token,
                                                                    std::size_t n) {
  auto i = m.vocab.find(token);
  if (!i) throw Error(ErrorCode::UnknownToken, token);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t w = 0; w < m.vocab.size(); ++w) {
    if (w == *i) continue;
    out.emplace_back(m.vocab.tokens[w], cosine(m.inputVectors.row(*i), m.inputVectors.row(w), m.dim()));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (out.size() > n) out.resize(n);
  return out;
}

/// `token\tv1\t...\tvd` per vocabulary entry, in vocabulary order.
inline std::string export_vectors(const EmbeddingModel& m) {
  std::string out;
  char buf[32];
  for (std::size_t w = 0; w < m.vocab.size(); ++w) {
    out += m.vocab.tokens[w];
    const double* r = m.inputVectors.row(w);
    for (std::size_t k = 0; k < m.dim(); ++k) {
      std::snprintf(buf, sizeof buf, "\t%.17g", r[k]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

struct VectorTable {
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> vectors;
};

inline VectorTable parse_vectors(std::string_view tsv) {
  VectorTable t;
  std::size_t start = 0, lineNo = 0;
  while (start < tsv.size()) {
    ++lineNo;
    auto nl = tsv.find('\n', start);
    if (nl == std::string_view::npos) nl = tsv.size();
    std::string line(tsv.substr(start, nl - start));
    start = nl + 1;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::MalformedDocument, "vector line " + std::to_string(lineNo));
    t.tokens.push_back(line.substr(0, tab));
    std::vector<double> v;
    const char* p = line.c_str() + tab;
    while (*p == '\t') {
      char* end = nullptr;
      v.push_back(std::strtod(p + 1, &end));
      if (end == p + 1) throw Error(ErrorCode::MalformedDocument, "vector line " + std::to_string(lineNo));
      p = end;
    }
    if (!t.vectors.empty() && v.size() != t.vectors.front().size())
      throw Error(ErrorCode::MalformedDocument, "ragged vector line " + std::to_string(lineNo));
    t.vectors.push_back(std::move(v));
  }
  return t;
}

}  // namespace vh2kg
