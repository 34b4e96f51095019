#pragma once

// Finite-difference gradient oracle for the skip-gram objective.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "vh2kg/skipgram.hpp"

namespace vh2kg::test {

/// Loss recomputed from the raw matrices: -log softmax for no negatives,
/// otherwise -log s(u_o.v_c) - sum log s(-u_w.v_c).
inline double reference_loss(const EmbeddingModel& m, std::size_t c, std::size_t o, const std::vector<std::size_t>& neg) {
  const std::size_t d = m.dim();
  auto logit = [&](std::size_t w) {
    double s = 0;
    for (std::size_t i = 0; i < d; ++i) s += m.inputVectors.row(c)[i] * m.outputVectors.row(w)[i];
    return s;
  };
  if (neg.empty()) {
    double mx = -INFINITY;
    for (std::size_t w = 0; w < m.vocab.size(); ++w) mx = std::max(mx, logit(w));
    double z = 0;
    for (std::size_t w = 0; w < m.vocab.size(); ++w) z += std::exp(logit(w) - mx);
    return -(logit(o) - mx) + std::log(z);
  }
  auto log_sigmoid = [](double x) { return -std::log1p(std::exp(-x)); };
  double loss = -log_sigmoid(logit(o));
  for (auto w : neg) loss -= log_sigmoid(-logit(w));
  return loss;
}

struct GradCheck {
  double maxRelError = 0;
  std::size_t checked = 0;
};

/// Compares every analytic gradient entry with a central difference.
/// Relative error is |a - n| / max(|a|, |n|, floor).
inline GradCheck check_gradients(EmbeddingModel m, std::size_t c, std::size_t o, const std::vector<std::size_t>& neg,
                                 double eps = 1e-5, double floor = 1e-6) {
  const auto analytic = sg_loss_and_grad(m, c, o, neg);
  GradCheck r;
  auto compare = [&](double a, double* x) {
    const double saved = *x;
    *x = saved + eps;
    const double up = reference_loss(m, c, o, neg);
    *x = saved - eps;
    const double down = reference_loss(m, c, o, neg);
    *x = saved;
    const double n = (up - down) / (2 * eps);
    r.maxRelError = std::max(r.maxRelError, std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor}));
    ++r.checked;
  };
  for (std::size_t i = 0; i < m.dim(); ++i) compare(analytic.grad.input[i], m.inputVectors.row(c) + i);
  for (std::size_t w = 0; w < m.vocab.size(); ++w) {
    auto it = analytic.grad.output.find(w);
    for (std::size_t i = 0; i < m.dim(); ++i)
      compare(it == analytic.grad.output.end() ? 0.0 : it->second[i], m.outputVectors.row(w) + i);
  }
  return r;
}

/// Model with `n` tokens t0..t{n-1} and all entries uniform in (-scale, scale).
inline EmbeddingModel random_model(std::size_t n, std::size_t dim, std::mt19937_64& rng, double scale = 1.0) {
  WalkCorpus c;
  for (std::size_t i = 0; i < n; ++i) c.sequences.push_back({"t" + std::to_string(i)});
  auto m = init_model(build_vocab(c), static_cast<int>(dim), rng());
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& x : m.inputVectors.data) x = u(rng);
  for (auto& x : m.outputVectors.data) x = u(rng);
  return m;
}

}  // namespace vh2kg::test
