#pragma once

// Lloyd's k-means with k-means++ or random initialization.

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "vh2kg/error.hpp"

namespace vh2kg {

enum class KMeansInit { PlusPlus, Random };

struct KMeansConfig {
  std::size_t k = 10;
  int maxIters = 300;
  std::uint64_t seed = 42;
  KMeansInit init = KMeansInit::PlusPlus;
};

struct KMeansResult {
  std::vector<std::size_t> assignments;
  std::vector<std::vector<double>> centroids;
  double inertia = 0;
  std::vector<double> inertiaHistory;  // after each assignment step
  int iterations = 0;
};

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

namespace detail {

inline std::vector<std::vector<double>> init_centroids(const std::vector<std::vector<double>>& pts,
                                                       const KMeansConfig& cfg, std::mt19937_64& rng) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> chosen;
  std::vector<bool> used(n, false);
  auto take = [&](std::size_t i) {
    chosen.push_back(i);
    used[i] = true;
  };
  auto take_unused_uniform = [&] {
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < n; ++i) {
      if (!used[i]) free.push_back(i);
    }
    take(free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)]);
  };

  if (cfg.init == KMeansInit::Random) {
    while (chosen.size() < cfg.k) take_unused_uniform();
  } else {
    take(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < cfg.k) {
      for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(pts[i], pts[chosen.back()]));
      double total = 0;
      for (std::size_t i = 0; i < n; ++i) total += used[i] ? 0.0 : d2[i];
      if (total <= 0) {
        take_unused_uniform();  // all remaining points coincide with centroids
        continue;
      }
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i] || d2[i] <= 0) continue;
        pick = i;
        r -= d2[i];
        if (r < 0) break;
      }
      take(pick);
    }
  }
  std::vector<std::vector<double>> centroids;
  for (auto i : chosen) centroids.push_back(pts[i]);
  return centroids;
}

}  // namespace detail

/// Runs until assignments stop changing or maxIters. Ties go to the lowest
/// centroid index; an emptied cluster keeps its previous centroid.
inline KMeansResult kmeans(const std::vector<std::vector<double>>& points, const KMeansConfig& cfg) {
  if (cfg.k < 1 || points.size() < cfg.k)
    throw Error(ErrorCode::TooFewPoints, "k=" + std::to_string(cfg.k) + " with " + std::to_string(points.size()) + " points");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::MalformedDocument, "points differ in dimension");
  }
  std::mt19937_64 rng(cfg.seed);
  KMeansResult r;
  r.centroids = detail::init_centroids(points, cfg, rng);
  r.assignments.assign(points.size(), cfg.k);

  for (int it = 0; it < std::max(cfg.maxIters, 1); ++it) {
    bool changed = false;
    double inertia = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::size_t best = 0;
      double bestD = squared_distance(points[i], r.centroids[0]);
      for (std::size_t c = 1; c < cfg.k; ++c) {
        const double d = squared_distance(points[i], r.centroids[c]);
        if (d < bestD) {
          bestD = d;
          best = c;
        }
      }
      inertia += bestD;
      if (r.assignments[i] != best) changed = true;
      r.assignments[i] = best;
    }
    r.inertiaHistory.push_back(inertia);
    r.inertia = inertia;
    r.iterations = it + 1;
    if (!changed) break;

    std::vector<std::vector<double>> sums(cfg.k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(cfg.k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      ++counts[r.assignments[i]];
      for (std::size_t j = 0; j < dim; ++j) sums[r.assignments[i]][j] += points[i][j];
    }
    for (std::size_t c = 0; c < cfg.k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) r.centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
  }
  return r;
}

}  // namespace vh2kg
