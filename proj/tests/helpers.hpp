#pragma once

// Shared fixtures for the test suite: closed-form rotations, seeded random
// matrices and graphs, and multiset eigenvalue comparison.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "liesync/graph.hpp"
#include "liesync/matfun.hpp"

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846;

/// Closed-form planar rotation (independent of the exp implementation).
inline liesync::Mat rot2(double theta) {
  liesync::Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

inline liesync::Mat identity(int n) { return liesync::Mat::Identity(n, n); }

inline double dist(const liesync::Mat& a, const liesync::Mat& b) {
  return liesync::matfun::operator_norm(a - b);
}

/// Random complex matrix with entries in the centered unit box, rescaled to
/// the requested operator norm.
inline liesync::Mat random_matrix(std::mt19937& rng, int n, double norm) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  liesync::Mat a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = liesync::Complex(u(rng), u(rng));
  const double actual = liesync::matfun::operator_norm(a);
  if (actual > 0) a *= norm / actual;
  return a;
}

/// Random real matrix variant.
inline liesync::Mat random_real_matrix(std::mt19937& rng, int n, double norm) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  liesync::Mat a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = liesync::Complex(u(rng), 0.0);
  const double actual = liesync::matfun::operator_norm(a);
  if (actual > 0) a *= norm / actual;
  return a;
}

/// Random weighted digraph on n vertices; edge probability p, weights in
/// (0.05, 1].  May be disconnected.
inline liesync::graph::CommGraph random_digraph(std::mt19937& rng, int n, double p = 0.5) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<liesync::graph::Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && u(rng) < p) edges.push_back({i, j, 0.05 + 0.95 * u(rng)});
  return liesync::graph::CommGraph(n, std::move(edges));
}

/// Redraws until the Laplacian has a simple zero eigenvalue.
inline liesync::graph::CommGraph random_connected_digraph(std::mt19937& rng, int n,
                                                          double p = 0.6) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    liesync::graph::CommGraph g = random_digraph(rng, n, p);
    if (liesync::graph::laplacian(g).connected) return g;
  }
  return liesync::graph::CommGraph::complete(n);
}

/// Greedy nearest matching between two complex multisets; returns the
/// largest matched distance (infinity on size mismatch).
inline double multiset_distance(std::vector<liesync::Complex> a,
                                std::vector<liesync::Complex> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const liesync::Complex& x : a) {
    std::size_t best = b.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double d = std::abs(x - b[k]);
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    if (best == b.size()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, bd);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

inline std::vector<liesync::Complex> to_vector(const Eigen::VectorXcd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace testutil
