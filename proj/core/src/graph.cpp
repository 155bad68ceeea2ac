#include "liesync/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "liesync/errors.hpp"

namespace liesync::graph {

namespace {

constexpr double kZeroEigTol = 1e-9;
constexpr double kWeightSlack = 1e-12;
const double kPi = std::numbers::pi;

}  // namespace

CommGraph::CommGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) throw ConfigError("graph: at least one agent required");
  adjacency_.resize(static_cast<std::size_t>(n_));
  for (const Edge& e : edges_) {
    if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_) {
      throw ConfigError("graph: edge endpoint out of range");
    }
    if (e.from == e.to) throw ConfigError("graph: self-loops are not allowed");
    if (!(e.weight > 0.0) || e.weight > 1.0 + kWeightSlack) {
      throw ConfigError("graph: edge weights must lie in (0, 1]");
    }
    adjacency_[static_cast<std::size_t>(e.from)].emplace_back(e.to, e.weight);
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    for (std::size_t i = 1; i < nbrs.size(); ++i) {
      if (nbrs[i].first == nbrs[i - 1].first) {
        throw ConfigError("graph: duplicate edge");
      }
    }
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.from, a.to) < std::pair(b.from, b.to);
  });
}

CommGraph CommGraph::complete(int n) {
  if (n < 2) throw ConfigError("complete graph: at least two agents required");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) edges.push_back({i, j, 1.0});
    }
  }
  return CommGraph(n, std::move(edges));
}

CommGraph CommGraph::from_laplacian(const RealMat& l) {
  if (l.rows() != l.cols() || l.rows() < 1) {
    throw ConfigError("laplacian matrix must be square");
  }
  const int n = static_cast<int>(l.rows());
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      row_sum += l(i, j);
      if (i == j) continue;
      const double w = -l(i, j);
      if (w < -kWeightSlack) {
        throw ConfigError("laplacian matrix: positive off-diagonal entry");
      }
      if (w > kWeightSlack) edges.push_back({i, j, w});
    }
    if (std::abs(row_sum) > 1e-9) {
      throw ConfigError("laplacian matrix: nonzero row sum");
    }
  }
  return CommGraph(n, std::move(edges));
}

LaplacianReport laplacian(const CommGraph& g) {
  const int n = g.size();
  RealMat l = RealMat::Zero(n, n);
  for (const Edge& e : g.edges()) {
    l(e.from, e.to) -= e.weight;
    l(e.from, e.from) += e.weight;
  }
  LaplacianReport rep;
  rep.l = l;
  rep.spectrum = matfun::spectrum(l.cast<Complex>());
  const double scale = std::max(1.0, matfun::operator_norm(l.cast<Complex>()));
  int zero_count = 0;
  for (Eigen::Index i = 0; i < rep.spectrum.values.size(); ++i) {
    if (std::abs(rep.spectrum.values(i)) <= kZeroEigTol * scale) ++zero_count;
  }
  rep.connected = (zero_count == 1);
  return rep;
}

double exact_gain_bound(const LaplacianReport& rep) {
  if (!rep.connected) {
    throw Disconnected("exact_gain_bound: zero Laplacian eigenvalue is not simple");
  }
  const double scale = std::max(1.0, matfun::operator_norm(rep.l.cast<Complex>()));
  double bound = 0.0;
  for (Eigen::Index i = 0; i < rep.spectrum.values.size(); ++i) {
    const Complex v = rep.spectrum.values(i);
    if (std::abs(v) <= kZeroEigTol * scale) continue;
    bound = std::max(bound, std::norm(v) / (2.0 * v.real()));
  }
  return bound;
}

double kmin_closed_form(int n) {
  if (n < 2) throw DomainError("kmin_closed_form: N >= 2 required");
  if (n <= 9) return static_cast<double>(n) / 2.0;
  if (n <= 18) {
    const double csc = 1.0 / std::sin(kPi / (2.0 * n));
    const double sec = 1.0 / std::cos(kPi / n);
    return 0.125 * csc * csc * sec;
  }
  return static_cast<double>(n) - 1.0;
}

}  // namespace liesync::graph
