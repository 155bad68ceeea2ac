#pragma once

// Weighted directed communication graphs, their Laplacians, and gain bounds
// for the sampled synchronization loop.

#include <vector>

#include "liesync/matfun.hpp"

namespace liesync::graph {

struct Edge {
  int from = 0;  // listening agent i (0-based)
  int to = 0;    // observed agent j (0-based)
  double weight = 1.0;
};

/// Directed graph on N agents with edge weights in (0, 1].  An edge (i, j)
/// means agent i measures its error relative to agent j.
class CommGraph {
public:
  CommGraph(int n, std::vector<Edge> edges);

  static CommGraph complete(int n);
  /// Builds the graph whose weighted Laplacian is `l` (off-diagonal entries
  /// -w_ij, zero row sums).  Throws ConfigError on an inconsistent matrix.
  static CommGraph from_laplacian(const RealMat& l);

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Neighbours of agent i in ascending index order, with weights.
  const std::vector<std::pair<int, double>>& neighbours(int i) const {
    return adjacency_[static_cast<std::size_t>(i)];
  }

private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

struct LaplacianReport {
  RealMat l;
  matfun::Spectrum spectrum;
  bool connected = false;  // zero eigenvalue simple (within 1e-9 scale)
};

LaplacianReport laplacian(const CommGraph& g);

/// max over nonzero Laplacian eigenvalues of |v|^2 / (2 Re v): the exact
/// stability threshold for the gain K on this graph.
/// Throws Disconnected when the zero eigenvalue is not simple.
double exact_gain_bound(const LaplacianReport& rep);

/// Closed-form worst-case minimum gain over all N-agent graphs:
///   N/2                                for N <= 9,
///   (1/8) csc^2(pi/2N) sec(pi/N)       for 10 <= N <= 18,
///   N - 1                              for N >= 19.
/// Throws DomainError for N < 2.
double kmin_closed_form(int n);

}  // namespace liesync::graph
