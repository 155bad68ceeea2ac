#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

#include "liesync/errors.hpp"
#include "liesync/graph.hpp"
#include "liesync/region.hpp"

using namespace liesync;
using testutil::kPi;
using testutil::multiset_distance;
using testutil::to_vector;

namespace {

Eigen::MatrixXd demo_laplacian() {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(6, 6);
  const double diag[6] = {0.5, 0.8, 0.9, 0.8, 0.5, 0.0};
  for (int i = 0; i < 6; ++i) {
    l(i, i) = diag[i];
    for (int j = i + 1; j < 6; ++j) l(i, j) = -diag[i] / (5 - i);
  }
  return l;
}

}  // namespace

TEST_CASE("graph construction and validation") {
  CHECK_THROWS_AS(graph::CommGraph(0, {}), ConfigError);
  CHECK_THROWS_AS(graph::CommGraph(3, {{0, 0, 1.0}}), ConfigError);   // self-loop
  CHECK_THROWS_AS(graph::CommGraph(3, {{0, 3, 1.0}}), ConfigError);   // out of range
  CHECK_THROWS_AS(graph::CommGraph(3, {{0, 1, -0.5}}), ConfigError);  // weight <= 0
  CHECK_THROWS_AS(graph::CommGraph(3, {{0, 1, 0.0}}), ConfigError);
  CHECK_THROWS_AS(graph::CommGraph(3, {{0, 1, 1.5}}), ConfigError);  // weight > 1
  CHECK_THROWS_AS(graph::CommGraph(3, {{0, 1, 1.0}, {0, 1, 0.5}}),
                  ConfigError);  // duplicate edge

  const graph::CommGraph g(3, {{0, 1, 1.0}, {0, 2, 0.25}});
  CHECK(g.size() == 3);
  CHECK(g.neighbours(0).size() == 2);
  CHECK(g.neighbours(1).empty());
}

TEST_CASE("complete graph laplacian and spectrum") {
  const auto g = graph::CommGraph::complete(3);
  const auto rep = graph::laplacian(g);
  Eigen::MatrixXd want(3, 3);
  want << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK((rep.l - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rep.connected);
  CHECK(multiset_distance(to_vector(rep.spectrum.values), {0.0, 3.0, 3.0}) < 1e-12);
}

TEST_CASE("laplacian round trip and triangular spectrum") {
  const Eigen::MatrixXd l = demo_laplacian();
  const auto g = graph::CommGraph::from_laplacian(l);
  const auto rep = graph::laplacian(g);
  CHECK((rep.l - l).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rep.connected);
  // Triangular matrix: spectrum is the diagonal.
  CHECK(multiset_distance(to_vector(rep.spectrum.values),
                          {0.0, 0.5, 0.5, 0.8, 0.8, 0.9}) < 1e-12);

  Eigen::MatrixXd badrow = l;
  badrow(2, 3) += 0.1;  // row sum no longer zero
  CHECK_THROWS_AS(graph::CommGraph::from_laplacian(badrow), ConfigError);
  Eigen::MatrixXd badsign = l;
  badsign(0, 1) = 0.3;
  badsign(0, 0) = -(badsign.row(0).sum() - badsign(0, 0));
  CHECK_THROWS_AS(graph::CommGraph::from_laplacian(badsign), ConfigError);
}

TEST_CASE("single directed edge") {
  // Agent 0 listens to agent 1: the zero eigenvalue is simple (spanning
  // tree rooted at 1), so the pair counts as connected with bound 1/2.
  const graph::CommGraph g(2, {{0, 1, 1.0}});
  const auto rep = graph::laplacian(g);
  Eigen::MatrixXd want(2, 2);
  want << 1, -1, 0, 0;
  CHECK((rep.l - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rep.connected);
  CHECK(graph::exact_gain_bound(rep) == doctest::Approx(0.5).epsilon(1e-12));

  // Adding an unreachable third agent doubles the zero eigenvalue.
  const auto rep3 = graph::laplacian(graph::CommGraph(3, {{0, 1, 1.0}}));
  CHECK_FALSE(rep3.connected);
}

TEST_CASE("exact gain bound") {
  const auto bound_of = [](const graph::CommGraph& g) {
    return graph::exact_gain_bound(graph::laplacian(g));
  };
  CHECK(bound_of(graph::CommGraph::complete(3)) ==
        doctest::Approx(1.5).epsilon(1e-12));
  for (int n : {4, 7, 11}) {
    CHECK(bound_of(graph::CommGraph::complete(n)) ==
          doctest::Approx(n / 2.0).epsilon(1e-12));
  }
  const auto demo = graph::CommGraph::from_laplacian(demo_laplacian());
  CHECK(bound_of(demo) == doctest::Approx(0.45).epsilon(1e-10));

  CHECK_THROWS_AS(bound_of(graph::CommGraph(2, {})), Disconnected);
}

TEST_CASE("closed-form gain threshold over agent count") {
  CHECK(graph::kmin_closed_form(6) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(graph::kmin_closed_form(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(graph::kmin_closed_form(19) == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(graph::kmin_closed_form(25) == doctest::Approx(24.0).epsilon(1e-12));
  const auto middle = [](int n) {
    const double x = kPi / (2.0 * n);
    return 1.0 / (8.0 * std::sin(x) * std::sin(x) * std::cos(2.0 * x));
  };
  for (int n = 10; n <= 18; ++n) {
    CHECK(graph::kmin_closed_form(n) ==
          doctest::Approx(middle(n)).epsilon(1e-12));
  }
  // Continuity of regime switches: the value is monotone increasing in n.
  double prev = graph::kmin_closed_form(2);
  for (int n = 3; n <= 40; ++n) {
    const double cur = graph::kmin_closed_form(n);
    CHECK(cur > prev);
    prev = cur;
  }
  CHECK_THROWS_AS(graph::kmin_closed_form(1), DomainError);
}

TEST_CASE("laplacian structure on random digraphs") {
  std::mt19937 rng(17);
  for (int c = 0; c < 40; ++c) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto g = testutil::random_digraph(rng, n, 0.4);
    const auto rep = graph::laplacian(g);
    CHECK(rep.l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) CHECK(rep.l(i, j) <= 0.0);
      }
    }
    // Row sums vanish, so 0 is always an eigenvalue.
    double nearest_zero = 1e300;
    for (const auto& ev : to_vector(rep.spectrum.values))
      nearest_zero = std::min(nearest_zero, std::abs(ev));
    CHECK(nearest_zero <= 1e-8);
  }
}

TEST_CASE("spectral inclusion in the gain region") {
  std::mt19937 rng(101);
  for (int c = 0; c < 200; ++c) {
    const int n = 3 + static_cast<int>(rng() % 10);
    // Normalized weights keep eigenvalues inside the unweighted-graph region.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<graph::Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && u(rng) < 0.5) edges.push_back({i, j, u(rng)});
      }
    }
    double wmax = 0.0;
    for (const auto& e : edges) wmax = std::max(wmax, e.weight);
    if (edges.empty() || wmax == 0.0) continue;
    for (auto& e : edges) e.weight /= wmax;
    const auto rep = graph::laplacian(graph::CommGraph(n, edges));
    for (const auto& ev : to_vector(rep.spectrum.values)) {
      CHECK(region::point_in_region(n, ev, 1e-8));
    }
  }
}
