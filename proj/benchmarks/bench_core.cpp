#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "liesync/control.hpp"
#include "liesync/graph.hpp"
#include "liesync/liegroup.hpp"
#include "liesync/lincoord.hpp"
#include "liesync/matfun.hpp"
#include "liesync/region.hpp"

using namespace liesync;

namespace {

Mat random_unitary_near_identity(std::mt19937& rng, double scale) {
  const auto d = lie::GroupDescriptor::su2();
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd t(3);
  t << u(rng), u(rng), u(rng);
  return lie::composed_flow({d, t}).matrix;
}

void bm_principal_log(benchmark::State& state) {
  std::mt19937 rng(1);
  std::vector<Mat> xs;
  for (int i = 0; i < 64; ++i) xs.push_back(random_unitary_near_identity(rng, 0.3));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(matfun::principal_log(xs[i++ & 63]));
  }
}
BENCHMARK(bm_principal_log);

void bm_exp_matrix(benchmark::State& state) {
  std::mt19937 rng(2);
  const auto& basis = lie::GroupDescriptor::su2()->basis();
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  std::vector<Mat> xs;
  for (int i = 0; i < 64; ++i) {
    xs.push_back(u(rng) * basis[0] + u(rng) * basis[1] + u(rng) * basis[2]);
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(matfun::exp_matrix(xs[i++ & 63]));
  }
}
BENCHMARK(bm_exp_matrix);

void bm_closed_loop_step_su2_n6(benchmark::State& state) {
  std::mt19937 rng(3);
  const auto d = lie::GroupDescriptor::su2();
  std::vector<lie::GroupElement> states;
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 6; ++i) {
    Eigen::VectorXd t(3);
    t << u(rng), u(rng), u(rng);
    states.push_back(lie::composed_flow({d, t}));
  }
  const auto g = graph::CommGraph::complete(6);
  const control::ControlConfig cfg{1.0, 3.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(control::closed_loop_step(states, g, cfg));
  }
}
BENCHMARK(bm_closed_loop_step_su2_n6);

void bm_region_maximum_n30(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(region::region_maximum(30));
  }
}
BENCHMARK(bm_region_maximum_n30);

void bm_stability_verdict(benchmark::State& state) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  graph::LaplacianReport rep;
  for (;;) {
    std::vector<graph::Edge> edges;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j)
        if (i != j && u(rng) < 0.4) edges.push_back({i, j, 0.05 + 0.95 * u(rng)});
    rep = graph::laplacian(graph::CommGraph(10, std::move(edges)));
    if (rep.connected) break;
  }
  const double k = graph::exact_gain_bound(rep) + 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lincoord::stability_verdict(rep, k));
  }
}
BENCHMARK(bm_stability_verdict);

}  // namespace

BENCHMARK_MAIN();
