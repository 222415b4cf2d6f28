// Serial reference against the OpenMP node-parallel path for each kernel.
// Range argument: nodes per axis on T^4.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "cmalab/kernels.hpp"
#include "cmalab/spectral.hpp"

using namespace cmalab;

namespace {

struct Fixture {
  TorusGrid grid;
  std::vector<std::vector<double>> hessian;
  NodeLinearization lin;
  std::vector<cplx> blocks;

  explicit Fixture(int N) : grid(2, N) {
    const auto phi = ScalarField::from_function(grid, [](const Point& p) {
      constexpr double tp = 2 * std::numbers::pi;
      return 0.02 * std::cos(tp * p[0]) * std::cos(tp * p[2]) + 0.01 * std::sin(tp * (p[1] + p[3]));
    });
    hessian = Spectral(grid).hessian(phi.values());
    linearize_nodes(OperatorSpec::monge_ampere(2), hessian, true, Exec::Serial, lin);
    blocks.resize(grid.size() * 4);
    for (std::size_t i = 0; i < grid.size(); ++i)
      relative_endomorphism_at(hessian, 2, i, {blocks.data() + 4 * i, 4});
  }
};

Exec policy(const benchmark::State& state) { return state.range(1) == 0 ? Exec::Serial : Exec::Parallel; }

void set_label(benchmark::State& state) {
  state.SetLabel(state.range(1) == 0 ? "serial" : "parallel");
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(std::pow(state.range(0), 4)));
}

void BM_Linearize(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const auto spec = OperatorSpec::monge_ampere(2);
  NodeLinearization out;
  for (auto _ : state) {
    linearize_nodes(spec, f.hessian, true, policy(state), out);
    benchmark::DoNotOptimize(out.coeff.data());
  }
  set_label(state);
}

void BM_Eigenvalues(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  std::vector<double> out(f.grid.size() * 2);
  for (auto _ : state) {
    eigenvalues_nodes(f.blocks, 2, policy(state), out);
    benchmark::DoNotOptimize(out.data());
  }
  set_label(state);
}

void BM_Contract(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  std::vector<double> out(f.grid.size());
  for (auto _ : state) {
    contract_nodes(f.lin.coeff, f.hessian, policy(state), out);
    benchmark::DoNotOptimize(out.data());
  }
  set_label(state);
}

void BM_DivergenceForm(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  std::vector<double> v(f.grid.size()), out(f.grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * static_cast<double>(i));
  for (auto _ : state) {
    divergence_form_apply(f.grid, f.lin.coeff, v, policy(state), out);
    benchmark::DoNotOptimize(out.data());
  }
  set_label(state);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int N : {8, 16})
    for (int parallel : {0, 1}) b->Args({N, parallel});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_Linearize)->Apply(sizes);
BENCHMARK(BM_Eigenvalues)->Apply(sizes);
BENCHMARK(BM_Contract)->Apply(sizes);
BENCHMARK(BM_DivergenceForm)->Apply(sizes);
BENCHMARK_MAIN();
