#include <benchmark/benchmark.h>

#include <random>

#include "diffbar/barcode_space.hpp"
#include "diffbar/differential.hpp"
#include "diffbar/losses.hpp"
#include "diffbar/parametrizations.hpp"
#include "diffbar/persistence.hpp"

namespace {

using namespace diffbar;

Eigen::VectorXd random_cloud(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd theta(n * d);
  for (int i = 0; i < theta.size(); ++i) theta[i] = unit(rng);
  return theta;
}

void bm_reduction_rips(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  rips_parametrization family(n, 2, 2);
  const Eigen::VectorXd theta = random_cloud(n, 2, 42);
  const filter_function f = family.value(theta);
  for (auto _ : state) {
    const reduction_certificate cert = reduce(f.complex(), filtration_order(f));
    benchmark::DoNotOptimize(cert.partner.data());
  }
  state.SetComplexityN(f.complex().size());
}
BENCHMARK(bm_reduction_rips)->DenseRange(8, 12)->Complexity();

barcode random_diagram(int bars, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  barcode d;
  for (int i = 0; i < bars; ++i) {
    const double b = unit(rng);
    d.finite.emplace_back(b, b + unit(rng));
  }
  d.canonicalize();
  return d;
}

void bm_bottleneck(benchmark::State& state) {
  const int bars = static_cast<int>(state.range(0));
  const barcode a = random_diagram(bars, 7);
  const barcode b = random_diagram(bars, 13);
  for (auto _ : state) {
    const double v = bottleneck(a, b);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_bottleneck)->Arg(10)->Arg(25)->Arg(50);

void bm_wasserstein(benchmark::State& state) {
  const int bars = static_cast<int>(state.range(0));
  const barcode a = random_diagram(bars, 7);
  const barcode b = random_diagram(bars, 13);
  for (auto _ : state) {
    const wasserstein_result r = wasserstein(a, b, 2.0);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(bm_wasserstein)->Arg(10)->Arg(25)->Arg(50);

// lift + differential + loss gradient pullback, the full derivative pipeline
void bm_chain_rule_pipeline(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  rips_parametrization family(n, 2, 2);
  Eigen::VectorXd theta = random_cloud(n, 2, 99);
  total_persistence_loss loss;
  for (auto _ : state) {
    const lift l = build_lift(family, theta, 1);
    const Eigen::MatrixXd bd = differential(l, family, theta);
    const ordered_barcode x = l.evaluate(family.value(theta));
    const Eigen::VectorXd g = chain_rule(bd, scalar_grad(loss, x));
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(bm_chain_rule_pipeline)->Arg(6)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
