#include <benchmark/benchmark.h>

#include "funk/catalog.hpp"
#include "funk/geometry.hpp"
#include "funk/jet.hpp"
#include "funk/sampling.hpp"
#include "funk/search.hpp"

namespace {

void BM_JetMultiply(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int order = static_cast<int>(state.range(1));
  funk::Jet a = funk::Jet::constant(dim, order, 1.0);
  funk::Jet b = funk::Jet::constant(dim, order, 2.0);
  for (int i = 0; i < dim; ++i) {
    a += funk::Jet::variable(dim, order, i, 0.1 * (i + 1));
    b += 0.5 * funk::Jet::variable(dim, order, i, -0.2 * (i + 1));
  }
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_JetMultiply)->Args({4, 2})->Args({4, 4})->Args({6, 3})->Args({6, 5});

void BM_JacobiSphere(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto spray = funk::geodesic_spray(funk::sphere_metric(), n);
  const auto samples = funk::draw_samples(funk::SamplingDomain{}, n, 16, 42);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(funk::jacobi(spray, samples.points[k]).phi);
    k = (k + 1) % samples.points.size();
  }
}
BENCHMARK(BM_JacobiSphere)->Arg(2)->Arg(3);

void BM_SearchObjective(benchmark::State& state) {
  const bool with_jacobian = state.range(0) != 0;
  const auto spray = funk::geodesic_spray(funk::sphere_metric(), 2);
  const auto samples = funk::draw_samples(funk::SamplingDomain{funk::XDomain::ball(0.6), funk::YAnnulus{}}, 2, 200, 42);
  const Eigen::VectorXd theta = Eigen::VectorXd::LinSpaced(funk::Ansatz::parameter_count(2), -0.2, 0.2);
  const auto ansatz = funk::Ansatz::from_parameters(2, theta);
  for (auto _ : state) {
    benchmark::DoNotOptimize(funk::objective(spray, ansatz, samples, {}, with_jacobian).value);
  }
}
BENCHMARK(BM_SearchObjective)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
