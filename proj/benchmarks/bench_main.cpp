#include <benchmark/benchmark.h>

#include <complex>
#include <random>

#include "wcm/black_scholes.hpp"
#include "wcm/calibrate.hpp"
#include "wcm/heston.hpp"
#include "wcm/lewis.hpp"
#include "wcm/pricing.hpp"

using namespace wcm;

namespace {

ChaosModel bench_model(int M, int d) {
  ChaosModel m(100.0, 2, d, BasisSpec::uniform_piecewise(1.0, M));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<double> c(m.coefficient_count());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = z(rng) * (m.indices()[k].order() == 1 ? 10.0 : 1.0);
  m.set_coefficients(c);
  return m;
}

}  // namespace

static void BM_SampleFeatures(benchmark::State& state) {
  const auto m = bench_model(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_features(m, 1.0, 10000, BrownianDriver{1, 0}));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SampleFeatures)->Arg(4)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_McPriceWithGradient(benchmark::State& state) {
  const auto m = bench_model(4, 2);
  const auto block = sample_features(m, 1.0, 20000, BrownianDriver{1, 0});
  const auto cv = estimate_cv(m, block, 100.0, 2);
  std::vector<double> grad(m.coefficient_count());
  for (auto _ : state) {
    benchmark::DoNotOptimize(call_price_gradient(m, block, 100.0, &cv, grad));
  }
}
BENCHMARK(BM_McPriceWithGradient)->Unit(benchmark::kMicrosecond);

// nodes per axis at u*d = 4
static void BM_QuadratureBlock(benchmark::State& state) {
  const auto m = bench_model(4, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quadrature_block(m, 0.5, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_QuadratureBlock)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_QuadraturePrice(benchmark::State& state) {
  const auto m = bench_model(4, 2);
  const auto block = quadrature_block(m, 0.5, 16);
  std::vector<double> grad(m.coefficient_count());
  for (auto _ : state) {
    benchmark::DoNotOptimize(quad_call_price(m, block, 100.0, grad));
  }
}
BENCHMARK(BM_QuadraturePrice)->Unit(benchmark::kMicrosecond);

static void BM_LewisHeston(benchmark::State& state) {
  const HestonParams p;
  auto cf = [&](std::complex<double> u) { return heston_cf(u, 1.0, p); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(lewis_call_price(cf, 100.0, 110.0, 1.0));
  }
}
BENCHMARK(BM_LewisHeston)->Unit(benchmark::kMicrosecond);

// one optimizer iteration on 15 quotes, excluding resimulation
static void BM_CalibrationStep(benchmark::State& state) {
  const auto m = bench_model(4, 2);
  QuoteSurface qs;
  qs.spot = 100.0;
  for (double T : {0.25, 0.5, 1.0}) {
    for (double K : {90.0, 95.0, 100.0, 105.0, 110.0}) {
      Quote q;
      q.maturity = T;
      q.strike = K;
      q.discount_factor = 1.0;
      q.forward = 100.0;
      q.implied_vol = 0.2;
      q.price = black_price(100.0, K, T, 0.2, 1.0);
      qs.quotes.push_back(q);
    }
  }
  PricingSchedule sched;
  sched.fallback = PricingMethod::monte_carlo(20000, 2, 10000);
  sched.entries = {{0.25, PricingMethod::quadrature(40)}, {0.5, PricingMethod::quadrature(16)}};
  SurfacePricer pricer(m, qs, sched, StreamPlan{1, 2048});
  pricer.resimulate(0, m);
  std::vector<double> dprice;
  for (auto _ : state) {
    const auto p = pricer.prices(m, &dprice);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_CalibrationStep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
