#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "omem/analysis.hpp"
#include "omem/geometry.hpp"
#include "omem/integrator.hpp"
#include "omem/model.hpp"
#include "omem/optimizer.hpp"

namespace {

void BM_Rhs(benchmark::State& state) {
  const omem::OmParams p;
  omem::MeanFieldState s{1.0, 2.0, 3.0, 4.0};
  for (auto _ : state) {
    s = omem::rhs(s, p, 1e4);
    s.x_c *= 1e-3;
    s.p_c *= 1e-3;
    s.x_m *= 1e-3;
    s.p_m *= 1e-3;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Rhs);

void BM_IntegrateGaussianTrain(benchmark::State& state) {
  const auto d = omem::DriveSpec::gaussian_train(static_cast<double>(state.range(0)), 5.0, 0.5);
  const auto cfg = omem::IntegratorConfig::defaults_for(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(omem::integrate(omem::OmParams{}, d, {}, 5.0 * omem::period(d), cfg));
  }
}
BENCHMARK(BM_IntegrateGaussianTrain)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

std::vector<omem::Point2> rose(int n) {
  std::vector<omem::Point2> pts;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    const double r = std::cos(5.0 * t) + 0.3;
    pts.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return pts;
}

void BM_SelfContacts(benchmark::State& state) {
  const auto pts = rose(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(omem::find_self_contacts(pts));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SelfContacts)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void BM_FormFactor(benchmark::State& state) {
  const auto pts = rose(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(omem::form_factor(pts));
}
BENCHMARK(BM_FormFactor)->Arg(2000)->Arg(20000);

void BM_Cost(benchmark::State& state) {
  omem::CostOptions opt;
  opt.kind = omem::DriveKind::square_sinusoidal;
  opt.skip_cycles = 1;
  const std::vector<double> theta{7.498e5, 1.644};
  for (auto _ : state) benchmark::DoNotOptimize(omem::evaluate_cost(theta, opt));
}
BENCHMARK(BM_Cost)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
