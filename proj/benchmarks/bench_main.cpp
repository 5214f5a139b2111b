#include <benchmark/benchmark.h>

#include <vector>

#include "fiseis/forecast.hpp"
#include "fiseis/inference.hpp"
#include "fiseis/likelihood.hpp"
#include "fiseis/session.hpp"
#include "fiseis/simulator.hpp"

using namespace fiseis;

namespace {

const InjectionProfile kProfile = InjectionProfile::constant(2400.0, 6.0);
constexpr double kM0 = 0.8;

SeismicCatalog catalog_of(std::size_t n) {
  const RateParams theta{-0.2, 1.2, 2.0};
  const auto full = simulate({theta, kProfile, {theta.b, kM0, 7.0}, 12.0, 909});
  std::vector<SeismicEvent> ev(full.events().begin(),
                               full.events().begin() + std::min(n, full.size()));
  return SeismicCatalog::make(std::move(ev), kM0, 12.0);
}

SessionConfig session_config(std::size_t nodes) {
  SessionConfig cfg;
  cfg.schedule = kProfile;
  cfg.m0 = kM0;
  cfg.grid.nodes_per_axis = nodes;
  return cfg;
}

void BM_Posterior(benchmark::State& state) {
  const auto ctx = LikelihoodContext::complete(catalog_of(1000), kProfile);
  GridSpec spec;
  spec.nodes_per_axis = static_cast<std::size_t>(state.range(0));
  const auto prior = default_prior();
  for (auto _ : state) benchmark::DoNotOptimize(compute_posterior(ctx, prior, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0));
}
BENCHMARK(BM_Posterior)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SessionUpdate(benchmark::State& state) {
  const auto cat = catalog_of(1100);
  const auto ev = cat.events();
  Session s(session_config(static_cast<std::size_t>(state.range(0))));
  s.add_events(ev.first(1000));
  std::size_t next = 1000;
  for (auto _ : state) {
    if (next == ev.size()) {
      state.PauseTiming();
      s = Session(session_config(static_cast<std::size_t>(state.range(0))));
      s.add_events(ev.first(1000));
      next = 1000;
      state.ResumeTiming();
    }
    s.add_events(ev.subspan(next++, 1));
  }
}
BENCHMARK(BM_SessionUpdate)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CountForecast(benchmark::State& state) {
  const auto cat = catalog_of(1000);
  Session s(session_config(static_cast<std::size_t>(state.range(0))));
  s.add_events(cat.truncated(5.0).events(), 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(s.forecast_counts(kDefaultWindowDays));
}
BENCHMARK(BM_CountForecast)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MaxMagForecast(benchmark::State& state) {
  const auto cat = catalog_of(1000);
  Session s(session_config(static_cast<std::size_t>(state.range(0))));
  s.add_events(cat.truncated(5.0).events(), 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(s.forecast_max_magnitude(kDefaultWindowDays));
}
BENCHMARK(BM_MaxMagForecast)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Snapshot(benchmark::State& state) {
  const auto cat = catalog_of(1000);
  Session s(session_config(64));
  s.add_events(cat.events());
  for (auto _ : state) benchmark::DoNotOptimize(s.snapshot());
}
BENCHMARK(BM_Snapshot)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
