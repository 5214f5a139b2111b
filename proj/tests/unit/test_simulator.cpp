#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fiseis/error.hpp"
#include "fiseis/forecast.hpp"
#include "fiseis/simulator.hpp"
#include "oracles.hpp"

using namespace fiseis;
using namespace fiseis::testing;

namespace {
// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / x.size() - double(j) / y.size()));
  }
  return d;
}
}  // namespace

TEST_CASE("vanishing rate gives an empty catalog") {
  const auto cat = simulate({{-20.0, 1.0, 1.0}, basel_profile(), {1.0, kBaselM0, 7.0}, 12.0, 1});
  CHECK(cat.empty());
  CHECK(cat.t_end() == 12.0);
}

TEST_CASE("event counts have Poisson moments") {
  const auto p = InjectionProfile::constant(100.0);
  const RateParams th{-1.0, 1.0, 1.0};
  const double t_end = 2.0;
  const double lambda = cumulative_rate(t_end, th, p, kBaselM0);
  const int reps = 10000;
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double n = static_cast<double>(
        simulate({th, p, {th.b, kBaselM0, 7.0}, t_end, CounterRng::derive_seed(77, r)}).size());
    s += n;
    s2 += n * n;
  }
  const double mean = s / reps;
  const double var = (s2 - reps * mean * mean) / (reps - 1);
  CHECK(std::abs(mean - lambda) < 3.0 * std::sqrt(lambda / reps));
  CHECK(var / mean >= 0.95);
  CHECK(var / mean <= 1.05);
}

TEST_CASE("same seed reproduces the catalog byte for byte") {
  const SimulationSpec spec{kTruth, basel_profile(), {kTruth.b, kBaselM0, 7.0}, kBaselEnd, 42};
  const auto a = simulate(spec);
  const auto b = simulate(spec);
  CHECK(write_catalog_csv(a) == write_catalog_csv(b));
  auto other = spec;
  other.seed = 43;
  CHECK(write_catalog_csv(simulate(other)) != write_catalog_csv(a));
  CHECK(parse_catalog(write_catalog_csv(a), kBaselM0, kBaselEnd).times() == a.times());
}

TEST_CASE("simulated catalogs respect the model support") {
  const SimulationSpec spec{kTruth, basel_profile(), {kTruth.b, kBaselM0, 7.0}, kBaselEnd, 5};
  const auto cat = simulate(spec);
  CHECK(cat.size() > 500);
  for (const auto& e : cat.events()) {
    CHECK(e.m >= kBaselM0);
    CHECK(e.m <= 7.0);
    CHECK(e.t <= kBaselEnd);
  }
  CHECK_THROWS_AS(simulate({kTruth, basel_profile(), {kTruth.b, kBaselM0, 7.0}, 0.0, 1}),
                  InvalidArgument);
}

TEST_CASE("window maximum Monte Carlo") {
  const SimulationSpec spec{kTruth, basel_profile(), {kTruth.b, kBaselM0, 7.0}, kBaselEnd, 8};
  const auto mesh = default_magnitude_mesh(kBaselM0, 7.0, 0.1);
  SUBCASE("zero-rate window") {
    const auto c = simulate_window_max(spec, 1000.0, 1.0, 1000, mesh);
    for (double v : c) CHECK(v == 0.0);
  }
  SUBCASE("h = 0") {
    const auto c = simulate_window_max(spec, 3.0, 0.0, 1000, mesh);
    for (double v : c) CHECK(v == 0.0);
  }
  SUBCASE("agrees with the closed form at a single parameter point") {
    GridAxes ax;
    ax.nodes = {std::vector<double>{kTruth.a_fb}, std::vector<double>{kTruth.b},
                std::vector<double>{kTruth.tau}};
    ax.widths = {std::vector<double>{1.0}, std::vector<double>{1.0}, std::vector<double>{1.0}};
    const auto g = PosteriorGrid::from_log_density(ax, {0.0});
    const ProcessModel model{basel_profile(), kBaselM0, 7.0};
    for (double t : {2.0, 5.95, 7.0}) {
      const std::size_t reps = 100000;
      const auto mc = simulate_window_max(spec, t, kDefaultWindowDays, reps, mesh);
      const auto cf = forecast_max_magnitude(g, model, t, kDefaultWindowDays, mesh);
      for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double p = cf.ccdf[i];
        const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / reps);
        CHECK(std::abs(mc[i] - p) <= std::max(3.0 * se, 1e-12));
      }
    }
  }
}

TEST_CASE("thinning and inversion samplers agree in distribution") {
  const RateParams th{-1.5, 1.2, 2.0};
  const SimulationSpec base{th, InjectionProfile::make({{0, 1500}, {2, 3000}, {4.5, 0}}, 4.5),
                            {th.b, kBaselM0, 7.0}, 9.0, 0};
  int fails = 0;
  const int reps = 1000;
  for (int r = 0; r < reps; ++r) {
    auto a = base;
    a.seed = CounterRng::derive_seed(1, r);
    auto b = base;
    b.seed = CounterRng::derive_seed(2, r);
    const auto x = simulate(a).times();
    const auto y = simulate_thinning(b).times();
    if (x.empty() || y.empty()) continue;
    const double n = x.size(), m = y.size();
    fails += ks_two_sample(x, y) > 1.358 * std::sqrt((n + m) / (n * m)) ? 1 : 0;
  }
  CHECK(fails <= 0.08 * reps);
}

TEST_CASE("window count replicates") {
  const SimulationSpec spec{kTruth, basel_profile(), {kTruth.b, kBaselM0, 7.0}, kBaselEnd, 2};
  const double lambda = cumulative_rate(3.5, kTruth, spec.profile, kBaselM0) -
                        cumulative_rate(3.0, kTruth, spec.profile, kBaselM0);
  CounterRng rng(3);
  double s = 0.0;
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) s += simulate_window_count(spec, 3.0, 0.5, rng);
  CHECK(std::abs(s / reps - lambda) < 4.0 * std::sqrt(lambda / reps));
}
