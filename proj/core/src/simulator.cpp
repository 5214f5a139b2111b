#include "fiseis/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiseis/error.hpp"

namespace fiseis {

void SimulationSpec::validate() const {
  theta.validate();
  magnitudes().validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("simulation: t_end > 0");
}

SeismicCatalog simulate(const SimulationSpec& spec) {
  spec.validate();
  const double m0 = spec.mag.m0;
  const double horizon = cumulative_rate(spec.t_end, spec.theta, spec.profile, m0);
  const auto mags = spec.magnitudes();

  CounterRng times(spec.seed, CounterRng::kTimeStream);
  CounterRng sizes(spec.seed, CounterRng::kMagnitudeStream);
  std::vector<SeismicEvent> events;
  double s = times.exponential();
  while (s < horizon) {
    const double t = inverse_cumulative(s, spec.theta, spec.profile, m0);
    // Gaps far below the resolution of t can collapse onto one double.
    if (events.empty() || t > events.back().t) {
      events.push_back({std::min(t, spec.t_end), quantile(sizes.uniform(), mags)});
    }
    s += times.exponential();
  }
  return SeismicCatalog::make(std::move(events), m0, spec.t_end, "simulated");
}

SeismicCatalog simulate_thinning(const SimulationSpec& spec) {
  spec.validate();
  const double m0 = spec.mag.m0;
  const double peak = productivity(spec.theta, m0) * spec.profile.max_rate();
  const auto mags = spec.magnitudes();
  CounterRng times(spec.seed, CounterRng::kTimeStream);
  CounterRng sizes(spec.seed, CounterRng::kMagnitudeStream);
  std::vector<SeismicEvent> events;
  if (!(peak > 0.0)) return SeismicCatalog::make({}, m0, spec.t_end, "simulated");
  double t = 0.0;
  while (true) {
    t += times.exponential() / peak;
    if (t > spec.t_end) break;
    const double accept = rate_at(t, spec.theta, spec.profile, m0) / peak;
    if (times.uniform() < accept && (events.empty() || t > events.back().t)) {
      events.push_back({t, quantile(sizes.uniform(), mags)});
    }
  }
  return SeismicCatalog::make(std::move(events), m0, spec.t_end, "simulated");
}

std::size_t simulate_window_count(const SimulationSpec& spec, double t, double h,
                                  CounterRng& rng) {
  const double expected = cumulative_rate(t + h, spec.theta, spec.profile, spec.mag.m0) -
                          cumulative_rate(t, spec.theta, spec.profile, spec.mag.m0);
  std::size_t n = 0;
  double s = rng.exponential();
  while (s < expected) {
    ++n;
    s += rng.exponential();
  }
  return n;
}

std::vector<double> simulate_window_max(const SimulationSpec& spec, double t, double h,
                                        std::size_t replicates, std::span<const double> mesh) {
  spec.validate();
  if (replicates == 0) throw InvalidArgument("simulate_window_max: replicates >= 1");
  std::vector<double> exceed(mesh.size(), 0.0);
  if (!(h > 0.0)) return exceed;
  const auto mags = spec.magnitudes();
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto seed = CounterRng::derive_seed(spec.seed, r);
    CounterRng counts(seed, CounterRng::kTimeStream);
    CounterRng sizes(seed, CounterRng::kMagnitudeStream);
    const std::size_t n = simulate_window_count(spec, t, h, counts);
    if (n == 0) continue;
    double largest = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) largest = std::max(largest, quantile(sizes.uniform(), mags));
    for (std::size_t j = 0; j < mesh.size(); ++j) {
      if (largest > mesh[j]) exceed[j] += 1.0;
    }
  }
  for (auto& v : exceed) v /= static_cast<double>(replicates);
  return exceed;
}

}  // namespace fiseis
