#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fiseis/catalog.hpp"
#include "fiseis/magnitude.hpp"
#include "fiseis/rate_model.hpp"

namespace fiseis {

struct SimulationSpec {
  RateParams theta;
  InjectionProfile profile;
  MagnitudeModel mag;  // mag.b is overridden by theta.b
  double t_end = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  MagnitudeModel magnitudes() const { return MagnitudeModel{theta.b, mag.m0, mag.mu}; }
};

// Exact synthetic catalog by inversion: unit-exponential gaps on the
// Lambda scale mapped back through inverse_cumulative, truncated at t_end.
// Deterministic in spec.seed.
SeismicCatalog simulate(const SimulationSpec& spec);

// Independent sampler by thinning a homogeneous process at the peak rate.
// Kept as a cross-check for simulate().
SeismicCatalog simulate_thinning(const SimulationSpec& spec);

// Monte Carlo P(M_max > m) over [t, t + h] on `mesh`; a window with no
// events has no maximum and never exceeds.
std::vector<double> simulate_window_max(const SimulationSpec& spec, double t, double h,
                                        std::size_t replicates, std::span<const double> mesh);

// Event count in [t, t + h] for one replicate of the process.
std::size_t simulate_window_count(const SimulationSpec& spec, double t, double h,
                                  CounterRng& rng);

}  // namespace fiseis
