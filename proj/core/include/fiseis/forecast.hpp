#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fiseis/inference.hpp"
#include "fiseis/rate_model.hpp"

namespace fiseis {

inline constexpr double kDefaultWindowDays = 4.0 / 24.0;
inline constexpr double kCountCredibleMass = 0.90;
inline constexpr double kMaxMagLowerTail = 0.05;
inline constexpr double kMaxMagUpperTail = 0.001;

/// Predictive distribution of the number of events in [t, t + h].
struct CountForecast {
  double t = 0.0;
  double h = 0.0;
  std::vector<double> pmf;  // n = 0 .. pmf.size() - 1
  std::size_t credible_lo = 0;
  std::size_t credible_hi = 0;
  double mean = 0.0;
  double variance = 0.0;
  bool tail_folded = false;  // leftover tail mass was added to the last entry

  double cdf(std::size_t n) const;
};

/// Predictive P(M_max > m) for the largest magnitude in [t, t + h].
struct MaxMagForecast {
  double t = 0.0;
  double h = 0.0;
  std::vector<double> mesh;
  std::vector<double> ccdf;
  // Magnitude where P(M_max > m) = 0.95; empty when P(no event) exceeds 5%.
  std::optional<double> lower;
  // Magnitude where P(M_max > m) = 0.001; empty when even P(any event) is below it.
  std::optional<double> upper;
  double p_no_event = 1.0;
};

// Magnitudes m0, m0 + step, ..., capped at mu (mu always included).
std::vector<double> default_magnitude_mesh(double m0, double mu, double step = 0.05);

// Expected count in [t, t + h] at every grid node.
std::vector<double> window_expectations(const PosteriorGrid& grid, const ProcessModel& model,
                                        double t, double h);

// Poisson pmf, truncated once the remaining tail is below 1e-9 and folded.
CountForecast poisson_forecast(double expected, double t, double h);

// Full Bayesian predictive: Poisson conditional on each node, then mixed
// over the posterior weights.
CountForecast forecast_counts(const PosteriorGrid& grid, const ProcessModel& model, double t,
                              double h = kDefaultWindowDays);

// Plug-in predictive at a single parameter point. Ignores parameter
// uncertainty, so it is narrower than forecast_counts.
CountForecast forecast_counts_plugin(const RateParams& theta, const ProcessModel& model, double t,
                                     double h = kDefaultWindowDays);

// Poisson with the posterior-averaged window mean, kept for comparison only.
CountForecast forecast_counts_ergodic(const PosteriorGrid& grid, const ProcessModel& model,
                                      double t, double h = kDefaultWindowDays);

// 1 - sum_nodes w * exp(-Lambda_w(theta) * P(M > m | b)).
MaxMagForecast forecast_max_magnitude(const PosteriorGrid& grid, const ProcessModel& model,
                                      double t, double h = kDefaultWindowDays,
                                      std::span<const double> mesh = {});

}  // namespace fiseis
