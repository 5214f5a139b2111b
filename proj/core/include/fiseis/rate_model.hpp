#pragma once

#include "fiseis/injection.hpp"

namespace fiseis {

inline constexpr double kLn10 = 2.302585092994045684;

// ln(10^x) = x ln 10. Every log10-domain exponent passes through here.
constexpr double ln_pow10(double exponent) noexcept { return exponent * kLn10; }

/// Rate parameters: activation feedback (log10 domain), Gutenberg-Richter
/// b-value and post-shut-in relaxation time in days.
struct RateParams {
  double a_fb = 0.0;
  double b = 1.0;
  double tau = 1.0;

  // Throws InvalidArgument unless b > 0, tau > 0 and all are finite.
  void validate() const;
  bool operator==(const RateParams&) const = default;
};

// 10^(a_fb - b m0): events per m^3 of injected fluid.
double productivity(const RateParams& theta, double m0);

/**
 * Seismicity rate lambda(t | theta) in events/day.
 *
 * For t <= t_s the rate follows the flow, productivity * V'(t); at t = t_s the
 * left limit V'(t_s-) is used so lambda is continuous at shut-in. After t_s
 * it decays as productivity * V'(t_s-) * exp(-(t - t_s) / tau). Without a
 * shut-in the injection branch applies everywhere and tau is unused.
 */
double rate_at(double t, const RateParams& theta, const InjectionProfile& profile, double m0);

// Lambda(t | theta) = integral of rate_at over [0, t], closed form.
double cumulative_rate(double t, const RateParams& theta, const InjectionProfile& profile,
                       double m0);

// Lambda(infinity): finite after a shut-in or when the schedule ends at zero rate.
double total_mass(const RateParams& theta, const InjectionProfile& profile, double m0);

// Smallest t with cumulative_rate(t) = target. Throws BeyondExtinction when
// target >= total_mass.
double inverse_cumulative(double target, const RateParams& theta,
                          const InjectionProfile& profile, double m0);

/// Fixed, theta-independent parts of the seismicity model.
struct ProcessModel {
  InjectionProfile profile;
  double m0 = 0.0;
  double mu = 7.0;  // upper Gutenberg-Richter truncation

  double rate(double t, const RateParams& theta) const { return rate_at(t, theta, profile, m0); }
  double cumulative(double t, const RateParams& theta) const {
    return cumulative_rate(t, theta, profile, m0);
  }
  // Expected count in [t, t + h].
  double window(double t, double h, const RateParams& theta) const {
    return cumulative(t + h, theta) - cumulative(t, theta);
  }
};

}  // namespace fiseis
