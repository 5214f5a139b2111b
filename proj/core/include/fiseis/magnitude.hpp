#pragma once

#include <cstddef>
#include <vector>

#include "fiseis/random.hpp"

namespace fiseis {

inline constexpr double kDefaultUpperMagnitude = 7.0;

/// Gutenberg-Richter magnitudes truncated to [m0, mu].
struct MagnitudeModel {
  double b = 1.0;
  double m0 = 0.0;
  double mu = kDefaultUpperMagnitude;

  // Throws InvalidArgument unless b > 0 and m0 < mu.
  void validate() const;
};

// b ln10 10^(-b(m-m0)) / (1 - 10^(-b(mu-m0))) on [m0, mu], zero elsewhere.
double pdf(double m, const MagnitudeModel& model);
double log_pdf(double m, const MagnitudeModel& model);
// P(M > m).
double ccdf(double m, const MagnitudeModel& model);
double cdf(double m, const MagnitudeModel& model);
// Inverse of cdf for p in [0, 1].
double quantile(double p, const MagnitudeModel& model);

// n i.i.d. draws by inversion.
std::vector<double> sample(const MagnitudeModel& model, CounterRng& rng, std::size_t n);

}  // namespace fiseis
