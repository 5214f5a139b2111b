#include "fiseis/magnitude.hpp"

#include <cmath>
#include <limits>

#include "fiseis/error.hpp"
#include "fiseis/rate_model.hpp"

namespace fiseis {

void MagnitudeModel::validate() const {
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("magnitude model: b must be > 0");
  if (!(m0 < mu) || !std::isfinite(m0) || !std::isfinite(mu)) {
    throw InvalidArgument("magnitude model: need finite m0 < mu");
  }
}

namespace {

// 1 - 10^(-b (mu - m0)), accurate for small b (mu - m0).
double truncation_mass(const MagnitudeModel& g) {
  return -std::expm1(-ln_pow10(g.b * (g.mu - g.m0)));
}

}  // namespace

double pdf(double m, const MagnitudeModel& g) {
  if (m < g.m0 || m > g.mu) return 0.0;
  return g.b * kLn10 * std::exp(-ln_pow10(g.b * (m - g.m0))) / truncation_mass(g);
}

double log_pdf(double m, const MagnitudeModel& g) {
  if (m < g.m0 || m > g.mu) return -std::numeric_limits<double>::infinity();
  return std::log(g.b) + std::log(kLn10) - ln_pow10(g.b * (m - g.m0)) -
         std::log(truncation_mass(g));
}

double ccdf(double m, const MagnitudeModel& g) {
  if (m <= g.m0) return 1.0;
  if (m >= g.mu) return 0.0;
  const double tail = std::exp(-ln_pow10(g.b * (m - g.m0)));
  const double floor = std::exp(-ln_pow10(g.b * (g.mu - g.m0)));
  return (tail - floor) / truncation_mass(g);
}

double cdf(double m, const MagnitudeModel& g) {
  if (m <= g.m0) return 0.0;
  if (m >= g.mu) return 1.0;
  return -std::expm1(-ln_pow10(g.b * (m - g.m0))) / truncation_mass(g);
}

double quantile(double p, const MagnitudeModel& g) {
  if (p <= 0.0) return g.m0;
  if (p >= 1.0) return g.mu;
  const double m = g.m0 - std::log1p(-p * truncation_mass(g)) / (g.b * kLn10);
  return std::min(std::max(m, g.m0), g.mu);
}

std::vector<double> sample(const MagnitudeModel& model, CounterRng& rng, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(rng.uniform(), model));
  return out;
}

}  // namespace fiseis
