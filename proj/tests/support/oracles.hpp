#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fiseis/catalog.hpp"
#include "fiseis/inference.hpp"
#include "fiseis/injection.hpp"
#include "fiseis/magnitude.hpp"
#include "fiseis/random.hpp"
#include "fiseis/rate_model.hpp"

namespace fiseis::testing {

// Rate written straight from the piecewise model, without library helpers.
inline double naive_rate(double t, const RateParams& th, const InjectionProfile& p, double m0) {
  const double k = std::pow(10.0, th.a_fb - th.b * m0);
  const auto& bps = p.breakpoints();
  const auto flow = [&](double s, bool left) {
    double r = 0.0;
    for (const auto& bp : bps) {
      if (left ? bp.t < s : bp.t <= s) r = bp.rate;
    }
    return r;
  };
  if (!p.shut_in() || t <= *p.shut_in()) {
    const bool at_ts = p.shut_in() && t == *p.shut_in();
    return k * flow(t, at_ts);
  }
  const double ts = *p.shut_in();
  return k * flow(ts, true) * std::exp(-(t - ts) / th.tau);
}

// Adaptive Gauss-Kronrod integral of naive_rate over [0, t], split at every
// discontinuity so each piece is smooth.
inline double quad_cumulative(double t, const RateParams& th, const InjectionProfile& p,
                              double m0, double* error_out = nullptr) {
  std::vector<double> cuts{0.0};
  for (const auto& bp : p.breakpoints()) {
    if (bp.t > 0.0 && bp.t < t) cuts.push_back(bp.t);
  }
  cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  double err_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (!(b > a)) continue;
    // Kronrod nodes are interior, so the piece never sees a jump.
    const auto f = [&](double s) { return naive_rate(s, th, p, m0); };
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-14,
                                                                           &err);
    err_total += err;
  }
  if (error_out) *error_out = err_total;
  return total;
}

// Generic NHPP log-likelihood: sum ln lambda + sum ln f_M - quadrature Lambda(T).
inline double generic_nhpp_loglik(const RateParams& th, const SeismicCatalog& cat,
                                  const InjectionProfile& p, double mu, double horizon) {
  double s = 0.0;
  const double m0 = cat.m0();
  const double norm = 1.0 - std::pow(10.0, -th.b * (mu - m0));
  for (const auto& e : cat.events()) {
    const double lam = naive_rate(e.t, th, p, m0);
    if (!(lam > 0.0)) return -std::numeric_limits<double>::infinity();
    s += std::log(lam);
    s += std::log(th.b * std::log(10.0) * std::pow(10.0, -th.b * (e.m - m0)) / norm);
  }
  return s - quad_cumulative(horizon, th, p, m0);
}

// Random step profile: 1-4 injection segments with rates in [500, 5000]
// m^3/day, optionally shut in.
inline InjectionProfile random_profile(CounterRng& rng, bool with_shut_in = true) {
  const std::size_t segs = 1 + rng.below(4);
  std::vector<InjectionProfile::Breakpoint> bps;
  double t = 0.0;
  for (std::size_t i = 0; i < segs; ++i) {
    bps.push_back({t, 500.0 + 4500.0 * rng.uniform()});
    t += 0.5 + 3.0 * rng.uniform();
  }
  if (!with_shut_in) return InjectionProfile::make(bps);
  bps.push_back({t, 0.0});
  return InjectionProfile::make(bps, t);
}

// Parameters drawn from the published single-site ranges.
inline RateParams random_params(CounterRng& rng) {
  return RateParams{-2.4 + 2.5 * rng.uniform(), 0.77 + 0.83 * rng.uniform(),
                    0.02 + 13.68 * rng.uniform()};
}

// Draws a grid node index with probability equal to its weight.
class NodeSampler {
 public:
  explicit NodeSampler(const PosteriorGrid& grid) {
    cdf_.reserve(grid.size());
    double c = 0.0;
    for (double w : grid.weights()) cdf_.push_back(c += w);
  }
  std::size_t operator()(CounterRng& rng) const {
    const double u = rng.uniform() * cdf_.back();
    return static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

// Basel-style scenario: constant 2400 m^3/day, shut-in at 6 d, 12-day window.
inline constexpr RateParams kTruth{-0.5, 1.2, 2.0};
inline constexpr double kBaselM0 = 0.8;
inline constexpr double kBaselRate = 2400.0;
inline constexpr double kBaselShutIn = 6.0;
inline constexpr double kBaselEnd = 12.0;

inline InjectionProfile basel_profile() {
  return InjectionProfile::constant(kBaselRate, kBaselShutIn);
}

}  // namespace fiseis::testing
