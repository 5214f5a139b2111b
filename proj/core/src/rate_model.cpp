#include "fiseis/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiseis/catalog.hpp"
#include "fiseis/error.hpp"

namespace fiseis {

void RateParams::validate() const {
  if (!std::isfinite(a_fb) || !std::isfinite(b) || !std::isfinite(tau)) {
    throw InvalidArgument("rate parameters must be finite");
  }
  if (b <= 0.0) throw InvalidArgument("b must be positive");
  if (tau <= 0.0) throw InvalidArgument("tau must be positive");
}

double productivity(const RateParams& theta, double m0) {
  return std::exp(ln_pow10(theta.a_fb - theta.b * m0));
}

double rate_at(double t, const RateParams& theta, const InjectionProfile& profile, double m0) {
  const double k = productivity(theta, m0);
  const auto t_s = profile.shut_in();
  if (!t_s) return k * profile.rate(t);
  if (t < *t_s) return k * profile.rate(t);
  if (t == *t_s) return k * profile.shut_in_rate();
  return k * profile.shut_in_rate() * std::exp(-(t - *t_s) / theta.tau);
}

double cumulative_rate(double t, const RateParams& theta, const InjectionProfile& profile,
                       double m0) {
  if (t <= 0.0) return 0.0;
  const double k = productivity(theta, m0);
  const auto t_s = profile.shut_in();
  if (!t_s || t <= *t_s) return k * profile.volume(t);
  const double decay = -std::expm1(-(t - *t_s) / theta.tau);
  return k * (profile.volume(*t_s) + profile.shut_in_rate() * theta.tau * decay);
}

double total_mass(const RateParams& theta, const InjectionProfile& profile, double m0) {
  const double k = productivity(theta, m0);
  if (const auto t_s = profile.shut_in()) {
    return k * (profile.volume(*t_s) + profile.shut_in_rate() * theta.tau);
  }
  if (profile.final_rate() > 0.0) return std::numeric_limits<double>::infinity();
  return k * profile.volume(profile.breakpoints().back().t);
}

double inverse_cumulative(double target, const RateParams& theta,
                          const InjectionProfile& profile, double m0) {
  if (!(target >= 0.0)) throw InvalidArgument("inverse_cumulative: target must be >= 0");
  if (target == 0.0) return 0.0;
  const double total = total_mass(theta, profile, m0);
  if (target >= total) {
    throw BeyondExtinction("inverse_cumulative: target " + format_double(target) +
                           " beyond process extinction (total " + format_double(total) + ")");
  }
  const double k = productivity(theta, m0);
  const double v = target / k;

  const auto t_s = profile.shut_in();
  if (t_s) {
    const double v_s = profile.volume(*t_s);
    if (v > v_s) {
      const double x = (v - v_s) / (profile.shut_in_rate() * theta.tau);
      return *t_s - theta.tau * std::log1p(-x);
    }
  }

  const auto& bps = profile.breakpoints();
  // First breakpoint whose cumulative volume reaches v.
  std::size_t lo = 0;
  std::size_t hi = bps.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (profile.volume(bps[mid].t) < v) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < bps.size() && profile.volume(bps[lo].t) == v) return bps[lo].t;
  const auto& seg = bps[lo - 1];
  return seg.t + (v - profile.volume(seg.t)) / seg.rate;
}

}  // namespace fiseis
