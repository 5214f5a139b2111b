#include "fiseis/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "fiseis/error.hpp"
#include "fiseis/magnitude.hpp"
#include "parallel.hpp"

namespace fiseis {

namespace {

constexpr double kTailTolerance = 1e-9;
// Nodes below this weight are left out of mixtures; at most ~1e-13 of mass
// on a 64^3 grid.
constexpr double kNegligibleWeight = 1e-18;

struct Support {
  std::vector<double> weight;
  std::vector<double> expected;  // window mean per kept node
  std::vector<double> b;
};

Support mixture_support(const PosteriorGrid& grid, const ProcessModel& model, double t, double h) {
  Support s;
  const auto w = grid.weights();
  double kept = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < kNegligibleWeight) continue;
    const auto theta = grid.node(i);
    s.weight.push_back(w[i]);
    s.expected.push_back(std::max(model.window(t, h, theta), 0.0));
    s.b.push_back(theta.b);
    kept += w[i];
  }
  for (auto& v : s.weight) v /= kept;
  return s;
}

void check_window(double t, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("forecast window must be positive");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("forecast time must be >= 0");
}

// Range of counts outside of which a Poisson(lambda) pmf is below ~1e-20.
std::pair<std::size_t, std::size_t> poisson_span(double lambda) {
  const double spread = 10.0 * std::sqrt(lambda);
  const double lo = std::floor(lambda - spread - 5.0);
  const double hi = std::ceil(lambda + spread + 20.0);
  return {lo > 0.0 ? static_cast<std::size_t>(lo) : 0, static_cast<std::size_t>(hi)};
}

// Adds weight * Poisson(n; lambda) into pmf for every n in the span.
void add_poisson(std::vector<double>& pmf, double lambda, double weight) {
  if (lambda <= 0.0) {
    pmf[0] += weight;
    return;
  }
  const auto [lo, hi] = poisson_span(lambda);
  if (pmf.size() <= hi) pmf.resize(hi + 1, 0.0);
  const double log_lambda = std::log(lambda);
  double lp = static_cast<double>(lo) * log_lambda - lambda - std::lgamma(static_cast<double>(lo) + 1.0);
  for (std::size_t n = lo; n <= hi; ++n) {
    if (n > lo) lp += log_lambda - std::log(static_cast<double>(n));
    pmf[n] += weight * std::exp(lp);
  }
}

void finish(CountForecast& f) {
  double cumulative = 0.0;
  std::size_t n_max = 0;
  for (; n_max < f.pmf.size(); ++n_max) {
    cumulative += f.pmf[n_max];
    if (1.0 - cumulative < kTailTolerance) break;
  }
  n_max = std::min(n_max, f.pmf.size() - 1);
  double total = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) total += f.pmf[n];
  const double tail = 1.0 - total;
  f.pmf.resize(n_max + 1);
  if (tail > 0.0) {
    f.pmf.back() += tail;
    f.tail_folded = true;
  }

  const double lower_tail = 0.5 * (1.0 - kCountCredibleMass);
  cumulative = 0.0;
  bool lo_set = false;
  f.credible_hi = f.pmf.size() - 1;
  for (std::size_t n = 0; n < f.pmf.size(); ++n) {
    cumulative += f.pmf[n];
    if (!lo_set && cumulative > lower_tail) {
      f.credible_lo = n;
      lo_set = true;
    }
    if (cumulative >= 1.0 - lower_tail - 1e-12) {
      f.credible_hi = n;
      break;
    }
  }
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t n = 0; n < f.pmf.size(); ++n) {
    const double x = static_cast<double>(n);
    mean += x * f.pmf[n];
    second += x * x * f.pmf[n];
  }
  f.variance = std::max(second - mean * mean, 0.0);
}

}  // namespace

double CountForecast::cdf(std::size_t n) const {
  double c = 0.0;
  for (std::size_t i = 0; i <= n && i < pmf.size(); ++i) c += pmf[i];
  return c;
}

std::vector<double> default_magnitude_mesh(double m0, double mu, double step) {
  if (!(step > 0.0) || !(m0 < mu)) throw InvalidArgument("magnitude mesh: need m0 < mu, step > 0");
  std::vector<double> mesh;
  for (std::size_t i = 0;; ++i) {
    const double m = m0 + step * static_cast<double>(i);
    if (m >= mu - 1e-9) break;
    mesh.push_back(m);
  }
  mesh.push_back(mu);
  return mesh;
}

std::vector<double> window_expectations(const PosteriorGrid& grid, const ProcessModel& model,
                                        double t, double h) {
  std::vector<double> out(grid.size());
  detail::parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = model.window(t, h, grid.node(i));
  });
  return out;
}

CountForecast poisson_forecast(double expected, double t, double h) {
  CountForecast f;
  f.t = t;
  f.h = h;
  f.pmf.assign(1, 0.0);
  add_poisson(f.pmf, std::max(expected, 0.0), 1.0);
  f.mean = std::max(expected, 0.0);
  finish(f);
  return f;
}

CountForecast forecast_counts(const PosteriorGrid& grid, const ProcessModel& model, double t,
                              double h) {
  check_window(t, h);
  const auto support = mixture_support(grid, model, t, h);
  CountForecast f;
  f.t = t;
  f.h = h;
  f.pmf.assign(1, 0.0);
  for (std::size_t i = 0; i < support.weight.size(); ++i) {
    add_poisson(f.pmf, support.expected[i], support.weight[i]);
    f.mean += support.weight[i] * support.expected[i];
  }
  finish(f);
  return f;
}

CountForecast forecast_counts_plugin(const RateParams& theta, const ProcessModel& model, double t,
                                     double h) {
  check_window(t, h);
  return poisson_forecast(model.window(t, h, theta), t, h);
}

CountForecast forecast_counts_ergodic(const PosteriorGrid& grid, const ProcessModel& model,
                                      double t, double h) {
  check_window(t, h);
  const auto support = mixture_support(grid, model, t, h);
  double mean = 0.0;
  for (std::size_t i = 0; i < support.weight.size(); ++i) {
    mean += support.weight[i] * support.expected[i];
  }
  return poisson_forecast(mean, t, h);
}

MaxMagForecast forecast_max_magnitude(const PosteriorGrid& grid, const ProcessModel& model,
                                      double t, double h, std::span<const double> mesh) {
  check_window(t, h);
  const auto support = mixture_support(grid, model, t, h);
  MaxMagForecast f;
  f.t = t;
  f.h = h;
  if (mesh.empty()) {
    f.mesh = default_magnitude_mesh(model.m0, model.mu);
  } else {
    f.mesh.assign(mesh.begin(), mesh.end());
  }

  const auto exceedance = [&](double m) {
    double no_exceed = 0.0;
    for (std::size_t i = 0; i < support.weight.size(); ++i) {
      const MagnitudeModel g{support.b[i], model.m0, model.mu};
      no_exceed += support.weight[i] * std::exp(-support.expected[i] * ccdf(m, g));
    }
    return std::clamp(1.0 - no_exceed, 0.0, 1.0);
  };

  f.ccdf.reserve(f.mesh.size());
  for (double m : f.mesh) {
    if (m < model.m0 || m > model.mu) throw InvalidArgument("magnitude mesh outside [m0, mu]");
    f.ccdf.push_back(exceedance(m));
  }
  // Enforce exact monotonicity against rounding in the mixture sum.
  for (std::size_t i = 1; i < f.ccdf.size(); ++i) f.ccdf[i] = std::min(f.ccdf[i], f.ccdf[i - 1]);

  const double at_m0 = exceedance(model.m0);
  f.p_no_event = 1.0 - at_m0;
  const auto solve = [&](double level) -> std::optional<double> {
    if (at_m0 <= level) return std::nullopt;
    double lo = model.m0;
    double hi = model.mu;
    for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (exceedance(mid) > level) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  f.lower = solve(1.0 - kMaxMagLowerTail);
  f.upper = solve(kMaxMagUpperTail);
  return f;
}

}  // namespace fiseis
