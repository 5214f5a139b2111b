#include "fiseis/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "fiseis/error.hpp"
#include "fiseis/forecast.hpp"

namespace fiseis {

namespace {

constexpr std::size_t kMinSample = 5;
constexpr std::size_t kAsymptoticFrom = 35;

using Matrix = std::vector<double>;  // row-major m x m

Matrix multiply(const Matrix& a, const Matrix& b, std::size_t m) {
  Matrix c(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const double aik = a[i * m + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i * m + j] += aik * b[k * m + j];
    }
  }
  return c;
}

// Matrix power with a running power-of-ten exponent to avoid overflow.
void matrix_power(const Matrix& a, std::size_t m, std::size_t n, Matrix& out, int& exponent) {
  if (n == 1) {
    out = a;
    exponent = 0;
    return;
  }
  matrix_power(a, m, n / 2, out, exponent);
  out = multiply(out, out, m);
  exponent *= 2;
  if (n % 2 == 1) out = multiply(a, out, m);
  if (out[(m / 2) * m + m / 2] > 1e140) {
    for (auto& v : out) v *= 1e-140;
    exponent += 140;
  }
}

double asymptotic_coefficient(double alpha) {
  if (alpha == 0.05) return 1.358;
  if (alpha == 0.01) return 1.628;
  // Solve the Kolmogorov limit 2 sum (-1)^(k-1) exp(-2 k^2 c^2) = alpha.
  double lo = 0.3;
  double hi = 3.0;
  for (int it = 0; it < 200; ++it) {
    const double c = 0.5 * (lo + hi);
    double tail = 0.0;
    for (int k = 1; k < 100; ++k) {
      tail += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * c * c);
    }
    if (tail > alpha) {
      lo = c;
    } else {
      hi = c;
    }
  }
  return 0.5 * (lo + hi);
}

KsReport ks_sorted(std::vector<double> x) {
  if (x.size() < kMinSample) {
    throw InsufficientSample("KS test needs at least 5 samples, got " + std::to_string(x.size()));
  }
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  KsReport r;
  r.n = x.size();
  double d = 0.0;
  r.ecdf.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = std::clamp(x[i], 0.0, 1.0);
    const double above = static_cast<double>(i + 1) / n - u;
    const double below = u - static_cast<double>(i) / n;
    d = std::max({d, above, below});
    r.ecdf.emplace_back(x[i], static_cast<double>(i + 1) / n);
  }
  r.d_n = std::clamp(d, 0.0, 1.0);
  r.band_95 = ks_critical_value(r.n, 0.05);
  r.band_99 = ks_critical_value(r.n, 0.01);
  r.pass_95 = r.d_n <= r.band_95;
  r.pass_99 = r.d_n <= r.band_99;
  return r;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

RescaledTimes rescale(const SeismicCatalog& catalog, const CumulativeFn& cumulative) {
  RescaledTimes r;
  r.taus.reserve(catalog.size());
  for (const auto& e : catalog.events()) {
    const double tau = cumulative(e.t);
    if (!std::isfinite(tau)) throw InvalidArgument("rescale: cumulative rate is not finite");
    if (!r.taus.empty() && tau < r.taus.back()) {
      throw InvalidArgument("rescale: cumulative rate decreases between events");
    }
    r.taus.push_back(tau);
  }
  r.total = cumulative(catalog.t_end());
  if (!std::isfinite(r.total) || (!r.taus.empty() && r.total < r.taus.back())) {
    throw InvalidArgument("rescale: cumulative rate decreases before the window end");
  }
  return r;
}

double ks_exact_cdf(std::size_t n, double d) {
  if (n == 0) throw InvalidArgument("ks_exact_cdf: n must be positive");
  if (d <= 0.0) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = static_cast<double>(n) * d;
  const auto k = static_cast<std::size_t>(nd) + 1;
  const std::size_t m = 2 * k - 1;
  const double h = static_cast<double>(k) - nd;

  Matrix H(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i + 1 >= j) H[i * m + j] = 1.0;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    H[i * m] -= std::pow(h, static_cast<double>(i + 1));
    H[(m - 1) * m + i] -= std::pow(h, static_cast<double>(m - i));
  }
  if (2.0 * h - 1.0 > 0.0) H[(m - 1) * m] += std::pow(2.0 * h - 1.0, static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i + 1 > j) {
        for (std::size_t g = 1; g <= i + 1 - j; ++g) H[i * m + j] /= static_cast<double>(g);
      }
    }
  }
  Matrix Q;
  int exponent = 0;
  matrix_power(H, m, n, Q, exponent);
  double s = Q[(k - 1) * m + (k - 1)];
  for (std::size_t i = 1; i <= n; ++i) {
    s = s * static_cast<double>(i) / static_cast<double>(n);
    if (s < 1e-140) {
      s *= 1e140;
      exponent -= 140;
    }
  }
  return std::clamp(s * std::pow(10.0, exponent), 0.0, 1.0);
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0) throw InvalidArgument("ks_critical_value: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("ks_critical_value: alpha in (0, 1)");
  if (n >= kAsymptoticFrom) {
    return asymptotic_coefficient(alpha) / std::sqrt(static_cast<double>(n));
  }
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, double>, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find({n, alpha}); it != cache.end()) return it->second;
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ks_exact_cdf(n, mid) < 1.0 - alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double value = 0.5 * (lo + hi);
  std::lock_guard lock(mutex);
  cache[{n, alpha}] = value;
  return value;
}

KsReport ks_uniform(std::span<const double> samples) {
  return ks_sorted(std::vector<double>(samples.begin(), samples.end()));
}

KsReport ks_test(const RescaledTimes& rescaled) {
  if (rescaled.taus.size() < kMinSample) {
    throw InsufficientSample("KS test needs at least 5 events");
  }
  if (!(rescaled.total > 0.0)) throw InvalidArgument("ks_test: total mass must be positive");
  std::vector<double> x;
  x.reserve(rescaled.taus.size());
  for (double tau : rescaled.taus) x.push_back(tau / rescaled.total);
  return ks_sorted(std::move(x));
}

BermanReport berman_test(const RescaledTimes& rescaled) {
  if (rescaled.taus.size() < kMinSample) {
    throw InsufficientSample("Berman test needs at least 5 events");
  }
  BermanReport r;
  r.uniform_scores.reserve(rescaled.taus.size());
  double previous = 0.0;
  for (double tau : rescaled.taus) {
    r.uniform_scores.push_back(-std::expm1(-(tau - previous)));
    previous = tau;
  }
  r.ks = ks_uniform(r.uniform_scores);
  return r;
}

LagScatter lag_scatter(std::span<const double> u) {
  if (u.size() < 2) throw InsufficientSample("lag scatter needs at least 2 scores");
  LagScatter s;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) s.pairs.emplace_back(u[i], u[i + 1]);
  if (s.pairs.size() >= 2) {
    const auto rx = average_ranks(u.first(u.size() - 1));
    const auto ry = average_ranks(u.subspan(1));
    s.rank_correlation = pearson(rx, ry);
  }
  return s;
}

ModelCheck check_model(std::string name, const SeismicCatalog& catalog,
                       const CumulativeFn& cumulative) {
  ModelCheck c;
  c.name = std::move(name);
  c.rescaled = rescale(catalog, cumulative);
  c.ks = ks_test(c.rescaled);
  c.berman = berman_test(c.rescaled);
  c.lag = lag_scatter(c.berman.uniform_scores);
  return c;
}

std::array<ModelCheck, 4> validate_model_suite(const SeismicCatalog& catalog,
                                               const ProcessModel& model,
                                               const PosteriorGrid& grid,
                                               const PosteriorSummary& summary) {
  if (!summary.mle) throw InvalidArgument("validate_model_suite: summary has no MLE");
  const auto plug_in = [&](const RateParams& theta) -> CumulativeFn {
    return [&model, theta](double t) { return model.cumulative(t, theta); };
  };
  return {check_model("mle", catalog, plug_in(*summary.mle)),
          check_model("map", catalog, plug_in(summary.map)),
          check_model("mean", catalog, plug_in(summary.mean)),
          check_model("bayes_average", catalog, [&](double t) {
            return bayes_average_cumulative(grid, t, model);
          })};
}

}  // namespace fiseis
