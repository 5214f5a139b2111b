#include <doctest.h>

#include <cmath>
#include <vector>

#include "fiseis/error.hpp"
#include "fiseis/prior.hpp"

using namespace fiseis;

namespace {
// Midpoint-rule integral of exp(log_prior) on an n x n x 4n grid.
double grid_mass(const JointPrior& prior, int n) {
  const int nt = 4 * n;
  const double tau_hi = prior.tau.quantile(1.0 - 1e-7);
  const double da = (prior.a_fb.u - prior.a_fb.l) / n;
  const double db = (prior.b.u - prior.b.l) / n;
  const double dt = tau_hi / nt;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < nt; ++k) {
        const RateParams th{prior.a_fb.l + (i + 0.5) * da, prior.b.l + (j + 0.5) * db,
                            (k + 0.5) * dt};
        total += std::exp(log_prior(th, prior));
      }
    }
  }
  return total * da * db * dt;
}
}  // namespace

TEST_CASE("log_prior support and flat case") {
  const JointPrior flat{{1, 1, -4, 1}, {1, 1, 0.5, 2.5}, {1.0, 1.0}};
  CHECK(std::isinf(log_prior({-4.5, 1.0, 1.0}, flat)));
  CHECK(std::isinf(log_prior({0.0, 2.6, 1.0}, flat)));
  CHECK(std::isinf(log_prior({0.0, 1.0, 0.0}, flat)));
  CHECK(std::isinf(log_prior({0.0, 1.0, -1.0}, flat)));
  for (double a : {-3.9, -1.0, 0.9}) {
    CHECK(flat.a_fb.log_pdf(a) == doctest::Approx(-std::log(5.0)).epsilon(1e-14));
  }
  CHECK(log_prior({0.0, 1.0, 2.0}, flat) ==
        doctest::Approx(-std::log(5.0) - std::log(2.0) - 2.0).epsilon(1e-14));
}

TEST_CASE("prior integrates to one on a fine grid") {
  const JointPrior smooth{{2.5, 3.5, -4, 1}, {4, 6, 0.5, 2.5}, {2.0, 0.8}};
  CHECK(std::abs(grid_mass(smooth, 120) - 1.0) < 1e-3);
}

TEST_CASE("fit_prior method-of-moments examples") {
  const PriorBounds unit{0.0, 1.0, 0.0, 1.0};
  const std::vector<RateParams> s{{0.25, 0.25, 2.0 - std::sqrt(2.0)},
                                  {0.5, 0.5, 2.0},
                                  {0.75, 0.75, 2.0 + std::sqrt(2.0)}};
  const auto prior = fit_prior(s, unit);
  CHECK(prior.a_fb.p == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(prior.a_fb.q == doctest::Approx(1.5).epsilon(1e-13));
  CHECK(prior.b.p == prior.b.q);
  // tau mean 2, unbiased variance 2.
  CHECK(prior.tau.alpha == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(prior.tau.beta == doctest::Approx(1.0).epsilon(1e-13));

  const auto g = fit_gamma(2.0, 4.0);
  CHECK(g.alpha == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.beta == doctest::Approx(0.5).epsilon(1e-15));

  const std::vector<RateParams> two{{0.5, 0.5, 2.0 - std::sqrt(2.0)},
                                    {0.5 + 1e-3, 0.5 + 1e-3, 2.0 + std::sqrt(2.0)}};
  CHECK(fit_prior(two, unit).tau.alpha == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("fit_prior errors") {
  const PriorBounds unit{0.0, 1.0, 0.0, 1.0};
  const std::vector<RateParams> wide{{0.01, 0.5, 1.0}, {0.99, 0.6, 2.0}};
  CHECK_THROWS_AS(fit_prior(wide, unit), DegenerateMoments);
  const std::vector<RateParams> outside{{1.5, 0.5, 1.0}, {0.5, 0.6, 2.0}};
  CHECK_THROWS_AS(fit_prior(outside, unit), InvalidArgument);
  const std::vector<RateParams> one{{0.5, 0.5, 1.0}};
  CHECK_THROWS_AS(fit_prior(one, unit), InvalidArgument);
  const std::vector<RateParams> neg_tau{{0.5, 0.5, -1.0}, {0.4, 0.6, 2.0}};
  CHECK_THROWS_AS(fit_prior(neg_tau, unit), InvalidArgument);
}

TEST_CASE("method-of-moments fixed point") {
  const std::vector<RateParams> s{
      {-1.2, 1.0, 0.5}, {-0.4, 1.4, 3.0}, {-2.0, 0.9, 7.0}, {-0.9, 1.2, 1.2}, {-1.5, 1.1, 4.4}};
  const auto prior = fit_prior(s);
  const auto check = [&](auto get, double m, double v) {
    double mean = 0.0;
    for (const auto& x : s) mean += get(x);
    mean /= s.size();
    double var = 0.0;
    for (const auto& x : s) var += (get(x) - mean) * (get(x) - mean);
    var /= s.size() - 1;
    CHECK(m == doctest::Approx(mean).epsilon(1e-12));
    CHECK(v == doctest::Approx(var).epsilon(1e-12));
  };
  check([](const RateParams& x) { return x.a_fb; }, prior.a_fb.mean(), prior.a_fb.variance());
  check([](const RateParams& x) { return x.b; }, prior.b.mean(), prior.b.variance());
  check([](const RateParams& x) { return x.tau; }, prior.tau.mean(), prior.tau.variance());
}

TEST_CASE("sample_prior") {
  const auto prior = default_prior();
  CounterRng rng(31);
  CHECK(sample_prior(prior, rng, 0).empty());
  const std::size_t n = 100000;
  const auto xs = sample_prior(prior, rng, n);
  double sa = 0, sb = 0, st = 0;
  for (const auto& x : xs) {
    CHECK(x.a_fb >= prior.a_fb.l);
    CHECK(x.a_fb <= prior.a_fb.u);
    CHECK(x.b >= prior.b.l);
    CHECK(x.b <= prior.b.u);
    CHECK(x.tau > 0.0);
    sa += x.a_fb;
    sb += x.b;
    st += x.tau;
  }
  CHECK(std::abs(sa / n - prior.a_fb.mean()) < 3 * std::sqrt(prior.a_fb.variance() / n));
  CHECK(std::abs(sb / n - prior.b.mean()) < 3 * std::sqrt(prior.b.variance() / n));
  CHECK(std::abs(st / n - prior.tau.mean()) < 3 * std::sqrt(prior.tau.variance() / n));
}

TEST_CASE("default prior covers the published single-site ranges") {
  const auto prior = default_prior();
  CHECK_NOTHROW(prior.validate());
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      for (int k = 0; k <= 20; ++k) {
        const RateParams th{-2.4 + 2.5 * i / 20.0, 0.77 + 0.83 * j / 20.0,
                            0.02 + 13.68 * k / 20.0};
        CHECK(std::isfinite(log_prior(th, prior)));
      }
    }
  }
  CHECK(prior.a_fb.l == -4.0);
  CHECK(prior.a_fb.u == 1.0);
  CHECK(prior.b.l == 0.5);
  CHECK(prior.b.u == 2.5);
  // Elicited as mean +/- 2 sd over each published range.
  CHECK(prior.a_fb.mean() == doctest::Approx(-1.15).epsilon(1e-12));
  CHECK(std::sqrt(prior.a_fb.variance()) == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(prior.b.mean() == doctest::Approx(1.185).epsilon(1e-12));
  CHECK(prior.tau.mean() == doctest::Approx(6.86).epsilon(1e-12));
}

TEST_CASE("gamma quantile") {
  const GammaPrior g{1.0, 0.5};
  CHECK(g.quantile(0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS((GammaPrior{0.0, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ScaledBeta{1, 1, 1, 1}.validate()), InvalidArgument);
}
