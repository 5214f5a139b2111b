#include <doctest.h>

#include <cmath>

#include "fiseis/error.hpp"
#include "fiseis/rate_model.hpp"
#include "oracles.hpp"

using namespace fiseis;
using testing::basel_profile;

TEST_CASE("rate_at examples") {
  const RateParams th{-0.5, 1.2, 2.0};
  SUBCASE("zero flow gives zero rate") {
    const auto p = InjectionProfile::make({{0.0, 0.0}, {1.0, 100.0}});
    CHECK(rate_at(0.5, th, p, 0.8) == 0.0);
  }
  SUBCASE("exponent cancellation") {
    const RateParams unit{1.2 * 0.8, 1.2, 2.0};
    CHECK(rate_at(0.3, unit, InjectionProfile::constant(1.0), 0.8) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("Basel-style injection rate") {
    // 10^(-0.5 - 0.96) * 2400 evaluated by hand.
    const double expected = std::pow(10.0, -1.46) * 2400.0;
    CHECK(rate_at(3.0, th, basel_profile(), 0.8) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(expected == doctest::Approx(83.22).epsilon(1e-4));
  }
  SUBCASE("one relaxation time after shut-in") {
    const auto p = basel_profile();
    CHECK(rate_at(6.0 + th.tau, th, p, 0.8) ==
          doctest::Approx(rate_at(6.0, th, p, 0.8) / std::exp(1.0)).epsilon(1e-14));
  }
  SUBCASE("continuity at shut-in") {
    const auto p = basel_profile();
    CHECK(rate_at(6.0, th, p, 0.8) == rate_at(5.5, th, p, 0.8));
    CHECK(rate_at(std::nextafter(6.0, 7.0), th, p, 0.8) ==
          doctest::Approx(rate_at(6.0, th, p, 0.8)).epsilon(1e-12));
  }
}

TEST_CASE("cumulative_rate examples") {
  const RateParams th{-0.5, 1.2, 2.0};
  const auto p = basel_profile();
  CHECK(cumulative_rate(0.0, th, p, 0.8) == 0.0);
  const double tail = cumulative_rate(6.0, th, p, 0.8) + rate_at(6.0, th, p, 0.8) * th.tau;
  CHECK(total_mass(th, p, 0.8) == doctest::Approx(tail).epsilon(1e-14));
  CHECK(cumulative_rate(1e4, th, p, 0.8) == doctest::Approx(tail).epsilon(1e-14));
  CHECK(std::isinf(total_mass(th, InjectionProfile::constant(10.0), 0.8)));
}

TEST_CASE("closed form matches adaptive quadrature on random parameters and profiles") {
  CounterRng rng(0xabc);
  for (int rep = 0; rep < 200; ++rep) {
    const auto p = testing::random_profile(rng, rep % 4 != 0);
    const auto th = testing::random_params(rng);
    const double t = 20.0 * rng.uniform();
    const double exact = cumulative_rate(t, th, p, 0.8);
    const double quad = testing::quad_cumulative(t, th, p, 0.8);
    if (quad == 0.0) {
      CHECK(exact == 0.0);
    } else {
      CHECK(std::abs(exact - quad) / quad < 1e-8);
    }
  }
}

TEST_CASE("inverse_cumulative") {
  const RateParams th{-0.5, 1.2, 2.0};
  const auto p = basel_profile();
  CHECK(inverse_cumulative(0.0, th, p, 0.8) == 0.0);
  const auto c = InjectionProfile::constant(1000.0);
  CHECK(inverse_cumulative(cumulative_rate(1.0, th, c, 0.8) / 2.0, th, c, 0.8) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(inverse_cumulative(total_mass(th, p, 0.8), th, p, 0.8), BeyondExtinction);

  CounterRng rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    const auto prof = testing::random_profile(rng);
    const auto par = testing::random_params(rng);
    const double mass = total_mass(par, prof, 0.8);
    for (int i = 0; i < 100; ++i) {
      const double x = mass * rng.uniform() * 0.999999;
      const double t = inverse_cumulative(x, par, prof, 0.8);
      CHECK(std::abs(cumulative_rate(t, par, prof, 0.8) - x) < 1e-9 * std::max(1.0, x));
    }
  }
}

TEST_CASE("inverse_cumulative skips zero-flow gaps and returns the earliest time") {
  const RateParams th{0.0, 1.0, 1.0};
  const auto p = InjectionProfile::make({{0.0, 0.0}, {2.0, 10.0}, {3.0, 0.0}, {4.0, 10.0}});
  const double at3 = cumulative_rate(3.0, th, p, 0.0);
  CHECK(inverse_cumulative(at3, th, p, 0.0) == doctest::Approx(3.0));
  CHECK(inverse_cumulative(1e-9, th, p, 0.0) > 2.0);
}

TEST_CASE("rate and cumulative are nonnegative, nondecreasing, continuous") {
  CounterRng rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const auto p = testing::random_profile(rng);
    const auto th = testing::random_params(rng);
    double prev = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double t = 0.01 * i;
      CHECK(rate_at(t, th, p, 0.8) >= 0.0);
      const double v = cumulative_rate(t, th, p, 0.8);
      CHECK(v >= prev);
      prev = v;
    }
    const double ts = *p.shut_in();
    const double l = cumulative_rate(ts - 1e-10, th, p, 0.8);
    const double r = cumulative_rate(ts + 1e-10, th, p, 0.8);
    CHECK(std::abs(r - l) < 1e-6);
  }
}

TEST_CASE("linearity in the profile and log10 scaling in a_fb and b") {
  CounterRng rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const auto p = testing::random_profile(rng);
    const auto th = testing::random_params(rng);
    const double k = 0.1 + 5.0 * rng.uniform();
    const double d = rng.uniform() - 0.5;
    const double t = 15.0 * rng.uniform();
    const double lam = rate_at(t, th, p, 0.8);
    const double cum = cumulative_rate(t, th, p, 0.8);
    CHECK(rate_at(t, th, p.scaled(k), 0.8) == doctest::Approx(k * lam).epsilon(1e-13));
    CHECK(cumulative_rate(t, th, p.scaled(k), 0.8) == doctest::Approx(k * cum).epsilon(1e-13));
    RateParams up = th;
    up.a_fb += d;
    CHECK(rate_at(t, up, p, 0.8) == doctest::Approx(std::pow(10.0, d) * lam).epsilon(1e-13));
    RateParams bb = th;
    bb.b += d;
    CHECK(rate_at(t, bb, p, 0.8) ==
          doctest::Approx(std::pow(10.0, -d * 0.8) * lam).epsilon(1e-13));
  }
}

TEST_CASE("no-shut-in profiles ignore tau") {
  const auto p = InjectionProfile::constant(500.0);
  RateParams a{-1.0, 1.0, 0.1};
  RateParams b{-1.0, 1.0, 50.0};
  CHECK(cumulative_rate(9.0, a, p, 0.8) == cumulative_rate(9.0, b, p, 0.8));
}

TEST_CASE("ln_pow10 base conversion") {
  for (double x : {-3.3, -1.46, 0.0, 0.5, 2.0}) {
    CHECK(ln_pow10(x) == doctest::Approx(std::log(std::pow(10.0, x))).epsilon(1e-14));
  }
  CHECK(kLn10 == doctest::Approx(std::log(10.0)).epsilon(1e-16));
}
