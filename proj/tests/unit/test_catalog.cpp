#include <doctest.h>

#include "fiseis/catalog.hpp"
#include "fiseis/error.hpp"
#include "fiseis/injection.hpp"
#include "fiseis/random.hpp"
#include "oracles.hpp"

using namespace fiseis;

TEST_CASE("parse_catalog sorts rows") {
  const auto cat = parse_catalog("t_days,magnitude\n0.5,1.2\n0.3,0.9\n", 0.8);
  REQUIRE(cat.size() == 2);
  CHECK(cat.events()[0].t == 0.3);
  CHECK(cat.events()[1].t == 0.5);
  CHECK(cat.t_end() == 0.5);
}

TEST_CASE("parse_catalog drops events below completeness") {
  const auto res = parse_catalog_detailed("t_days,magnitude\n0.3,0.5\n", 0.8);
  CHECK(res.catalog.empty());
  CHECK(res.below_completeness == 1);
}

TEST_CASE("Basel-style 12-day catalog with m0 = 0.8") {
  std::string text = "t_days,magnitude\r\n";
  for (int i = 0; i < 24; ++i) text += format_double(0.5 * i + 0.25) + ",1.1\r\n";
  const auto cat = parse_catalog(text, 0.8, 12.0);
  CHECK(cat.size() == 24);
  CHECK(cat.t_end() == 12.0);
  CHECK(cat.m0() == 0.8);
}

TEST_CASE("parse_catalog errors") {
  SUBCASE("bad header") { CHECK_THROWS_AS(parse_catalog("time,mag\n1,2\n", 0.0), ParseError); }
  SUBCASE("malformed row carries its line") {
    try {
      parse_catalog("t_days,magnitude\n0.1,1.0\n0.2,abc\n", 0.0);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("non-finite") { CHECK_THROWS_AS(parse_catalog("t_days,magnitude\ninf,1\n", 0.0), ParseError); }
  SUBCASE("duplicate timestamps rejected") {
    CHECK_THROWS_AS(parse_catalog("t_days,magnitude\n0.1,1.0\n0.1,1.3\n", 0.0), ParseError);
  }
  SUBCASE("t_end before last event") {
    CHECK_THROWS_AS(parse_catalog("t_days,magnitude\n5,1\n", 0.0, 4.0), ParseError);
  }
}

TEST_CASE("keep_first deduplication reports dropped lines without touching data") {
  CatalogParseOptions opt;
  opt.duplicates = DuplicatePolicy::keep_first;
  const auto res = parse_catalog_detailed("t_days,magnitude\n0.1,1.0\n0.1,1.3\n0.2,1.1\n", 0.0, opt);
  REQUIRE(res.catalog.size() == 2);
  CHECK(res.catalog.events()[0].m == 1.0);
  CHECK(res.dropped_duplicate_lines == std::vector<std::size_t>{3});
}

TEST_CASE("catalog CSV round-trips bit-identically") {
  CounterRng rng(11);
  std::vector<SeismicEvent> ev;
  double t = 0.0;
  for (int i = 0; i < 300; ++i) {
    t += rng.exponential() * 0.01;
    ev.push_back({t, 0.8 + 2.0 * rng.uniform()});
  }
  const auto cat = SeismicCatalog::make(ev, 0.8, t);
  const auto text = write_catalog_csv(cat);
  const auto back = parse_catalog(text, 0.8, t);
  CHECK(back == cat);
  CHECK(write_catalog_csv(back) == text);
}

TEST_CASE("parse_injection examples") {
  SUBCASE("single step with shut-in") {
    const auto p = parse_injection("t_days,rate_m3_per_day,shutin\n0,2400,0\n6,0,1\n");
    REQUIRE(p.shut_in());
    CHECK(*p.shut_in() == 6.0);
    CHECK(p.rate(3.0) == 2400.0);
    CHECK(p.rate(5.999) == 2400.0);
    CHECK(p.rate(7.0) == 0.0);
  }
  SUBCASE("three segments") {
    const auto p = parse_injection("t_days,rate_m3_per_day,shutin\n0,1000,0\n2,2000,0\n5,0,1\n");
    CHECK(p.breakpoints().size() == 3);
    CHECK(*p.shut_in() == 5.0);
    CHECK(p.rate(1.0) == 1000.0);
    CHECK(p.rate(2.0) == 2000.0);
    CHECK(p.shut_in_rate() == 2000.0);
  }
  SUBCASE("empty body") {
    CHECK_THROWS_AS(parse_injection("t_days,rate_m3_per_day,shutin\n"), ParseError);
    CHECK_THROWS_AS(parse_injection(""), ParseError);
  }
  SUBCASE("decreasing times") {
    CHECK_THROWS_AS(parse_injection("t_days,rate_m3_per_day,shutin\n0,1,0\n2,1,0\n1,0,1\n"),
                    ParseError);
  }
  SUBCASE("negative rate") {
    CHECK_THROWS_AS(parse_injection("t_days,rate_m3_per_day,shutin\n0,-1,0\n"), ParseError);
  }
  SUBCASE("two shut-in rows") {
    CHECK_THROWS_AS(parse_injection("t_days,rate_m3_per_day,shutin\n0,1,0\n1,0,1\n2,0,1\n"),
                    ParseError);
  }
}

TEST_CASE("cumulative_volume examples") {
  const auto c = InjectionProfile::constant(2400.0);
  CHECK(cumulative_volume(c, 0.5) == doctest::Approx(1200.0).epsilon(1e-15));
  CHECK(cumulative_volume(c, 0.0) == 0.0);
  const auto p = parse_injection("t_days,rate_m3_per_day,shutin\n0,1000,0\n2,2000,0\n5,0,1\n");
  CHECK(cumulative_volume(p, 4.0) == doctest::Approx(1000.0 * 2 + 2000.0 * 2).epsilon(1e-15));
  CHECK(cumulative_volume(p, 50.0) == doctest::Approx(8000.0).epsilon(1e-15));
}

TEST_CASE("cumulative_volume is continuous, nondecreasing, with the step rate as derivative") {
  CounterRng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = testing::random_profile(rng, rep % 2 == 0);
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double t = 0.05 * i;
      const double v = cumulative_volume(p, t);
      CHECK(v >= prev);
      prev = v;
    }
    for (const auto& bp : p.breakpoints()) {
      const double eps = 1e-9;
      CHECK(std::abs(cumulative_volume(p, bp.t + eps) - cumulative_volume(p, bp.t - eps)) <
            1e-4);
      const double t = bp.t + 0.1;
      const double h = 1e-4;
      if (p.rate(t) == p.rate(t + h)) {
        CHECK((cumulative_volume(p, t + h) - cumulative_volume(p, t)) / h ==
              doctest::Approx(p.rate(t)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("injection CSV round-trips bit-identically") {
  CounterRng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto p = testing::random_profile(rng, rep % 3 != 0);
    const auto text = write_injection_csv(p);
    const auto back = parse_injection(text);
    CHECK(back == p);
    CHECK(write_injection_csv(back) == text);
  }
}

TEST_CASE("profile invariants enforced at construction") {
  using BP = InjectionProfile::Breakpoint;
  CHECK_THROWS_AS(InjectionProfile::make({{0, 1}, {0, 2}}), InvalidArgument);
  CHECK_THROWS_AS(InjectionProfile::make({{0, 0}, {1, 0}}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(InjectionProfile::make({BP{0, 1}, BP{1, 2}}, 1.0), InvalidArgument);
  CHECK_NOTHROW(InjectionProfile::make({{0, 1}, {1, 0}}, 1.0));
}

TEST_CASE("catalog invariants enforced at construction") {
  CHECK_THROWS_AS(SeismicCatalog::make({{1, 1}, {1, 1.2}}, 0.0, 2.0), InvalidArgument);
  CHECK_THROWS_AS(SeismicCatalog::make({{1, 0.5}}, 0.8, 2.0), InvalidArgument);
  CHECK_THROWS_AS(SeismicCatalog::make({{3, 1}}, 0.0, 2.0), InvalidArgument);
  const auto c = SeismicCatalog::make({{0.5, 0.8}, {1.0, 2.0}}, 0.8, 2.0);
  CHECK(c.truncated(0.7).size() == 1);
  CHECK(c.truncated(0.7).t_end() == 0.7);
}
