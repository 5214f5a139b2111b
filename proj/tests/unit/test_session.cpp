#include <doctest.h>

#include <cmath>

#include "fiseis/error.hpp"
#include "fiseis/session.hpp"
#include "fiseis/simulator.hpp"
#include "oracles.hpp"

using namespace fiseis;
using namespace fiseis::testing;

namespace {
SessionConfig basel_config(std::size_t nodes = 24) {
  SessionConfig c;
  c.schedule = basel_profile();
  c.m0 = kBaselM0;
  c.grid.nodes_per_axis = nodes;
  c.fit_mle = false;
  return c;
}

SeismicCatalog basel(std::uint64_t seed) {
  return simulate({kTruth, basel_profile(), {kTruth.b, kBaselM0, 7.0}, kBaselEnd, seed});
}

double max_log_gap(const PosteriorGrid& a, const PosteriorGrid& b) {
  double worst = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    if (a.weights()[f] > 0.0 || b.weights()[f] > 0.0) {
      worst = std::max(worst, std::abs(a.log_density(f) - b.log_density(f)));
    }
  }
  return worst;
}
}  // namespace

TEST_CASE("event ordering and shut-in guards") {
  Session s(basel_config(16));
  const std::vector<SeismicEvent> first{{0.1, 1.0}, {0.2, 1.5}};
  s.add_events(first);
  CHECK(s.now() == 0.2);
  CHECK(s.events().size() == 2);
  const std::vector<SeismicEvent> older{{0.15, 1.0}};
  CHECK_THROWS_AS(s.add_events(older), ConflictError);
  const std::vector<SeismicEvent> same{{0.2, 1.0}};
  CHECK_THROWS_AS(s.add_events(same), ConflictError);
  const std::vector<SeismicEvent> small{{0.3, 0.5}};
  CHECK_THROWS_AS(s.add_events(small), InvalidArgument);
  const std::vector<SeismicEvent> unsorted{{0.5, 1.0}, {0.4, 1.0}};
  CHECK_THROWS_AS(s.add_events(unsorted), ConflictError);
  CHECK(s.events().size() == 2);
  s.advance_to(1.0);
  const std::vector<SeismicEvent> stale{{0.5, 1.0}};
  CHECK_THROWS_AS(s.add_events(stale), ConflictError);
  CHECK_THROWS_AS(s.advance_to(0.5), ConflictError);
  CHECK_THROWS_AS(s.declare_shut_in(0.5), ConflictError);
  CHECK(s.mode() == LikelihoodMode::partial);
  s.declare_shut_in(2.0);
  CHECK(s.mode() == LikelihoodMode::complete);
  CHECK(s.now() == 2.0);
  CHECK(s.active_profile().shut_in() == 2.0);
  CHECK_THROWS_AS(s.declare_shut_in(3.0), ConflictError);
  CHECK_THROWS_AS(s.what_if(3.0), ConflictError);
}

TEST_CASE("a shut-in planned in the schedule is declared when the clock passes it") {
  Session s(basel_config(16));
  s.advance_to(kBaselShutIn);
  CHECK(s.mode() == LikelihoodMode::partial);
  s.advance_to(kBaselShutIn + 0.01);
  CHECK(s.mode() == LikelihoodMode::complete);
  CHECK(s.shut_in() == kBaselShutIn);
}

TEST_CASE("incremental updates equal the batch posterior") {
  const auto cat = basel(1);
  const auto cfg = basel_config(32);
  Session s(cfg);
  for (const auto& e : cat.events()) s.add_events(std::span(&e, 1));
  s.advance_to(kBaselEnd);
  const auto axes = make_axes(cfg.prior, cfg.grid);
  const auto batch = compute_posterior(LikelihoodContext::complete(cat, basel_profile()), cfg.prior, axes);
  CHECK(max_log_gap(s.posterior(), batch) < 1e-9);

  Session partial(cfg);
  const auto early = cat.truncated(3.0);
  partial.add_events(early.events(), 3.0);
  const auto pb = compute_posterior(LikelihoodContext::partial(early, basel_profile(), 3.0), cfg.prior, axes);
  CHECK(max_log_gap(partial.posterior(), pb) < 1e-9);
}

TEST_CASE("explicit early shut-in matches a batch fit on the truncated schedule") {
  const auto cat = basel(2).truncated(3.0);
  const auto cfg = basel_config(24);
  Session s(cfg);
  s.add_events(cat.events(), 3.0);
  s.declare_shut_in(3.0);
  s.advance_to(4.0);
  const auto profile = InjectionProfile::constant(kBaselRate, 3.0);
  const auto batch = compute_posterior(LikelihoodContext::complete(cat.with_t_end(4.0), profile),
                                       cfg.prior, make_axes(cfg.prior, cfg.grid));
  CHECK(max_log_gap(s.posterior(), batch) < 1e-9);
}

TEST_CASE("replay") {
  const auto cat = basel(3);
  auto cfg = basel_config(32);
  const auto empty = compute_posterior(
      LikelihoodContext::partial(SeismicCatalog::make({}, kBaselM0, 0.0), basel_profile(), 0.0),
      cfg.prior, make_axes(cfg.prior, cfg.grid));
  const auto prior_tau = summarize(empty).marginals[kAxisTau].mass;
  std::uint64_t last_seq = 0;
  double last_t = -1.0;
  const auto result = replay(cat, cfg, {0.25, false}, [&](const Session&, const Snapshot& snap) {
    CHECK(snap.sequence > last_seq);
    CHECK(snap.t_now > last_t);
    last_seq = snap.sequence;
    last_t = snap.t_now;
    CHECK((snap.likelihood_mode == LikelihoodMode::partial) == !snap.shut_in.has_value());
    if (snap.t_now <= kBaselShutIn) {
      CHECK(snap.likelihood_mode == LikelihoodMode::partial);
      const auto& tau = snap.summary.marginals[kAxisTau].mass;
      double worst = 0.0;
      for (std::size_t k = 0; k < tau.size(); ++k) {
        worst = std::max(worst, std::abs(std::log(tau[k]) - std::log(prior_tau[k])));
      }
      CHECK(worst < 1e-9);
    } else {
      CHECK(snap.likelihood_mode == LikelihoodMode::complete);
    }
  });
  CHECK(result.snapshots.front().t_now == 0.0);
  CHECK(result.snapshots.back().t_now == kBaselEnd);
  CHECK(result.snapshots.size() == 49);
  const auto batch = compute_posterior(LikelihoodContext::complete(cat, basel_profile()), cfg.prior,
                                       make_axes(cfg.prior, cfg.grid));
  CHECK(max_log_gap(result.final_posterior, batch) < 1e-9);
}

TEST_CASE("snapshot contents") {
  auto cfg = basel_config(20);
  cfg.fit_mle = true;
  Session s(cfg);
  const auto cat = basel(4).truncated(1.0);
  s.add_events(cat.events(), 1.0);
  const auto snap = s.snapshot();
  CHECK(snap.n_events == cat.size());
  CHECK(snap.t_now == 1.0);
  REQUIRE(snap.summary.mle);
  CHECK(snap.count_forecast.h == cfg.h_days);
  CHECK(snap.maxmag_forecast.mesh.front() == kBaselM0);
  CHECK(snap.count_forecast.pmf == s.forecast_counts(cfg.h_days).pmf);
}

TEST_CASE("what-if shut-in never raises the expected count at any node") {
  const auto cat = basel(5).truncated(2.0);
  Session s(basel_config(24));
  s.add_events(cat.events(), 2.0);
  for (double at : {2.0, 3.0, 5.5}) {
    const auto w = s.what_if(at);
    CHECK(w.issue_time == at);
    CHECK(w.whatif_counts.mean <= w.baseline_counts.mean);
    const ProcessModel base{InjectionProfile::constant(kBaselRate), kBaselM0, 7.0};
    const ProcessModel stop{InjectionProfile::constant(kBaselRate, at), kBaselM0, 7.0};
    for (double t : {at, at + 0.1, at + 1.0}) {
      const auto eb = window_expectations(s.posterior(), base, t, kDefaultWindowDays);
      const auto es = window_expectations(s.posterior(), stop, t, kDefaultWindowDays);
      for (std::size_t f = 0; f < eb.size(); ++f) CHECK(es[f] <= eb[f]);
    }
    CHECK(w.whatif_maxmag.ccdf.front() <= w.baseline_maxmag.ccdf.front());
  }
  CHECK_THROWS_AS(s.what_if(1.0), ConflictError);
}

TEST_CASE("a rejected write leaves the session unchanged") {
  auto cfg = basel_config(16);
  cfg.schedule = InjectionProfile::make({{0.0, 1000.0}, {1.0, 0.0}, {2.0, 1000.0}});
  Session s(cfg);
  const std::vector<SeismicEvent> ok{{0.5, 1.0}};
  s.add_events(ok);
  const auto version = s.version();
  const auto before = std::vector<double>(s.posterior().weights().begin(), s.posterior().weights().end());
  // No flow at t = 1.5: every node has zero likelihood.
  const std::vector<SeismicEvent> impossible{{1.5, 1.0}};
  CHECK_THROWS_AS(s.add_events(impossible), EvidenceUnderflow);
  CHECK(s.events().size() == 1);
  CHECK(s.now() == 0.5);
  CHECK(s.version() == version);
  CHECK(std::equal(before.begin(), before.end(), s.posterior().weights().begin()));
  const std::vector<SeismicEvent> later{{2.5, 1.1}};
  s.add_events(later);
  CHECK(s.events().size() == 2);
}
