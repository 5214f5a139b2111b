#include "fiseis/session.hpp"

#include <algorithm>
#include <cmath>

#include "fiseis/catalog.hpp"
#include "fiseis/error.hpp"

namespace fiseis {

namespace {

InjectionProfile without_shut_in(const InjectionProfile& schedule) {
  if (!schedule.shut_in()) return schedule;
  auto bps = schedule.breakpoints();
  bps.pop_back();
  return InjectionProfile::make(std::move(bps));
}

}  // namespace

Session::Session(SessionConfig config) : config_(std::move(config)) {
  config_.prior.validate();
  MagnitudeModel{1.0, config_.m0, config_.mu}.validate();
  if (config_.schedule.breakpoints().empty()) throw InvalidArgument("session needs a schedule");
  if (!(config_.h_days > 0.0)) throw InvalidArgument("session: forecast window must be > 0");
  axes_ = make_axes(config_.prior, config_.grid);
  log_prior_ = evaluate_log_prior(axes_, config_.prior);
  open_schedule_ = without_shut_in(config_.schedule);
  active_ = config_.schedule;
  running_ = LikelihoodStats(config_.m0, config_.mu);
  refresh();
}

struct Session::Rollback {
  std::size_t n_events;
  LikelihoodStats running;
  InjectionProfile active;
  std::optional<double> declared;
  double now;

  explicit Rollback(const Session& s)
      : n_events(s.events_.size()), running(s.running_), active(s.active_),
        declared(s.declared_), now(s.now_) {}
  void restore(Session& s) const {
    s.events_.resize(n_events);
    s.running_ = running;
    s.active_ = active;
    s.declared_ = declared;
    s.now_ = now;
  }
};

void Session::move_clock(double t) {
  const auto planned = config_.schedule.shut_in();
  if (planned && !declared_ && t > *planned) {
    declared_ = *planned;
    active_ = open_schedule_.with_shut_in(*planned);
    running_ = LikelihoodStats(config_.m0, config_.mu);
    for (const auto& e : events_) running_.observe(e, active_);
  }
  if (t > now_) now_ = t;
}

void Session::add_events(std::span<const SeismicEvent> batch, std::optional<double> t_now) {
  double last = events_.empty() ? -1.0 : events_.back().t;
  for (const auto& e : batch) {
    if (!std::isfinite(e.t) || !std::isfinite(e.m) || e.t < 0.0) {
      throw InvalidArgument("event time and magnitude must be finite, t >= 0");
    }
    if (e.m < config_.m0) throw InvalidArgument("event magnitude below completeness m0");
    if (!(e.t > last)) {
      throw ConflictError("event at t=" + format_double(e.t) +
                          " is not after the latest accepted event");
    }
    if (e.t < now_) {
      throw ConflictError("event at t=" + format_double(e.t) + " precedes the session clock");
    }
    if (declared_ && e.t < *declared_) {
      throw ConflictError("event precedes the declared shut-in");
    }
    last = e.t;
  }
  if (t_now && (!std::isfinite(*t_now) || *t_now < std::max(now_, last))) {
    throw ConflictError("t_now precedes the session clock or the submitted events");
  }
  const Rollback saved(*this);
  try {
    for (const auto& e : batch) {
      move_clock(e.t);
      events_.push_back(e);
      running_.observe(e, active_);
    }
    if (t_now) move_clock(*t_now);
    refresh();
  } catch (...) {
    saved.restore(*this);
    throw;
  }
}

void Session::advance_to(double t) {
  if (!std::isfinite(t)) throw InvalidArgument("clock time must be finite");
  if (t < now_) throw ConflictError("clock cannot move backwards");
  const Rollback saved(*this);
  try {
    move_clock(t);
    refresh();
  } catch (...) {
    saved.restore(*this);
    throw;
  }
}

void Session::declare_shut_in(double t_s) {
  if (declared_) throw ConflictError("shut-in already declared at t=" + format_double(*declared_));
  if (t_s < now_) throw ConflictError("shut-in time precedes the session clock");
  const Rollback saved(*this);
  try {
    active_ = open_schedule_.with_shut_in(t_s);
    declared_ = t_s;
    now_ = t_s;
    running_ = LikelihoodStats(config_.m0, config_.mu);
    for (const auto& e : events_) running_.observe(e, active_);
    refresh();
  } catch (...) {
    saved.restore(*this);
    throw;
  }
}

LikelihoodStats Session::stats() const {
  LikelihoodStats s = running_;
  if (declared_) {
    s.close_complete(active_, now_);
  } else {
    s.close_partial(active_, now_);
  }
  return s;
}

void Session::refresh() {
  auto log_unnorm = log_prior_;
  accumulate_log_likelihood(axes_, stats(), log_unnorm);
  posterior_ = PosteriorGrid::from_log_density(axes_, std::move(log_unnorm));
  ++version_;
}

SeismicCatalog Session::catalog() const {
  return SeismicCatalog::make(events_, config_.m0, now_, "session");
}

CountForecast Session::forecast_counts(double h) const {
  return fiseis::forecast_counts(posterior_, process(), now_, h);
}

MaxMagForecast Session::forecast_max_magnitude(double h) const {
  const auto mesh = default_magnitude_mesh(config_.m0, config_.mu, config_.mesh_step);
  return fiseis::forecast_max_magnitude(posterior_, process(), now_, h, mesh);
}

Snapshot Session::snapshot() const {
  Snapshot snap;
  snap.sequence = version_;
  snap.t_now = now_;
  snap.likelihood_mode = mode();
  snap.n_events = events_.size();
  snap.shut_in = declared_;

  const auto stats_now = stats();
  const auto& prior = config_.prior;
  snap.summary = summarize(posterior_, [&](const RateParams& theta) {
    return log_prior(theta, prior) + log_likelihood(theta, stats_now);
  });
  if (config_.fit_mle && !events_.empty()) {
    const auto ctx = declared_ ? LikelihoodContext::complete(catalog(), active_, config_.mu)
                               : LikelihoodContext::partial(catalog(), active_, now_, config_.mu);
    const auto bounds = ParamBounds::from_prior(prior);
    auto init = snap.summary.mean;
    init.tau = std::clamp(init.tau, bounds.lo.tau, bounds.hi.tau);
    try {
      snap.summary.mle = mle_fit(ctx, init, bounds).theta;
    } catch (const FitFailure&) {
    }
  }
  snap.count_forecast = forecast_counts(config_.h_days);
  snap.maxmag_forecast = forecast_max_magnitude(config_.h_days);
  return snap;
}

WhatIfResult Session::what_if(double shut_in_at, std::optional<double> h) const {
  if (declared_) throw ConflictError("shut-in already declared; what-if is moot");
  if (!std::isfinite(shut_in_at) || shut_in_at < now_) {
    throw ConflictError("what-if shut-in time precedes the session clock");
  }
  const double window = h.value_or(config_.h_days);
  const ProcessModel continued{open_schedule_, config_.m0, config_.mu};
  const ProcessModel hypothetical{open_schedule_.with_shut_in(shut_in_at), config_.m0, config_.mu};
  const auto mesh = default_magnitude_mesh(config_.m0, config_.mu, config_.mesh_step);

  WhatIfResult r;
  r.shut_in_at = shut_in_at;
  r.issue_time = shut_in_at;
  r.baseline_counts = fiseis::forecast_counts(posterior_, continued, shut_in_at, window);
  r.baseline_maxmag =
      fiseis::forecast_max_magnitude(posterior_, continued, shut_in_at, window, mesh);
  r.whatif_counts = fiseis::forecast_counts(posterior_, hypothetical, shut_in_at, window);
  r.whatif_maxmag =
      fiseis::forecast_max_magnitude(posterior_, hypothetical, shut_in_at, window, mesh);
  return r;
}

ReplayResult replay(const SeismicCatalog& catalog, const SessionConfig& config,
                    const ReplayOptions& options,
                    const std::function<void(const Session&, const Snapshot&)>& on_tick) {
  if (!(options.cadence > 0.0)) throw InvalidArgument("replay cadence must be positive");
  if (catalog.m0() != config.m0) throw InvalidArgument("replay: catalog m0 differs from config");
  Session session(config);

  std::vector<double> ticks;
  for (std::size_t k = 0;; ++k) {
    const double t = options.cadence * static_cast<double>(k);
    if (t > catalog.t_end()) break;
    ticks.push_back(t);
  }
  if (ticks.empty() || ticks.back() < catalog.t_end()) ticks.push_back(catalog.t_end());

  ReplayResult result;
  const auto events = catalog.events();
  std::size_t next = 0;
  for (double tick : ticks) {
    while (next < events.size() && events[next].t <= tick) {
      session.add_events(events.subspan(next, 1));
      ++next;
    }
    session.advance_to(tick);
    Snapshot snap;
    if (options.forecasts) {
      snap = session.snapshot();
    } else {
      snap.sequence = session.version();
      snap.t_now = session.now();
      snap.likelihood_mode = session.mode();
      snap.n_events = session.events().size();
      snap.shut_in = session.shut_in();
      snap.summary = summarize(session.posterior());
    }
    if (on_tick) on_tick(session, snap);
    result.snapshots.push_back(std::move(snap));
  }
  result.final_posterior = session.posterior();
  return result;
}

}  // namespace fiseis
