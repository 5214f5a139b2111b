#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fiseis/catalog.hpp"
#include "fiseis/forecast.hpp"
#include "fiseis/inference.hpp"
#include "fiseis/likelihood.hpp"
#include "fiseis/prior.hpp"

namespace fiseis {

inline constexpr double kDefaultCadenceDays = 0.1;

struct SessionConfig {
  JointPrior prior = default_prior();
  InjectionProfile schedule;  // may carry a planned shut-in
  double m0 = 0.0;
  double mu = kDefaultUpperMagnitude;
  GridSpec grid;
  double h_days = kDefaultWindowDays;
  double mesh_step = 0.05;
  bool fit_mle = true;  // include an MLE in snapshot summaries
};

/// Posterior state and forecasts at one session time.
struct Snapshot {
  std::uint64_t sequence = 0;
  double t_now = 0.0;
  LikelihoodMode likelihood_mode = LikelihoodMode::partial;
  std::size_t n_events = 0;
  std::optional<double> shut_in;
  PosteriorSummary summary;
  CountForecast count_forecast;
  MaxMagForecast maxmag_forecast;
};

struct WhatIfResult {
  double shut_in_at = 0.0;
  double issue_time = 0.0;
  CountForecast baseline_counts;
  MaxMagForecast baseline_maxmag;
  CountForecast whatif_counts;
  MaxMagForecast whatif_maxmag;
};

/**
 * Online updating of the posterior as events arrive.
 *
 * Grid axes and the log prior are fixed at construction. Each update folds
 * new events into running sufficient statistics and re-evaluates the
 * log-likelihood at every node, so the cost per update is O(nodes)
 * regardless of catalog length.
 *
 * The likelihood is partial until a shut-in is declared (explicitly, or
 * automatically when the clock passes a shut-in planned in the schedule),
 * complete afterwards. Writers are all-or-nothing: a call that throws leaves
 * the session unchanged. Not thread-safe: callers serialize writers.
 */
class Session {
 public:
  explicit Session(SessionConfig config);

  const SessionConfig& config() const noexcept { return config_; }
  double now() const noexcept { return now_; }
  std::optional<double> shut_in() const noexcept { return declared_; }
  LikelihoodMode mode() const noexcept {
    return declared_ ? LikelihoodMode::complete : LikelihoodMode::partial;
  }
  std::span<const SeismicEvent> events() const noexcept { return events_; }
  std::uint64_t version() const noexcept { return version_; }

  // Appends events in time order and moves the clock to max(t_now, last event).
  // Throws ConflictError for an event at or before the latest accepted event
  // or before the current clock; InvalidArgument for m < m0 or bad values.
  void add_events(std::span<const SeismicEvent> batch, std::optional<double> t_now = {});
  // Moves the clock forward. ConflictError if t < now().
  void advance_to(double t);
  // Switches to the complete likelihood. ConflictError on a second call or
  // when t_s precedes the clock.
  void declare_shut_in(double t_s);

  const PosteriorGrid& posterior() const noexcept { return posterior_; }
  // Schedule in force: the declared shut-in applied, if any.
  const InjectionProfile& active_profile() const noexcept { return active_; }
  ProcessModel process() const { return ProcessModel{active_, config_.m0, config_.mu}; }
  LikelihoodStats stats() const;
  SeismicCatalog catalog() const;

  Snapshot snapshot() const;
  CountForecast forecast_counts(double h) const;
  MaxMagForecast forecast_max_magnitude(double h) const;
  // Forecasts issued at shut_in_at: baseline keeps injecting at the
  // schedule's last rate, the what-if stops at shut_in_at. ConflictError if
  // a shut-in is already declared or shut_in_at < now.
  WhatIfResult what_if(double shut_in_at, std::optional<double> h = {}) const;

 private:
  struct Rollback;
  void move_clock(double t);
  void refresh();

  SessionConfig config_;
  GridAxes axes_;
  std::vector<double> log_prior_;
  InjectionProfile open_schedule_;  // schedule without its planned shut-in
  InjectionProfile active_;
  std::optional<double> declared_;
  std::vector<SeismicEvent> events_;
  LikelihoodStats running_;
  PosteriorGrid posterior_;
  double now_ = 0.0;
  std::uint64_t version_ = 0;
};

struct ReplayOptions {
  double cadence = kDefaultCadenceDays;
  bool forecasts = true;
};

struct ReplayResult {
  std::vector<Snapshot> snapshots;
  PosteriorGrid final_posterior;
};

/**
 * Walks a catalog forward in time: the posterior is updated after every
 * event, and a snapshot is taken at t = 0, every `cadence` days and at the
 * window end. The schedule's shut-in switches the likelihood regime.
 */
ReplayResult replay(const SeismicCatalog& catalog, const SessionConfig& config,
                    const ReplayOptions& options = {},
                    const std::function<void(const Session&, const Snapshot&)>& on_tick = {});

}  // namespace fiseis
