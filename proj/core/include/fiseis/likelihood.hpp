#pragma once

#include <cstddef>

#include "fiseis/catalog.hpp"
#include "fiseis/magnitude.hpp"
#include "fiseis/rate_model.hpp"

namespace fiseis {

enum class LikelihoodMode {
  partial,   // injection still running; no tau information
  complete,  // after shut-in; full rate model
};

const char* to_string(LikelihoodMode mode) noexcept;

/**
 * Data and fixed model pieces a likelihood is evaluated against.
 *
 * Complete mode needs a profile with a shut-in and a horizon T >= t_s.
 * Partial mode needs every event at or before t_now, and t_now at or before
 * the shut-in when the profile carries one.
 */
class LikelihoodContext {
 public:
  // Horizon T defaults to catalog.t_end().
  static LikelihoodContext complete(SeismicCatalog catalog, InjectionProfile profile,
                                    double mu = kDefaultUpperMagnitude);
  static LikelihoodContext partial(SeismicCatalog catalog, InjectionProfile profile, double t_now,
                                   double mu = kDefaultUpperMagnitude);
  // Complete when the profile's shut-in falls inside the catalog window,
  // partial at t_now = catalog.t_end() otherwise.
  static LikelihoodContext for_window(SeismicCatalog catalog, InjectionProfile profile,
                                      double mu = kDefaultUpperMagnitude);

  const SeismicCatalog& catalog() const noexcept { return catalog_; }
  const InjectionProfile& profile() const noexcept { return process_.profile; }
  const ProcessModel& process() const noexcept { return process_; }
  LikelihoodMode mode() const noexcept { return mode_; }
  // T in complete mode, t_now in partial mode.
  double horizon() const noexcept { return horizon_; }
  double m0() const noexcept { return process_.m0; }
  double mu() const noexcept { return process_.mu; }

 private:
  SeismicCatalog catalog_;
  ProcessModel process_;
  LikelihoodMode mode_ = LikelihoodMode::partial;
  double horizon_ = 0.0;
};

/**
 * Sufficient statistics of a catalog for the log-likelihood. Evaluating a
 * parameter triple against them costs O(1), which is what makes dense
 * posterior grids and per-event online updates cheap.
 *
 * Events are accumulated one at a time in arrival order (observe), then the
 * horizon is fixed with close_partial / close_complete.
 */
struct LikelihoodStats {
  LikelihoodMode mode = LikelihoodMode::partial;
  double m0 = 0.0;
  double mu = kDefaultUpperMagnitude;

  std::size_t n_events = 0;
  std::size_t n_post = 0;         // events after shut-in
  double sum_log_flow = 0.0;      // sum of ln V'(t_n) over injection-phase events
  double sum_post_elapsed = 0.0;  // sum of (t_n - t_s) over post-shut-in events
  double sum_excess_mag = 0.0;    // sum of (m_n - m0)

  double exposure = 0.0;       // V(t_now) partial, V(t_s) complete
  double shut_in_rate = 0.0;   // V'(t_s-), complete only
  double post_duration = 0.0;  // T - t_s, complete only

  LikelihoodStats() = default;
  LikelihoodStats(double m0_, double mu_) : m0(m0_), mu(mu_) {}

  // Adds one event. `profile` is the schedule in force; when it has a
  // shut-in and e.t > t_s the event is counted in the decay branch.
  void observe(const SeismicEvent& e, const InjectionProfile& profile);
  void close_partial(const InjectionProfile& profile, double t_now);
  void close_complete(const InjectionProfile& profile, double horizon);

  static LikelihoodStats from(const LikelihoodContext& ctx);
};

// Log-likelihood from sufficient statistics; natural logarithms throughout.
// Returns -inf (never throws) when an event sits at zero flow.
double log_likelihood(const RateParams& theta, const LikelihoodStats& stats);

// sum ln lambda(t_n) + sum ln f_M(m_n | b) - Lambda(T).
double log_likelihood_complete(const RateParams& theta, const LikelihoodContext& ctx);

// N (a_fb - b m0) ln 10 + sum ln V'(t_n) + sum ln f_M(m_n | b) - 10^(a_fb - b m0) V(t_now).
// Independent of tau.
double log_likelihood_partial(const RateParams& theta, double t_now, const LikelihoodContext& ctx);

// Dispatches on ctx.mode() at ctx.horizon().
double log_likelihood(const RateParams& theta, const LikelihoodContext& ctx);

}  // namespace fiseis
