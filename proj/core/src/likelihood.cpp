#include "fiseis/likelihood.hpp"

#include <cmath>
#include <limits>

#include "fiseis/error.hpp"

namespace fiseis {

const char* to_string(LikelihoodMode mode) noexcept {
  return mode == LikelihoodMode::complete ? "complete" : "partial";
}

LikelihoodContext LikelihoodContext::complete(SeismicCatalog catalog, InjectionProfile profile,
                                              double mu) {
  const auto t_s = profile.shut_in();
  if (!t_s) throw InvalidArgument("complete likelihood needs a shut-in time");
  if (catalog.t_end() < *t_s) {
    throw InvalidArgument("complete likelihood needs the window to reach the shut-in time");
  }
  MagnitudeModel{1.0, catalog.m0(), mu}.validate();
  LikelihoodContext ctx;
  ctx.horizon_ = catalog.t_end();
  ctx.process_ = ProcessModel{std::move(profile), catalog.m0(), mu};
  ctx.catalog_ = std::move(catalog);
  ctx.mode_ = LikelihoodMode::complete;
  return ctx;
}

LikelihoodContext LikelihoodContext::for_window(SeismicCatalog catalog, InjectionProfile profile,
                                                double mu) {
  const auto t_s = profile.shut_in();
  if (t_s && catalog.t_end() >= *t_s) return complete(std::move(catalog), std::move(profile), mu);
  const double t_now = catalog.t_end();
  return partial(std::move(catalog), std::move(profile), t_now, mu);
}

LikelihoodContext LikelihoodContext::partial(SeismicCatalog catalog, InjectionProfile profile,
                                             double t_now, double mu) {
  if (!(t_now >= 0.0) || !std::isfinite(t_now)) throw InvalidArgument("t_now must be >= 0");
  if (!catalog.empty() && catalog.events().back().t > t_now) {
    throw InvalidArgument("partial likelihood: event after t_now");
  }
  if (const auto t_s = profile.shut_in(); t_s && t_now > *t_s) {
    throw InvalidArgument("partial likelihood: t_now is after the shut-in");
  }
  MagnitudeModel{1.0, catalog.m0(), mu}.validate();
  LikelihoodContext ctx;
  ctx.horizon_ = t_now;
  ctx.process_ = ProcessModel{std::move(profile), catalog.m0(), mu};
  ctx.catalog_ = std::move(catalog);
  ctx.mode_ = LikelihoodMode::partial;
  return ctx;
}

void LikelihoodStats::observe(const SeismicEvent& e, const InjectionProfile& profile) {
  ++n_events;
  sum_excess_mag += e.m - m0;
  const auto t_s = profile.shut_in();
  if (t_s && e.t > *t_s) {
    ++n_post;
    sum_post_elapsed += e.t - *t_s;
    return;
  }
  const double flow = (t_s && e.t == *t_s) ? profile.shut_in_rate() : profile.rate(e.t);
  sum_log_flow += std::log(flow);  // -inf for an event at zero flow
}

void LikelihoodStats::close_partial(const InjectionProfile& profile, double t_now) {
  mode = LikelihoodMode::partial;
  exposure = profile.volume(t_now);
  shut_in_rate = 0.0;
  post_duration = 0.0;
}

void LikelihoodStats::close_complete(const InjectionProfile& profile, double horizon) {
  const auto t_s = profile.shut_in();
  if (!t_s) throw InvalidArgument("complete likelihood needs a shut-in time");
  if (horizon < *t_s) throw InvalidArgument("complete likelihood horizon precedes shut-in");
  mode = LikelihoodMode::complete;
  exposure = profile.volume(*t_s);
  shut_in_rate = profile.shut_in_rate();
  post_duration = horizon - *t_s;
}

LikelihoodStats LikelihoodStats::from(const LikelihoodContext& ctx) {
  LikelihoodStats stats(ctx.m0(), ctx.mu());
  for (const auto& e : ctx.catalog().events()) stats.observe(e, ctx.profile());
  if (ctx.mode() == LikelihoodMode::complete) {
    stats.close_complete(ctx.profile(), ctx.horizon());
  } else {
    stats.close_partial(ctx.profile(), ctx.horizon());
  }
  return stats;
}

double log_likelihood(const RateParams& theta, const LikelihoodStats& s) {
  const double n = static_cast<double>(s.n_events);
  const double log_k = ln_pow10(theta.a_fb - theta.b * s.m0);
  const double k = std::exp(log_k);

  double count_terms = n * log_k + s.sum_log_flow - k * s.exposure;
  if (s.mode == LikelihoodMode::complete) {
    if (s.n_post > 0) {
      count_terms += static_cast<double>(s.n_post) * std::log(s.shut_in_rate) -
                     s.sum_post_elapsed / theta.tau;
    }
    count_terms -= k * s.shut_in_rate * theta.tau * -std::expm1(-s.post_duration / theta.tau);
  }

  double magnitude_terms = 0.0;
  if (s.n_events > 0) {
    const double truncation = -std::expm1(-ln_pow10(theta.b * (s.mu - s.m0)));
    magnitude_terms = n * (std::log(theta.b) + std::log(kLn10) - std::log(truncation)) -
                      theta.b * kLn10 * s.sum_excess_mag;
  }
  const double ll = count_terms + magnitude_terms;
  return std::isnan(ll) ? -std::numeric_limits<double>::infinity() : ll;
}

double log_likelihood_complete(const RateParams& theta, const LikelihoodContext& ctx) {
  if (ctx.mode() != LikelihoodMode::complete) {
    throw InvalidArgument("log_likelihood_complete needs a complete-mode context");
  }
  return log_likelihood(theta, LikelihoodStats::from(ctx));
}

double log_likelihood_partial(const RateParams& theta, double t_now,
                              const LikelihoodContext& ctx) {
  if (ctx.mode() != LikelihoodMode::partial) {
    throw InvalidArgument("log_likelihood_partial needs a partial-mode context");
  }
  if (!ctx.catalog().empty() && ctx.catalog().events().back().t > t_now) {
    throw InvalidArgument("partial likelihood: event after t_now");
  }
  LikelihoodStats stats(ctx.m0(), ctx.mu());
  for (const auto& e : ctx.catalog().events()) stats.observe(e, ctx.profile());
  stats.close_partial(ctx.profile(), t_now);
  return log_likelihood(theta, stats);
}

double log_likelihood(const RateParams& theta, const LikelihoodContext& ctx) {
  return log_likelihood(theta, LikelihoodStats::from(ctx));
}

}  // namespace fiseis
