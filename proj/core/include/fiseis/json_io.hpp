#pragma once

#include <array>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "fiseis/forecast.hpp"
#include "fiseis/inference.hpp"
#include "fiseis/prior.hpp"
#include "fiseis/session.hpp"
#include "fiseis/validation.hpp"

namespace fiseis {

using Json = nlohmann::json;

// Prior configuration: {"a_fb":{p,q,l,u}, "b":{p,q,l,u}, "tau":{alpha,beta}}.
Json prior_to_json(const JointPrior& prior);
JointPrior prior_from_json(const Json& j);  // throws ParseError

Json params_to_json(const RateParams& theta);
RateParams params_from_json(const Json& j);

Json profile_to_json(const InjectionProfile& profile);
// Accepts {"breakpoints": [[t, rate], ...], "shut_in": t|null} or {"csv": "..."}.
InjectionProfile profile_from_json(const Json& j);

Json summary_to_json(const PosteriorSummary& summary);

// Posterior export: axes, marginals, mean/map/mle, corr, log_evidence, plus
// the full weight tensor and quadrature widths so the grid can be reloaded.
Json posterior_to_json(const PosteriorGrid& grid, const PosteriorSummary& summary);

struct LoadedPosterior {
  PosteriorGrid grid;
  PosteriorSummary summary;
};
LoadedPosterior posterior_from_json(const Json& j);

struct ForecastFlags {
  bool post_shut_in = false;
  bool what_if = false;
  bool plugin = false;
  std::string plugin_point;  // mean, map or mle when plugin
};

Json count_forecast_to_json(const CountForecast& f);
Json maxmag_forecast_to_json(const MaxMagForecast& f);
// Forecast export: issue time, h, count pmf and interval, magnitude mesh,
// ccdf and asymmetric interval, flags.
Json forecast_to_json(const CountForecast& counts, const MaxMagForecast* maxmag,
                      const ForecastFlags& flags);

Json ks_to_json(const KsReport& r);
Json validation_to_json(const std::array<ModelCheck, 4>& checks);

Json snapshot_to_json(const Snapshot& s);
Json what_if_to_json(const WhatIfResult& w);

}  // namespace fiseis
