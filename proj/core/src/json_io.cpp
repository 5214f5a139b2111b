#include "fiseis/json_io.hpp"

#include <cmath>

#include "fiseis/error.hpp"

namespace fiseis {

namespace {

constexpr const char* kAxisNames[3] = {"a_fb", "b", "tau"};

double number(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_number()) {
    throw ParseError(std::string("missing or non-numeric field '") + key + "'");
  }
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string("non-finite field '") + key + "'");
  return v;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json prior_to_json(const JointPrior& prior) {
  const auto beta = [](const ScaledBeta& m) {
    return Json{{"p", m.p}, {"q", m.q}, {"l", m.l}, {"u", m.u}};
  };
  return Json{{"a_fb", beta(prior.a_fb)},
              {"b", beta(prior.b)},
              {"tau", {{"alpha", prior.tau.alpha}, {"beta", prior.tau.beta}}}};
}

JointPrior prior_from_json(const Json& j) {
  const auto beta = [&](const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("prior: missing '") + key + "'");
    const auto& m = j.at(key);
    return ScaledBeta{number(m, "p"), number(m, "q"), number(m, "l"), number(m, "u")};
  };
  if (!j.is_object() || !j.contains("tau")) throw ParseError("prior: missing 'tau'");
  JointPrior prior{beta("a_fb"), beta("b"),
                   GammaPrior{number(j.at("tau"), "alpha"), number(j.at("tau"), "beta")}};
  try {
    prior.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("prior: ") + e.what());
  }
  return prior;
}

Json params_to_json(const RateParams& theta) {
  return Json{{"a_fb", theta.a_fb}, {"b", theta.b}, {"tau", theta.tau}};
}

RateParams params_from_json(const Json& j) {
  return RateParams{number(j, "a_fb"), number(j, "b"), number(j, "tau")};
}

Json profile_to_json(const InjectionProfile& profile) {
  Json bps = Json::array();
  for (const auto& bp : profile.breakpoints()) bps.push_back({bp.t, bp.rate});
  return Json{{"breakpoints", bps}, {"shut_in", optional_number(profile.shut_in())}};
}

InjectionProfile profile_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("profile must be an object");
  if (j.contains("csv")) {
    if (!j.at("csv").is_string()) throw ParseError("profile.csv must be a string");
    return parse_injection(j.at("csv").get<std::string>());
  }
  if (!j.contains("breakpoints") || !j.at("breakpoints").is_array()) {
    throw ParseError("profile needs 'breakpoints' or 'csv'");
  }
  std::vector<InjectionProfile::Breakpoint> bps;
  for (const auto& row : j.at("breakpoints")) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      throw ParseError("breakpoint must be [t, rate]");
    }
    bps.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  std::optional<double> shut_in;
  if (j.contains("shut_in") && !j.at("shut_in").is_null()) shut_in = number(j, "shut_in");
  try {
    if (shut_in && (bps.empty() || bps.back().t != *shut_in)) {
      // Breakpoints given without the closing zero-rate row.
      return InjectionProfile::make(std::move(bps)).with_shut_in(*shut_in);
    }
    return InjectionProfile::make(std::move(bps), shut_in);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("profile: ") + e.what());
  }
}

Json summary_to_json(const PosteriorSummary& s) {
  Json marginals = Json::object();
  Json sd = Json::object();
  for (std::size_t a = 0; a < 3; ++a) {
    marginals[kAxisNames[a]] = {{"nodes", s.marginals[a].nodes},
                                {"mass", s.marginals[a].mass},
                                {"density", s.marginals[a].density}};
    sd[kAxisNames[a]] = s.sd[a];
  }
  Json corr = Json::array();
  for (const auto& row : s.corr) corr.push_back(Json(std::vector<double>(row.begin(), row.end())));
  return Json{{"mean", params_to_json(s.mean)},
              {"map", params_to_json(s.map)},
              {"mle", s.mle ? params_to_json(*s.mle) : Json(nullptr)},
              {"sd", sd},
              {"corr", corr},
              {"corr_degenerate", s.degenerate},
              {"marginals", marginals},
              {"log_evidence", s.log_evidence}};
}

Json posterior_to_json(const PosteriorGrid& grid, const PosteriorSummary& summary) {
  Json j = summary_to_json(summary);
  Json axes = Json::object();
  Json widths = Json::object();
  for (std::size_t a = 0; a < 3; ++a) {
    axes[kAxisNames[a]] = grid.axes().nodes[a];
    widths[kAxisNames[a]] = grid.axes().widths[a];
  }
  j["axes"] = axes;
  j["widths"] = widths;
  j["log_evidence"] = grid.log_evidence();
  j["weights"] = std::vector<double>(grid.weights().begin(), grid.weights().end());
  return j;
}

LoadedPosterior posterior_from_json(const Json& j) {
  try {
    GridAxes axes;
    for (std::size_t a = 0; a < 3; ++a) {
      axes.nodes[a] = j.at("axes").at(kAxisNames[a]).get<std::vector<double>>();
      axes.widths[a] = j.at("widths").at(kAxisNames[a]).get<std::vector<double>>();
      if (axes.nodes[a].empty() || axes.nodes[a].size() != axes.widths[a].size()) {
        throw ParseError(std::string("posterior: bad axis ") + kAxisNames[a]);
      }
      for (std::size_t i = 1; i < axes.nodes[a].size(); ++i) {
        if (!(axes.nodes[a][i - 1] < axes.nodes[a][i])) {
          throw ParseError(std::string("posterior: axis not increasing: ") + kAxisNames[a]);
        }
      }
    }
    auto weights = j.at("weights").get<std::vector<double>>();
    auto grid = PosteriorGrid::from_weights(std::move(axes), std::move(weights),
                                            number(j, "log_evidence"));
    LoadedPosterior out{grid, summarize(grid)};
    if (j.contains("map")) out.summary.map = params_from_json(j.at("map"));
    if (j.contains("mle") && !j.at("mle").is_null()) out.summary.mle = params_from_json(j.at("mle"));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("posterior: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("posterior: ") + e.what());
  }
}

Json count_forecast_to_json(const CountForecast& f) {
  return Json{{"t", f.t},
              {"h", f.h},
              {"pmf", f.pmf},
              {"credible_90", {f.credible_lo, f.credible_hi}},
              {"mean", f.mean},
              {"variance", f.variance},
              {"tail_folded", f.tail_folded}};
}

Json maxmag_forecast_to_json(const MaxMagForecast& f) {
  return Json{{"t", f.t},
              {"h", f.h},
              {"mesh", f.mesh},
              {"ccdf", f.ccdf},
              {"p_no_event", f.p_no_event},
              {"credible", {{"lower_5pct", optional_number(f.lower)},
                            {"upper_0_1pct", optional_number(f.upper)}}}};
}

Json forecast_to_json(const CountForecast& counts, const MaxMagForecast* maxmag,
                      const ForecastFlags& flags) {
  Json j{{"issue_time", counts.t},
         {"h_days", counts.h},
         {"counts", count_forecast_to_json(counts)},
         {"flags",
          {{"post_shut_in", flags.post_shut_in},
           {"what_if", flags.what_if},
           {"plugin", flags.plugin ? Json(flags.plugin_point) : Json(nullptr)}}}};
  j["max_magnitude"] = maxmag ? maxmag_forecast_to_json(*maxmag) : Json(nullptr);
  return j;
}

Json ks_to_json(const KsReport& r) {
  Json ecdf = Json::array();
  for (const auto& [x, f] : r.ecdf) ecdf.push_back({x, f});
  return Json{{"d_n", r.d_n},          {"n", r.n},
              {"band_95", r.band_95},  {"band_99", r.band_99},
              {"pass_95", r.pass_95},  {"pass_99", r.pass_99},
              {"ecdf", ecdf}};
}

Json validation_to_json(const std::array<ModelCheck, 4>& checks) {
  Json models = Json::array();
  for (const auto& c : checks) {
    Json pairs = Json::array();
    for (const auto& [u0, u1] : c.lag.pairs) pairs.push_back({u0, u1});
    models.push_back(Json{{"model", c.name},
                          {"rescaled_total", c.rescaled.total},
                          {"ks", ks_to_json(c.ks)},
                          {"berman", ks_to_json(c.berman.ks)},
                          {"uniform_scores", c.berman.uniform_scores},
                          {"lag_pairs", pairs},
                          {"lag_rank_correlation", c.lag.rank_correlation}});
  }
  return Json{{"models", models}};
}

Json snapshot_to_json(const Snapshot& s) {
  const ForecastFlags flags{s.likelihood_mode == LikelihoodMode::complete, false, false, {}};
  return Json{{"sequence", s.sequence},
              {"t_now", s.t_now},
              {"likelihood_mode", to_string(s.likelihood_mode)},
              {"n_events", s.n_events},
              {"shut_in", optional_number(s.shut_in)},
              {"summary", summary_to_json(s.summary)},
              {"forecast", forecast_to_json(s.count_forecast, &s.maxmag_forecast, flags)}};
}

Json what_if_to_json(const WhatIfResult& w) {
  return Json{
      {"shut_in_at", w.shut_in_at},
      {"issue_time", w.issue_time},
      {"baseline", forecast_to_json(w.baseline_counts, &w.baseline_maxmag, {false, false, false, {}})},
      {"what_if", forecast_to_json(w.whatif_counts, &w.whatif_maxmag, {true, true, false, {}})}};
}

}  // namespace fiseis
