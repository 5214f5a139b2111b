#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fiseis/catalog.hpp"
#include "fiseis/inference.hpp"

namespace fiseis {

using CumulativeFn = std::function<double(double)>;

/// Event times mapped through a cumulative rate. Under a correct model they
/// form a unit-rate Poisson process on [0, total].
struct RescaledTimes {
  std::vector<double> taus;
  double total = 0.0;
};

struct KsReport {
  double d_n = 0.0;
  std::size_t n = 0;
  double band_95 = 0.0;
  double band_99 = 0.0;
  bool pass_95 = false;
  bool pass_99 = false;
  std::vector<std::pair<double, double>> ecdf;  // (x, F_n(x)) at each sorted sample
};

struct BermanReport {
  KsReport ks;
  std::vector<double> uniform_scores;  // U_n = 1 - exp(-(tau_n - tau_{n-1}))
};

struct LagScatter {
  std::vector<std::pair<double, double>> pairs;  // (U_n, U_{n+1})
  double rank_correlation = 0.0;                 // Spearman, average ranks for ties
};

// Throws InvalidArgument if the mapped times decrease. Ties are kept: a
// model that puts no mass between two events maps them to the same point.
RescaledTimes rescale(const SeismicCatalog& catalog, const CumulativeFn& cumulative);

// Exact P(D_n < d) for the one-sample two-sided statistic.
double ks_exact_cdf(std::size_t n, double d);
// Critical distance at level alpha: exact for n < 35, c(alpha)/sqrt(n) above,
// with c(0.05) = 1.358 and c(0.01) = 1.628.
double ks_critical_value(std::size_t n, double alpha);

// sup |F_n(x) - x| for samples in [0, 1]. Throws InsufficientSample for n < 5.
KsReport ks_uniform(std::span<const double> samples);

// KS of tau_n / total against the uniform distribution.
KsReport ks_test(const RescaledTimes& rescaled);
BermanReport berman_test(const RescaledTimes& rescaled);
LagScatter lag_scatter(std::span<const double> uniform_scores);

struct ModelCheck {
  std::string name;  // mle, map, mean, bayes_average
  RescaledTimes rescaled;
  KsReport ks;
  BermanReport berman;
  LagScatter lag;
};

// Residual checks under the four cumulative-rate choices: MLE, MAP and
// posterior-mean plug-ins, and the posterior-averaged cumulative rate.
std::array<ModelCheck, 4> validate_model_suite(const SeismicCatalog& catalog,
                                               const ProcessModel& model,
                                               const PosteriorGrid& grid,
                                               const PosteriorSummary& summary);

ModelCheck check_model(std::string name, const SeismicCatalog& catalog,
                       const CumulativeFn& cumulative);

}  // namespace fiseis
