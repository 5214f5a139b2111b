#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fiseis/likelihood.hpp"
#include "fiseis/prior.hpp"
#include "fiseis/rate_model.hpp"

namespace fiseis {

enum Axis : std::size_t { kAxisAfb = 0, kAxisB = 1, kAxisTau = 2 };

struct AxisRange {
  double lo;
  double hi;
};

struct GridSpec {
  std::size_t nodes_per_axis = 64;
  // Overrides for the prior-derived ranges.
  std::optional<AxisRange> a_fb;
  std::optional<AxisRange> b;
  std::optional<AxisRange> tau;
  double tau_upper_quantile = 0.999;
};

/// Tensor grid over (a_fb, b, tau). Flat index = (i * n_b + j) * n_tau + k.
struct GridAxes {
  std::array<std::vector<double>, 3> nodes;
  std::array<std::vector<double>, 3> widths;  // quadrature weight of each node along its axis

  std::size_t size() const noexcept {
    return nodes[0].size() * nodes[1].size() * nodes[2].size();
  }
  std::array<std::size_t, 3> unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return (i * nodes[1].size() + j) * nodes[2].size() + k;
  }
  RateParams node(std::size_t flat) const noexcept;
  double cell_volume(std::size_t flat) const noexcept;
  bool operator==(const GridAxes&) const = default;
};

// Uniform trapezoidal axis with both endpoints as nodes.
std::pair<std::vector<double>, std::vector<double>> trapezoid_axis(double lo, double hi,
                                                                   std::size_t n);
// Uniform midpoint-rule axis (endpoints excluded).
std::pair<std::vector<double>, std::vector<double>> midpoint_axis(double lo, double hi,
                                                                  std::size_t n);

// Default axes: Beta supports for a_fb and b (midpoint nodes when a shape is
// below 1 so no node sits on an infinite density), tau from one step above
// zero up to the prior's upper quantile. Throws InvalidArgument for n < 16.
GridAxes make_axes(const JointPrior& prior, const GridSpec& spec = {});

/**
 * Discretized posterior: unnormalized log density at every node, normalized
 * probability masses (density times cell volume) and the log of the
 * normalizing constant.
 */
class PosteriorGrid {
 public:
  PosteriorGrid() = default;

  // Normalizes by log-sum-exp with a fixed pairwise summation order.
  // Throws EvidenceUnderflow when every node is -inf.
  static PosteriorGrid from_log_density(GridAxes axes, std::vector<double> log_unnorm);

  // Rebuilds from exported masses; log_unnorm is recovered up to a constant.
  static PosteriorGrid from_weights(GridAxes axes, std::vector<double> weights,
                                    double log_evidence);

  const GridAxes& axes() const noexcept { return axes_; }
  std::span<const double> log_unnorm() const noexcept { return log_unnorm_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double log_evidence() const noexcept { return log_evidence_; }
  std::size_t size() const noexcept { return weights_.size(); }
  RateParams node(std::size_t flat) const noexcept { return axes_.node(flat); }
  std::size_t argmax() const;

  // Log of the normalized posterior density at a node.
  double log_density(std::size_t flat) const noexcept { return log_unnorm_[flat] - log_evidence_; }

 private:
  GridAxes axes_;
  std::vector<double> log_unnorm_;
  std::vector<double> weights_;
  double log_evidence_ = 0.0;
};

std::vector<double> evaluate_log_prior(const GridAxes& axes, const JointPrior& prior);
// Adds log_likelihood(theta, stats) into `out` node by node (parallel).
void accumulate_log_likelihood(const GridAxes& axes, const LikelihoodStats& stats,
                               std::span<double> out);

PosteriorGrid compute_posterior(const LikelihoodContext& ctx, const JointPrior& prior,
                                const GridSpec& spec = {});
PosteriorGrid compute_posterior(const LikelihoodContext& ctx, const JointPrior& prior,
                                const GridAxes& axes);
PosteriorGrid compute_posterior(const LikelihoodStats& stats, const JointPrior& prior,
                                const GridAxes& axes);

struct Marginal {
  std::vector<double> nodes;
  std::vector<double> mass;     // sums to 1
  std::vector<double> density;  // mass / quadrature width
};

struct PosteriorSummary {
  RateParams mean;
  RateParams map;
  std::optional<RateParams> mle;
  std::array<double, 3> sd{};
  std::array<Marginal, 3> marginals;
  std::array<std::array<double, 3>, 3> corr{};
  bool degenerate = false;  // some axis carries zero variance; its correlations read 0
  double log_evidence = 0.0;
};

// Weighted moments, grid argmax as MAP, axis-summed marginals.
PosteriorSummary summarize(const PosteriorGrid& grid);

// Same, with the MAP polished inside the argmax cell by a short
// derivative-free search on log_target.
PosteriorSummary summarize(const PosteriorGrid& grid,
                           const std::function<double(const RateParams&)>& log_target);

struct ParamBounds {
  RateParams lo{-4.0, 0.5, 1e-3};
  RateParams hi{1.0, 2.5, 100.0};
  static ParamBounds from_prior(const JointPrior& prior);
  bool contains(const RateParams& theta) const;
};

struct MleResult {
  RateParams theta;
  double log_likelihood = 0.0;
  std::array<bool, 3> at_bound{};  // per axis: estimate on a box face
  bool tau_identified = true;      // false in partial mode: tau is returned as given
  std::size_t evaluations = 0;
};

// Bounded Nelder-Mead from `init` plus seven seeded random starts; returns
// the best. Throws FitFailure when no start has a finite likelihood.
MleResult mle_fit(const LikelihoodContext& ctx, const RateParams& init,
                  const ParamBounds& bounds = {}, std::uint64_t seed = 0x5eed);

// Lambda_ba(t) = sum over nodes of weight * Lambda(t | theta).
double bayes_average_cumulative(const PosteriorGrid& grid, double t, const ProcessModel& model);

}  // namespace fiseis
