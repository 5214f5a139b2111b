#include "fiseis/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fiseis/error.hpp"
#include "fiseis/optimize.hpp"
#include "fiseis/random.hpp"
#include "parallel.hpp"

namespace fiseis {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMinNodesPerAxis = 16;
}  // namespace

std::array<std::size_t, 3> GridAxes::unflatten(std::size_t flat) const noexcept {
  const std::size_t nt = nodes[2].size();
  const std::size_t nb = nodes[1].size();
  return {flat / (nb * nt), (flat / nt) % nb, flat % nt};
}

RateParams GridAxes::node(std::size_t flat) const noexcept {
  const auto [i, j, k] = unflatten(flat);
  return RateParams{nodes[0][i], nodes[1][j], nodes[2][k]};
}

double GridAxes::cell_volume(std::size_t flat) const noexcept {
  const auto [i, j, k] = unflatten(flat);
  return widths[0][i] * widths[1][j] * widths[2][k];
}

std::pair<std::vector<double>, std::vector<double>> trapezoid_axis(double lo, double hi,
                                                                   std::size_t n) {
  if (n < 2 || !(lo < hi)) throw InvalidArgument("trapezoid_axis: need n >= 2 and lo < hi");
  const double h = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> nodes(n);
  std::vector<double> widths(n, h);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = lo + h * static_cast<double>(i);
  nodes.back() = hi;
  widths.front() = widths.back() = 0.5 * h;
  return {nodes, widths};
}

std::pair<std::vector<double>, std::vector<double>> midpoint_axis(double lo, double hi,
                                                                  std::size_t n) {
  if (n < 1 || !(lo < hi)) throw InvalidArgument("midpoint_axis: need n >= 1 and lo < hi");
  const double h = (hi - lo) / static_cast<double>(n);
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = lo + h * (static_cast<double>(i) + 0.5);
  return {nodes, std::vector<double>(n, h)};
}

GridAxes make_axes(const JointPrior& prior, const GridSpec& spec) {
  prior.validate();
  const std::size_t n = spec.nodes_per_axis;
  if (n < kMinNodesPerAxis) throw InvalidArgument("grid needs at least 16 nodes per axis");

  GridAxes axes;
  const auto beta_axis = [n](const ScaledBeta& m, const std::optional<AxisRange>& range) {
    if (range) return trapezoid_axis(range->lo, range->hi, n);
    if (m.p < 1.0 || m.q < 1.0) return midpoint_axis(m.l, m.u, n);
    return trapezoid_axis(m.l, m.u, n);
  };
  std::tie(axes.nodes[kAxisAfb], axes.widths[kAxisAfb]) = beta_axis(prior.a_fb, spec.a_fb);
  std::tie(axes.nodes[kAxisB], axes.widths[kAxisB]) = beta_axis(prior.b, spec.b);

  if (spec.tau) {
    if (!(spec.tau->lo > 0.0)) throw InvalidArgument("tau axis must be strictly positive");
    std::tie(axes.nodes[kAxisTau], axes.widths[kAxisTau]) =
        trapezoid_axis(spec.tau->lo, spec.tau->hi, n);
  } else {
    const double hi = prior.tau.quantile(spec.tau_upper_quantile);
    std::tie(axes.nodes[kAxisTau], axes.widths[kAxisTau]) =
        trapezoid_axis(hi / static_cast<double>(n), hi, n);
  }
  return axes;
}

PosteriorGrid PosteriorGrid::from_log_density(GridAxes axes, std::vector<double> log_unnorm) {
  if (log_unnorm.size() != axes.size()) throw InvalidArgument("grid size mismatch");
  std::vector<double> lw(log_unnorm.size());
  double peak = kNegInf;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    const double v = log_unnorm[i];
    lw[i] = std::isnan(v) ? kNegInf : v + std::log(axes.cell_volume(i));
    peak = std::max(peak, lw[i]);
  }
  if (peak == kNegInf || !std::isfinite(peak)) {
    throw EvidenceUnderflow("posterior evidence underflow: no grid node has finite density");
  }
  for (auto& v : lw) v = std::exp(v - peak);
  const double total = detail::pairwise_sum(lw);
  for (auto& v : lw) v /= total;

  PosteriorGrid grid;
  grid.axes_ = std::move(axes);
  grid.log_unnorm_ = std::move(log_unnorm);
  grid.weights_ = std::move(lw);
  grid.log_evidence_ = peak + std::log(total);
  return grid;
}

PosteriorGrid PosteriorGrid::from_weights(GridAxes axes, std::vector<double> weights,
                                          double log_evidence) {
  if (weights.size() != axes.size()) throw InvalidArgument("grid size mismatch");
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("posterior weights must be nonnegative");
  }
  const double total = detail::pairwise_sum(weights);
  if (!(total > 0.0)) throw InvalidArgument("posterior weights sum to zero");
  // Exported grids are already normalized; keep their bits.
  const double scale = std::abs(total - 1.0) > 1e-12 ? total : 1.0;
  PosteriorGrid grid;
  grid.log_unnorm_.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] /= scale;
    grid.log_unnorm_[i] = std::log(weights[i]) - std::log(axes.cell_volume(i)) + log_evidence;
  }
  grid.axes_ = std::move(axes);
  grid.weights_ = std::move(weights);
  grid.log_evidence_ = log_evidence;
  return grid;
}

std::size_t PosteriorGrid::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < log_unnorm_.size(); ++i) {
    if (log_unnorm_[i] > log_unnorm_[best]) best = i;
  }
  return best;
}

std::vector<double> evaluate_log_prior(const GridAxes& axes, const JointPrior& prior) {
  std::array<std::vector<double>, 3> per_axis;
  for (double x : axes.nodes[kAxisAfb]) per_axis[0].push_back(prior.a_fb.log_pdf(x));
  for (double x : axes.nodes[kAxisB]) per_axis[1].push_back(prior.b.log_pdf(x));
  for (double x : axes.nodes[kAxisTau]) per_axis[2].push_back(prior.tau.log_pdf(x));
  std::vector<double> out(axes.size());
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto [i, j, k] = axes.unflatten(flat);
    const double la = per_axis[0][i];
    const double lb = per_axis[1][j];
    out[flat] = (la == kNegInf || lb == kNegInf) ? kNegInf : la + lb + per_axis[2][k];
  }
  return out;
}

void accumulate_log_likelihood(const GridAxes& axes, const LikelihoodStats& stats,
                               std::span<double> out) {
  detail::parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t flat = begin; flat < end; ++flat) {
      if (out[flat] == kNegInf) continue;
      out[flat] += log_likelihood(axes.node(flat), stats);
    }
  });
}

PosteriorGrid compute_posterior(const LikelihoodStats& stats, const JointPrior& prior,
                                const GridAxes& axes) {
  auto log_unnorm = evaluate_log_prior(axes, prior);
  accumulate_log_likelihood(axes, stats, log_unnorm);
  return PosteriorGrid::from_log_density(axes, std::move(log_unnorm));
}

PosteriorGrid compute_posterior(const LikelihoodContext& ctx, const JointPrior& prior,
                                const GridAxes& axes) {
  return compute_posterior(LikelihoodStats::from(ctx), prior, axes);
}

PosteriorGrid compute_posterior(const LikelihoodContext& ctx, const JointPrior& prior,
                                const GridSpec& spec) {
  return compute_posterior(ctx, prior, make_axes(prior, spec));
}

PosteriorSummary summarize(const PosteriorGrid& grid) {
  const auto& axes = grid.axes();
  const auto w = grid.weights();
  PosteriorSummary s;
  s.log_evidence = grid.log_evidence();

  for (std::size_t a = 0; a < 3; ++a) {
    s.marginals[a].nodes = axes.nodes[a];
    s.marginals[a].mass.assign(axes.nodes[a].size(), 0.0);
  }
  for (std::size_t flat = 0; flat < w.size(); ++flat) {
    const auto idx = axes.unflatten(flat);
    for (std::size_t a = 0; a < 3; ++a) s.marginals[a].mass[idx[a]] += w[flat];
  }
  for (std::size_t a = 0; a < 3; ++a) {
    auto& m = s.marginals[a];
    m.density.resize(m.mass.size());
    for (std::size_t i = 0; i < m.mass.size(); ++i) m.density[i] = m.mass[i] / axes.widths[a][i];
  }

  // Means from marginals, second moments from the joint.
  std::array<double, 3> mean{};
  for (std::size_t a = 0; a < 3; ++a) {
    std::vector<double> terms(axes.nodes[a].size());
    for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = s.marginals[a].mass[i] * axes.nodes[a][i];
    mean[a] = detail::pairwise_sum(terms);
  }
  std::array<std::array<double, 3>, 3> cov{};
  for (std::size_t flat = 0; flat < w.size(); ++flat) {
    if (w[flat] == 0.0) continue;
    const auto idx = axes.unflatten(flat);
    std::array<double, 3> d{};
    for (std::size_t a = 0; a < 3; ++a) d[a] = axes.nodes[a][idx[a]] - mean[a];
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = a; b < 3; ++b) cov[a][b] += w[flat] * d[a] * d[b];
    }
  }
  for (std::size_t a = 0; a < 3; ++a) {
    s.sd[a] = std::sqrt(std::max(cov[a][a], 0.0));
  }
  for (std::size_t a = 0; a < 3; ++a) {
    s.corr[a][a] = 1.0;
    for (std::size_t b = a + 1; b < 3; ++b) {
      double r = 0.0;
      if (s.sd[a] > 0.0 && s.sd[b] > 0.0) {
        r = std::clamp(cov[a][b] / (s.sd[a] * s.sd[b]), -1.0, 1.0);
      } else {
        s.degenerate = true;
      }
      s.corr[a][b] = s.corr[b][a] = r;
    }
  }
  s.mean = RateParams{mean[0], mean[1], mean[2]};
  s.map = grid.node(grid.argmax());
  return s;
}

PosteriorSummary summarize(const PosteriorGrid& grid,
                           const std::function<double(const RateParams&)>& log_target) {
  auto s = summarize(grid);
  const auto& axes = grid.axes();
  const auto idx = axes.unflatten(grid.argmax());
  Box box{std::vector<double>(3), std::vector<double>(3)};
  std::vector<double> x0(3);
  std::vector<double> step(3);
  for (std::size_t a = 0; a < 3; ++a) {
    const auto& nodes = axes.nodes[a];
    const std::size_t i = idx[a];
    const double left = i > 0 ? nodes[i] - 0.5 * (nodes[i] - nodes[i - 1]) : nodes[i];
    const double right =
        i + 1 < nodes.size() ? nodes[i] + 0.5 * (nodes[i + 1] - nodes[i]) : nodes[i];
    box.lo[a] = left;
    box.hi[a] = right;
    x0[a] = nodes[i];
    step[a] = 0.25 * std::max(right - left, 1e-12);
  }
  const auto objective = [&](std::span<const double> x) {
    const double v = log_target(RateParams{x[0], x[1], x[2]});
    return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
  };
  NelderMeadOptions options;
  options.max_evaluations = 300;
  options.restarts = 0;
  const double start = objective(x0);
  const auto result = nelder_mead(objective, x0, step, box, options);
  if (result.value < start) s.map = RateParams{result.x[0], result.x[1], result.x[2]};
  return s;
}

ParamBounds ParamBounds::from_prior(const JointPrior& prior) {
  ParamBounds b;
  b.lo = RateParams{prior.a_fb.l, prior.b.l, 1e-3};
  b.hi = RateParams{prior.a_fb.u, prior.b.u, 100.0};
  return b;
}

bool ParamBounds::contains(const RateParams& t) const {
  return t.a_fb >= lo.a_fb && t.a_fb <= hi.a_fb && t.b >= lo.b && t.b <= hi.b &&
         t.tau >= lo.tau && t.tau <= hi.tau;
}

MleResult mle_fit(const LikelihoodContext& ctx, const RateParams& init, const ParamBounds& bounds,
                  std::uint64_t seed) {
  if (!bounds.contains(init)) throw InvalidArgument("mle_fit: initial point outside bounds");
  if (!(bounds.lo.tau > 0.0)) throw InvalidArgument("mle_fit: tau bound must be positive");
  const auto stats = LikelihoodStats::from(ctx);
  const bool fit_tau = ctx.mode() == LikelihoodMode::complete;
  const std::size_t dim = fit_tau ? 3 : 2;

  // Search space: (a_fb, b, ln tau).
  Box box{{bounds.lo.a_fb, bounds.lo.b, std::log(bounds.lo.tau)},
          {bounds.hi.a_fb, bounds.hi.b, std::log(bounds.hi.tau)}};
  box.lo.resize(dim);
  box.hi.resize(dim);
  const auto to_theta = [&](std::span<const double> x) {
    return RateParams{x[0], x[1], fit_tau ? std::exp(x[2]) : init.tau};
  };
  const auto objective = [&](std::span<const double> x) {
    const double ll = log_likelihood(to_theta(x), stats);
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> starts;
  starts.push_back({init.a_fb, init.b, std::log(init.tau)});
  CounterRng rng(seed, 7);
  while (starts.size() < 8) {
    std::vector<double> x(3);
    for (std::size_t i = 0; i < 3; ++i) x[i] = box.lo[std::min(i, dim - 1)];
    for (std::size_t i = 0; i < dim; ++i) x[i] = box.lo[i] + rng.uniform() * (box.hi[i] - box.lo[i]);
    starts.push_back(x);
  }

  std::vector<double> step(dim);
  for (std::size_t i = 0; i < dim; ++i) step[i] = 0.1 * (box.hi[i] - box.lo[i]);

  MleResult best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (auto& start : starts) {
    start.resize(dim);
    const auto r = nelder_mead(objective, start, step, box);
    best.evaluations += r.evaluations;
    if (std::isfinite(r.value) && (!found || -r.value > best.log_likelihood)) {
      found = true;
      best.theta = to_theta(r.x);
      best.log_likelihood = -r.value;
      for (std::size_t i = 0; i < dim; ++i) {
        const double tol = 1e-6 * (box.hi[i] - box.lo[i]);
        best.at_bound[i] = r.x[i] - box.lo[i] <= tol || box.hi[i] - r.x[i] <= tol;
      }
      if (!fit_tau) best.at_bound[2] = false;
    }
  }
  if (!found) throw FitFailure("mle_fit: likelihood is not finite at any start");
  best.tau_identified = fit_tau;
  return best;
}

double bayes_average_cumulative(const PosteriorGrid& grid, double t, const ProcessModel& model) {
  const auto w = grid.weights();
  std::vector<double> terms(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] != 0.0) terms[i] = w[i] * model.cumulative(t, grid.node(i));
  }
  return detail::pairwise_sum(terms);
}

}  // namespace fiseis
