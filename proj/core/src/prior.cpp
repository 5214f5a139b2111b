#include "fiseis/prior.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <limits>

#include "fiseis/error.hpp"

namespace fiseis {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// (a - 1) ln x with the convention 0 * ln 0 = 0.
double power_term(double exponent, double x) {
  return exponent == 0.0 ? 0.0 : exponent * std::log(x);
}
}  // namespace

void ScaledBeta::validate() const {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw InvalidArgument("scaled beta: shapes must be positive");
  }
  if (!(l < u) || !std::isfinite(l) || !std::isfinite(u)) {
    throw InvalidArgument("scaled beta: need finite l < u");
  }
}

double ScaledBeta::log_pdf(double x) const {
  if (!(x >= l && x <= u)) return kNegInf;
  const double width = u - l;
  const double z = (x - l) / width;
  return std::lgamma(p + q) - std::lgamma(p) - std::lgamma(q) + power_term(p - 1.0, z) +
         power_term(q - 1.0, 1.0 - z) - std::log(width);
}

double ScaledBeta::mean() const { return l + (u - l) * p / (p + q); }

double ScaledBeta::variance() const {
  const double s = p + q;
  return (u - l) * (u - l) * p * q / (s * s * (s + 1.0));
}

double ScaledBeta::sample(CounterRng& rng) const { return l + (u - l) * rng.beta(p, q); }

void GammaPrior::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw InvalidArgument("gamma prior: alpha and beta must be positive");
  }
}

double GammaPrior::log_pdf(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  return alpha * std::log(beta) - std::lgamma(alpha) + (alpha - 1.0) * std::log(x) - beta * x;
}

double GammaPrior::quantile(double prob) const {
  return boost::math::quantile(boost::math::gamma_distribution<double>(alpha, 1.0 / beta), prob);
}

double GammaPrior::sample(CounterRng& rng) const { return rng.gamma(alpha) / beta; }

void JointPrior::validate() const {
  a_fb.validate();
  b.validate();
  tau.validate();
}

double log_prior(const RateParams& theta, const JointPrior& prior) {
  const double la = prior.a_fb.log_pdf(theta.a_fb);
  if (la == kNegInf) return kNegInf;
  const double lb = prior.b.log_pdf(theta.b);
  if (lb == kNegInf) return kNegInf;
  return la + lb + prior.tau.log_pdf(theta.tau);
}

ScaledBeta fit_scaled_beta(double mean, double variance, double l, double u) {
  if (!(l < u)) throw InvalidArgument("fit_scaled_beta: need l < u");
  const double width = u - l;
  const double x = (mean - l) / width;
  const double s2 = variance / (width * width);
  if (!(x > 0.0 && x < 1.0)) throw InvalidArgument("fit_scaled_beta: mean outside bounds");
  if (!(s2 > 0.0)) throw DegenerateMoments("fit_scaled_beta: zero sample variance");
  if (s2 >= x * (1.0 - x)) {
    throw DegenerateMoments("fit_scaled_beta: variance too large for a beta distribution");
  }
  const double common = x * (1.0 - x) / s2 - 1.0;
  return ScaledBeta{x * common, (1.0 - x) * common, l, u};
}

GammaPrior fit_gamma(double mean, double variance) {
  if (!(mean > 0.0)) throw InvalidArgument("fit_gamma: mean must be positive");
  if (!(variance > 0.0)) throw DegenerateMoments("fit_gamma: zero sample variance");
  return GammaPrior{mean * mean / variance, mean / variance};
}

JointPrior fit_prior(std::span<const RateParams> samples, const PriorBounds& bounds) {
  if (samples.size() < 2) throw InvalidArgument("fit_prior: need at least 2 samples");
  for (const auto& s : samples) {
    if (s.a_fb < bounds.l_a || s.a_fb > bounds.u_a || s.b < bounds.l_b || s.b > bounds.u_b) {
      throw InvalidArgument("fit_prior: sample outside bounds");
    }
    if (!(s.tau > 0.0)) throw InvalidArgument("fit_prior: tau samples must be positive");
  }
  const auto moments = [&](auto get) {
    double mean = 0.0;
    for (const auto& s : samples) mean += get(s);
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (const auto& s : samples) ss += (get(s) - mean) * (get(s) - mean);
    return std::pair{mean, ss / static_cast<double>(samples.size() - 1)};
  };
  const auto [ma, va] = moments([](const RateParams& s) { return s.a_fb; });
  const auto [mb, vb] = moments([](const RateParams& s) { return s.b; });
  const auto [mt, vt] = moments([](const RateParams& s) { return s.tau; });
  return JointPrior{fit_scaled_beta(ma, va, bounds.l_a, bounds.u_a),
                    fit_scaled_beta(mb, vb, bounds.l_b, bounds.u_b), fit_gamma(mt, vt)};
}

JointPrior elicit_prior(MomentTarget a_fb, MomentTarget b, MomentTarget tau,
                        const PriorBounds& bounds) {
  return JointPrior{fit_scaled_beta(a_fb.mean, a_fb.sd * a_fb.sd, bounds.l_a, bounds.u_a),
                    fit_scaled_beta(b.mean, b.sd * b.sd, bounds.l_b, bounds.u_b),
                    fit_gamma(tau.mean, tau.sd * tau.sd)};
}

JointPrior default_prior() {
  const auto from_range = [](double lo, double hi) {
    return MomentTarget{0.5 * (lo + hi), 0.25 * (hi - lo)};
  };
  return elicit_prior(from_range(-2.4, 0.1), from_range(0.77, 1.6), from_range(0.02, 13.7));
}

std::vector<RateParams> sample_prior(const JointPrior& prior, CounterRng& rng, std::size_t n) {
  std::vector<RateParams> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RateParams theta;
    theta.a_fb = prior.a_fb.sample(rng);
    theta.b = prior.b.sample(rng);
    theta.tau = prior.tau.sample(rng);
    out.push_back(theta);
  }
  return out;
}

}  // namespace fiseis
