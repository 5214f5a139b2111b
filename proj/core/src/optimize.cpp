#include "fiseis/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fiseis {

std::vector<double> Box::clamp(std::vector<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::min(std::max(x[i], lo[i]), hi[i]);
  return x;
}

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, std::vector<double> step, const Box& box,
                             const NelderMeadOptions& options) {
  const std::size_t dim = x0.size();
  std::size_t evaluations = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<double> scale(dim);
  for (std::size_t i = 0; i < dim; ++i) scale[i] = std::max(box.hi[i] - box.lo[i], 1e-300);

  Vertex best{box.clamp(std::move(x0)), 0.0};
  best.f = eval(best.x);

  for (std::size_t round = 0; round <= options.restarts; ++round) {
    std::vector<Vertex> simplex;
    simplex.push_back(best);
    for (std::size_t i = 0; i < dim; ++i) {
      auto x = best.x;
      x[i] += step[i];
      if (x[i] > box.hi[i]) x[i] = best.x[i] - step[i];
      x = box.clamp(std::move(x));
      simplex.push_back({x, eval(x)});
    }

    while (evaluations < options.max_evaluations) {
      std::sort(simplex.begin(), simplex.end(),
                [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      const double spread = simplex.back().f - simplex.front().f;
      double diameter = 0.0;
      for (std::size_t v = 1; v <= dim; ++v) {
        for (std::size_t i = 0; i < dim; ++i) {
          diameter = std::max(diameter, std::abs(simplex[v].x[i] - simplex[0].x[i]) / scale[i]);
        }
      }
      if ((std::isfinite(spread) && spread <= options.f_tolerance) ||
          diameter <= options.x_tolerance) {
        break;
      }

      std::vector<double> centroid(dim, 0.0);
      for (std::size_t v = 0; v < dim; ++v) {
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].x[i] / dim;
      }
      const auto along = [&](double coef) {
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          x[i] = centroid[i] + coef * (simplex.back().x[i] - centroid[i]);
        }
        return box.clamp(std::move(x));
      };

      Vertex reflected{along(-1.0), 0.0};
      reflected.f = eval(reflected.x);
      if (reflected.f < simplex.front().f) {
        Vertex expanded{along(-2.0), 0.0};
        expanded.f = eval(expanded.x);
        simplex.back() = expanded.f < reflected.f ? expanded : reflected;
        continue;
      }
      if (reflected.f < simplex[dim - 1].f) {
        simplex.back() = reflected;
        continue;
      }
      const bool outside = reflected.f < simplex.back().f;
      Vertex contracted{along(outside ? -0.5 : 0.5), 0.0};
      contracted.f = eval(contracted.x);
      if (contracted.f < std::min(reflected.f, simplex.back().f)) {
        simplex.back() = contracted;
        continue;
      }
      for (std::size_t v = 1; v <= dim; ++v) {
        for (std::size_t i = 0; i < dim; ++i) {
          simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
        }
        simplex[v].f = eval(simplex[v].x);
      }
    }
    const auto it = std::min_element(simplex.begin(), simplex.end(),
                                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    const bool improved = it->f < best.f - options.f_tolerance;
    if (it->f <= best.f) best = *it;
    if (!improved || evaluations >= options.max_evaluations) break;
    for (auto& s : step) s *= 0.5;
  }
  return {best.x, best.f, evaluations};
}

}  // namespace fiseis
