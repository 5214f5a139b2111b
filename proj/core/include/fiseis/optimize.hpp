#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fiseis {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> clamp(std::vector<double> x) const;
};

struct NelderMeadOptions {
  std::size_t max_evaluations = 4000;
  double f_tolerance = 1e-10;  // spread of simplex values
  double x_tolerance = 1e-9;   // simplex diameter, relative to the box
  std::size_t restarts = 3;    // fresh simplices around the incumbent
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  std::size_t evaluations;
};

// Minimizes f over a box. Trial points are projected onto the box. Values
// that are NaN or +inf are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, std::vector<double> step, const Box& box,
                             const NelderMeadOptions& options = {});

}  // namespace fiseis
