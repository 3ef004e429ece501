#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace nrcm {

struct SimplexOptions {
  double f_tolerance = 1e-10;   // stop when max f - min f over the simplex falls below
  double x_tolerance = 1e-14;   // or when the simplex collapses (relative to the box)
  std::size_t max_evaluations = 20000;
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Box-constrained Nelder-Mead.  Trial points are clamped into [lower, upper];
/// coordinates with lower == upper stay fixed.  Fully deterministic.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, std::vector<double> step,
                          const std::vector<double>& lower, const std::vector<double>& upper,
                          const SimplexOptions& options = {});

}  // namespace nrcm
