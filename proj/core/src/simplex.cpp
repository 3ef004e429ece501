#include "nrcm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nrcm/errors.hpp"

namespace nrcm {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> start, std::vector<double> step,
                          const std::vector<double>& lower, const std::vector<double>& upper,
                          const SimplexOptions& options) {
  const std::size_t dim = start.size();
  if (step.size() != dim || lower.size() != dim || upper.size() != dim)
    throw ValidationError("nelder_mead: dimension mismatch");

  // Only coordinates with a non-degenerate interval take part in the search.
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < dim; ++i) {
    if (lower[i] > upper[i]) throw ValidationError("nelder_mead: lower bound above upper bound");
    start[i] = std::clamp(start[i], lower[i], upper[i]);
    if (upper[i] > lower[i]) free.push_back(i);
  }

  SimplexResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < dim; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };

  const std::size_t n = free.size();
  if (n == 0) {
    result.x = start;
    result.f = eval(start);
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> pts(n + 1, start);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = free[k];
    double h = step[i] != 0.0 ? step[i] : 0.05 * (upper[i] - lower[i]);
    if (start[i] + h > upper[i]) h = -h;
    pts[k + 1][i] = start[i] + h;
    clamp(pts[k + 1]);
  }
  std::vector<double> vals(n + 1);
  for (std::size_t k = 0; k <= n; ++k) vals[k] = eval(pts[k]);

  std::vector<std::size_t> order(n + 1);
  constexpr double reflect = 1.0, expand = 2.0, contract = 0.5, shrink = 0.5;

  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      for (std::size_t i : free) {
        const double width = upper[i] - lower[i];
        diameter = std::max(diameter, std::abs(pts[k][i] - pts[best][i]) / width);
      }
    }
    if (vals[worst] - vals[best] <= options.f_tolerance || diameter <= options.x_tolerance) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += pts[k][i] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t i = 0; i < dim; ++i) x[i] = centroid[i] + t * (pts[worst][i] - centroid[i]);
      clamp(x);
      return x;
    };

    auto xr = along(-reflect);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      auto xe = along(-expand);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        vals[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = std::move(xr);
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    auto xc = along(outside ? -contract : contract);
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = std::move(xc);
      vals[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < dim; ++i)
        pts[k][i] = pts[best][i] + shrink * (pts[k][i] - pts[best][i]);
      vals[k] = eval(pts[k]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(vals.begin(), vals.end()) - vals.begin());
  result.x = pts[best];
  result.f = vals[best];
  return result;
}

}  // namespace nrcm
