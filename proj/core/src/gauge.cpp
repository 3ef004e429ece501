#include "nrcm/gauge.hpp"

#include <cmath>

#include "nrcm/errors.hpp"

namespace nrcm {

CMatrix transform(const CMatrix& s, const GaugeFrame& frame) {
  if (s.rows() != s.cols() || static_cast<std::size_t>(s.rows()) != frame.frequencies.size())
    throw ValidationError("gauge frame needs one frequency per port of a square S-matrix");
  CMatrix out = s;
  const auto n = s.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double dw = frame.frequencies[static_cast<std::size_t>(j)] -
                        frame.frequencies[static_cast<std::size_t>(k)];
      out(j, k) *= std::polar(1.0, -dw * frame.t0);
    }
  }
  return out;
}

NonreciprocityVerdict is_nonreciprocal(const CMatrix& s, double tol) {
  if (s.rows() != s.cols()) throw ValidationError("nonreciprocity test needs a square S-matrix");
  NonreciprocityVerdict v;
  const auto n = s.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = std::abs(s(j, k)) - std::abs(s(k, j));
      if (d > v.asymmetry) {
        v.asymmetry = d;
        v.row = static_cast<std::size_t>(j);
        v.col = static_cast<std::size_t>(k);
      }
    }
  }
  v.nonreciprocal = v.asymmetry > tol;
  return v;
}

double equal_phase_frame(const CMatrix& s, const std::vector<double>& frequencies,
                         std::size_t row, std::size_t col) {
  const auto n = static_cast<std::size_t>(s.rows());
  if (s.rows() != s.cols() || frequencies.size() != n || row >= n || col >= n || row == col)
    throw ValidationError("equal_phase_frame: bad port pair or frequency list");
  const double dw = frequencies[row] - frequencies[col];
  if (dw == 0.0)
    throw GaugeError("ports at equal frequencies: no frame change can alter their relative phase");
  const Complex forward = s(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  const Complex backward = s(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(row));
  if (forward == Complex(0.0) || backward == Complex(0.0))
    throw GaugeError("equal_phase_frame: a transmission entry vanishes, its phase is undefined");
  // arg S'_rc = arg S_rc - dw t0 and arg S'_cr = arg S_cr + dw t0.
  return wrap_phase(std::arg(forward) - std::arg(backward)) / (2.0 * dw);
}

}  // namespace nrcm
