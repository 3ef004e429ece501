#pragma once

// Time-origin (frame) transformations of scattering matrices between ports at
// different lab frequencies.  Shifting the time origin by t0 multiplies the
// field at port j by exp(-i w_j t0), so
//   S'_jk = S_jk exp(-i (w_j - w_k) t0).
// Magnitudes are unchanged; only phase nonreciprocity is frame dependent.

#include <cstddef>
#include <vector>

#include "nrcm/linalg.hpp"

namespace nrcm {

struct GaugeFrame {
  double t0 = 0.0;                  // s
  std::vector<double> frequencies;  // lab angular frequency of each port (rad/s)
};

CMatrix transform(const CMatrix& s, const GaugeFrame& frame);

struct NonreciprocityVerdict {
  bool nonreciprocal = false;
  // Witness (0-based): |S[row][col]| exceeds |S[col][row]| by `asymmetry`.
  std::size_t row = 0;
  std::size_t col = 0;
  double asymmetry = 0.0;
};

/// Magnitude criterion: nonreciprocal iff max_jk ||S_jk| - |S_kj|| > tol.
NonreciprocityVerdict is_nonreciprocal(const CMatrix& s, double tol);

/// A time origin t0 at which arg S'[row][col] == arg S'[col][row].
/// Throws GaugeError if the two port frequencies coincide or either entry
/// vanishes.
double equal_phase_frame(const CMatrix& s, const std::vector<double>& frequencies,
                         std::size_t row = 1, std::size_t col = 0);

}  // namespace nrcm
