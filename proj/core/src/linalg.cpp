#include "nrcm/linalg.hpp"

#include <cmath>

namespace nrcm {

double wrap_phase(double radians) {
  double r = std::remainder(radians, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double max_abs(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double unitarity_defect(const CMatrix& s) {
  const CMatrix gram = s.adjoint() * s - CMatrix::Identity(s.cols(), s.cols());
  return max_abs(gram);
}

}  // namespace nrcm
