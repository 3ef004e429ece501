#pragma once

// Small builders shared by the tests.  Rates are written out by hand here
// rather than through the design module so oracles stay independent of it.

#include <cmath>
#include <string>

#include "nrcm/system.hpp"

namespace nrcm::testing {

inline Mode cavity(std::string id, double kappa_ex, double kappa_0 = 0.0, double detuning = 0.0) {
  Mode m;
  m.id = std::move(id);
  m.kind = ModeKind::electromagnetic;
  m.external_rate = kappa_ex;
  m.loss_rate = kappa_0;
  m.detuning = detuning;
  return m;
}

inline Mode mechanics(std::string id, double gamma, double offset = 0.0, double occupancy = 0.0) {
  Mode m;
  m.id = std::move(id);
  m.kind = ModeKind::mechanical;
  m.loss_rate = gamma;
  m.detuning = offset;
  m.occupancy = occupancy;
  return m;
}

inline Coupling link(std::string a, std::string b, double rate, double phase = 0.0,
                     CouplingKind kind = CouplingKind::optomechanical) {
  Coupling c;
  c.first = std::move(a);
  c.second = std::move(b);
  c.kind = kind;
  c.rate = rate;
  c.phase = phase;
  return c;
}

// g from C = 4 g^2 / (decay_a decay_b)
inline double rate_for(double c, double decay_a, double decay_b) {
  return std::sqrt(c * decay_a * decay_b / 4.0);
}

// Two cavities sharing one mechanical mode.
inline SystemSpec converter(double c1, double c2, double phi1 = 0.0, double phi2 = 0.0,
                            double kappa = 1.0, double gamma = 1.0) {
  SystemSpec s;
  s.modes = {cavity("a1", kappa), cavity("a2", kappa), mechanics("b", gamma)};
  s.couplings = {link("a1", "b", rate_for(c1, kappa, gamma), phi1),
                 link("a2", "b", rate_for(c2, kappa, gamma), phi2)};
  return s;
}

// Converter plus a direct hop a1 -> a2 with phase theta.
inline SystemSpec converter_with_hop(double c1, double c2, double c_coh, double theta,
                                     double kappa = 1.0, double gamma = 1.0) {
  SystemSpec s = converter(c1, c2, 0.0, 0.0, kappa, gamma);
  s.couplings.push_back(
      link("a1", "a2", rate_for(c_coh, kappa, kappa), theta, CouplingKind::coherent));
  return s;
}

// Four-mode isolator at its matched point: x = splitting / gamma,
// C = (1 + x^2) / 2 and flux pi - 2 atan(x) on the a1-b1 link null S12(0)
// and both reflections, leaving |S21(0)| = x / sqrt(1 + x^2).
inline SystemSpec matched_four_mode(double c, double kappa, double gamma, double nbar = 0.0) {
  const double x = std::sqrt(2.0 * c - 1.0);
  const double flux = 3.14159265358979323846 - 2.0 * std::atan(x);
  SystemSpec s;
  s.modes = {cavity("a1", kappa), cavity("a2", kappa), mechanics("b1", gamma, x * gamma / 2.0, nbar),
             mechanics("b2", gamma, -x * gamma / 2.0, nbar)};
  const double g = rate_for(c, kappa, gamma);
  s.couplings = {link("a1", "b1", g, flux), link("a2", "b1", g), link("a2", "b2", g),
                 link("a1", "b2", g)};
  return s;
}

}  // namespace nrcm::testing
