#pragma once

// Coupled-mode dynamics and input-output scattering.
//
// Convention (shared by every module):
//   d/dt a = -M a + K a_in,   a_out = a_in - K^T a,
// with M_jj = i*resonance_j + kappa_j/2 and, for a coupling first -> second of
// rate r and phase p, M[second][first] = i r e^{+ip}, M[first][second] = i r e^{-ip}.
// In the frequency domain at probe detuning delta:
//   S(delta) = I - K^T (M - i delta I)^{-1} K.
// This gives positive-real centre transmission for an optomechanical
// converter with equal pump phases.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nrcm/linalg.hpp"
#include "nrcm/system.hpp"

namespace nrcm {

enum class PortKind { external, bath };

/// One scattering channel.  External ports are the measurable transmission
/// lines (kappa_ex); bath ports carry intrinsic loss (kappa_0 or Gamma_m).
struct Port {
  std::string label;
  std::size_t mode = 0;
  double rate = 0.0;
  PortKind kind = PortKind::external;
  double occupancy = 0.0;  // default thermal input occupancy of this port
};

struct DynamicalMatrix {
  CMatrix drift;         // M, N x N (rad/s)
  RMatrix input;         // K, N x P, entries sqrt(rate)
  std::vector<Port> ports;
  std::size_t external_count = 0;
};

/// Assembles M and K.  Modes keep declaration order; ports are every
/// external port (mode order) followed by every bath port (mode order).
DynamicalMatrix build_dynamics(const ValidatedSystem& system);

struct ScatteringMatrix {
  double detuning = 0.0;          // probe detuning delta (rad/s)
  CMatrix s;                      // P x P over all ports
  std::vector<Port> ports;
  std::size_t external_count = 0;
  double residual = 0.0;          // relative residual of the linear solve

  /// Submatrix over the external ports only (the device response).
  CMatrix external() const { return s.topLeftCorner(external_count, external_count); }
  std::size_t port_index(std::string_view label) const;
};

/// Residual above which a solve is flagged as ill-conditioned.
inline constexpr double kResidualWarning = 1e-9;

/// S(delta) over all ports.  Throws SingularityError when M - i delta is
/// singular to working precision.
ScatteringMatrix scattering(const DynamicalMatrix& dynamics, double delta);
ScatteringMatrix scattering(const ValidatedSystem& system, double delta);

struct TransmissionPair {
  Complex s21;
  Complex s12;
};

/// Centre-of-window converter response for cooperativities c1, c2 and pump
/// phase difference dphi = phi_1 - phi_2.
TransmissionPair conversion_closed_form(double c1, double c2, double dphi);

/// Conversion through a direct coherent coupling of cooperativity c_coh and
/// phase theta, including its intrinsic factor i.
TransmissionPair coherent_closed_form(double c_coh, double theta);

struct ResponseCurve {
  std::vector<double> grid;       // strictly increasing delta values
  std::vector<CMatrix> s;         // full S at every grid point
  std::vector<Port> ports;
  std::size_t external_count = 0;
  double max_residual = 0.0;

  std::size_t size() const noexcept { return grid.size(); }
  std::size_t port_index(std::string_view label) const;
  std::vector<double> magnitude(std::size_t out, std::size_t in) const;
  std::vector<double> phase(std::size_t out, std::size_t in) const;
};

struct SweepOptions {
  unsigned workers = 1;
};

/// Uniform grid of n_points values from delta_min to delta_max inclusive.
std::vector<double> uniform_grid(double delta_min, double delta_max, std::size_t n_points);

/// Evaluates S on a uniform grid.  Points are computed in parallel and merged
/// by grid index, so the result does not depend on the worker count.
ResponseCurve sweep(const ValidatedSystem& system, double delta_min, double delta_max,
                    std::size_t n_points, const SweepOptions& options = {});
ResponseCurve sweep(const ValidatedSystem& system, std::span<const double> grid,
                    const SweepOptions& options = {});

/// (out, in) port index pair.
using PortPair = std::pair<std::size_t, std::size_t>;

/// CSV with a header naming the ports: delta column first, then
/// mag_<out>_<in> and phase_<out>_<in> for every requested pair.  delta is
/// written divided by `delta_scale` (2*pi for Hz output).  Values use fixed
/// notation with 12 decimals.
void write_response_csv(std::ostream& out, const ResponseCurve& curve,
                        std::span<const PortPair> pairs, double delta_scale = 1.0,
                        std::string_view delta_label = "delta_rad_s");

}  // namespace nrcm
