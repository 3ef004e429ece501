#pragma once

// Output noise in normal-ordered quanta.  For a passive network every port k
// injects thermal occupancy n_k, and the flux leaving port j is
//   N_j(delta) = sum_k |S_jk(delta)|^2 n_k.
// The half-quantum vacuum offset is not included.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nrcm/dynamics.hpp"
#include "nrcm/system.hpp"

namespace nrcm {

/// Occupancy overrides keyed by port label.  Ports not listed use their
/// default: zero for external lines, the mode occupancy for bath ports.
using BathOccupancies = std::map<std::string, double, std::less<>>;

struct NoiseSpectrum {
  std::string port;
  std::vector<double> grid;
  std::vector<double> total;
  std::vector<std::string> sources;                // port labels, S column order
  std::vector<std::vector<double>> contributions;  // [source][grid]
};

/// Occupancy injected at every port of `dynamics`, after applying overrides.
std::vector<double> port_occupancies(const std::vector<Port>& ports, const BathOccupancies& baths);

NoiseSpectrum output_noise(const ValidatedSystem& system, const BathOccupancies& baths,
                           std::span<const double> grid, std::string_view port,
                           const SweepOptions& options = {});

/// Same computation on an already evaluated response curve.
NoiseSpectrum output_noise(const ResponseCurve& curve, const BathOccupancies& baths,
                           std::string_view port);

/// CSV: delta, total, then one N_from_<source> column per source port.
void write_noise_csv(std::ostream& out, std::span<const NoiseSpectrum> spectra,
                     double delta_scale = 1.0, std::string_view delta_label = "delta_rad_s");

}  // namespace nrcm
