#include "nrcm/noise.hpp"

#include <cmath>
#include <ostream>

#include "nrcm/errors.hpp"
#include "nrcm/format.hpp"

namespace nrcm {

std::vector<double> port_occupancies(const std::vector<Port>& ports, const BathOccupancies& baths) {
  std::vector<double> n(ports.size());
  for (std::size_t k = 0; k < ports.size(); ++k) n[k] = ports[k].occupancy;
  for (const auto& [label, value] : baths) {
    if (!std::isfinite(value) || value < 0.0)
      throw ValidationError("occupancy for port '" + label + "' must be non-negative");
    bool found = false;
    for (std::size_t k = 0; k < ports.size(); ++k) {
      if (ports[k].label == label) {
        n[k] = value;
        found = true;
      }
    }
    if (!found) throw ValidationError("occupancy given for unknown port '" + label + "'");
  }
  return n;
}

NoiseSpectrum output_noise(const ResponseCurve& curve, const BathOccupancies& baths,
                           std::string_view port) {
  const std::size_t j = curve.port_index(port);
  if (curve.ports[j].kind != PortKind::external)
    throw ValidationError("noise is reported at external ports only, not '" + std::string(port) + "'");
  const auto occupancy = port_occupancies(curve.ports, baths);
  const std::size_t sources = curve.ports.size();

  NoiseSpectrum out;
  out.port = std::string(port);
  out.grid = curve.grid;
  out.total.assign(curve.size(), 0.0);
  out.contributions.assign(sources, std::vector<double>(curve.size(), 0.0));
  for (const auto& p : curve.ports) out.sources.push_back(p.label);

  for (std::size_t g = 0; g < curve.size(); ++g) {
    double sum = 0.0;
    for (std::size_t k = 0; k < sources; ++k) {
      const double c = std::norm(curve.s[g](j, k)) * occupancy[k];
      out.contributions[k][g] = c;
      sum += c;
    }
    out.total[g] = sum;
  }
  return out;
}

NoiseSpectrum output_noise(const ValidatedSystem& system, const BathOccupancies& baths,
                           std::span<const double> grid, std::string_view port,
                           const SweepOptions& options) {
  // Reject bad occupancies before paying for the sweep.
  port_occupancies(build_dynamics(system).ports, baths);
  return output_noise(sweep(system, grid, options), baths, port);
}

void write_noise_csv(std::ostream& out, std::span<const NoiseSpectrum> spectra,
                     double delta_scale, std::string_view delta_label) {
  if (spectra.empty()) return;
  out << delta_label;
  for (const auto& s : spectra) {
    out << ",N_" << s.port;
    for (const auto& src : s.sources) out << ",N_" << s.port << "_from_" << src;
  }
  out << '\n';
  const auto& grid = spectra.front().grid;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out << fixed12(grid[g] / delta_scale);
    for (const auto& s : spectra) {
      out << ',' << fixed12(s.total[g]);
      for (const auto& c : s.contributions) out << ',' << fixed12(c[g]);
    }
    out << '\n';
  }
}

}  // namespace nrcm
