#include "nrcm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "nrcm/errors.hpp"
#include "nrcm/format.hpp"

namespace nrcm {

DynamicalMatrix build_dynamics(const ValidatedSystem& system) {
  const std::size_t n = system.size();
  DynamicalMatrix d;
  d.drift = CMatrix::Zero(n, n);

  for (std::size_t j = 0; j < n; ++j) {
    const Mode& m = system.mode(j);
    d.drift(j, j) = Complex(m.total_decay() / 2.0, m.resonance());
    if (m.external_rate > 0.0) {
      d.ports.push_back({m.id, j, m.external_rate, PortKind::external, 0.0});
    }
  }
  d.external_count = d.ports.size();
  for (std::size_t j = 0; j < n; ++j) {
    const Mode& m = system.mode(j);
    if (m.loss_rate > 0.0) {
      d.ports.push_back({m.id + ".bath", j, m.loss_rate, PortKind::bath, m.occupancy});
    }
  }

  const auto& links = system.links();
  for (std::size_t c = 0; c < links.size(); ++c) {
    const Coupling& cp = system.couplings()[c];
    const Complex forward = Complex(0.0, cp.rate) * std::polar(1.0, cp.phase);
    d.drift(links[c].second, links[c].first) += forward;
    d.drift(links[c].first, links[c].second) += Complex(0.0, cp.rate) * std::polar(1.0, -cp.phase);
  }

  d.input = RMatrix::Zero(n, d.ports.size());
  for (std::size_t p = 0; p < d.ports.size(); ++p) {
    d.input(d.ports[p].mode, p) = std::sqrt(d.ports[p].rate);
  }
  return d;
}

namespace {

std::size_t find_port(const std::vector<Port>& ports, std::string_view label) {
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (ports[i].label == label) return i;
  }
  throw ValidationError("unknown port '" + std::string(label) + "'");
}

}  // namespace

std::size_t ScatteringMatrix::port_index(std::string_view label) const {
  return find_port(ports, label);
}

std::size_t ResponseCurve::port_index(std::string_view label) const {
  return find_port(ports, label);
}

ScatteringMatrix scattering(const DynamicalMatrix& dynamics, double delta) {
  const auto n = dynamics.drift.rows();
  const CMatrix response = dynamics.drift - Complex(0.0, delta) * CMatrix::Identity(n, n);
  const CMatrix rhs = dynamics.input.cast<Complex>();

  Eigen::PartialPivLU<CMatrix> lu(response);
  const double rcond = n > 0 ? lu.rcond() : 1.0;
  if (!(rcond > 1e-14)) {
    throw SingularityError("singular mode response at delta = " + exact(delta) +
                               " rad/s (reciprocal condition " + exact(rcond) + ")",
                           delta);
  }
  const CMatrix x = lu.solve(rhs);

  ScatteringMatrix out;
  out.detuning = delta;
  out.ports = dynamics.ports;
  out.external_count = dynamics.external_count;
  const double scale = std::max(max_abs(rhs), 1e-300);
  out.residual = max_abs(response * x - rhs) / scale;
  const auto p = static_cast<Eigen::Index>(dynamics.ports.size());
  out.s = CMatrix::Identity(p, p) - rhs.transpose() * x;
  return out;
}

ScatteringMatrix scattering(const ValidatedSystem& system, double delta) {
  return scattering(build_dynamics(system), delta);
}

TransmissionPair conversion_closed_form(double c1, double c2, double dphi) {
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw ValidationError("cooperativities must be non-negative");
  const double amplitude = 2.0 * std::sqrt(c1 * c2) / (1.0 + c1 + c2);
  const Complex s21 = std::polar(amplitude, dphi);
  return {s21, std::conj(s21)};
}

TransmissionPair coherent_closed_form(double c_coh, double theta) {
  if (!(c_coh >= 0.0)) throw ValidationError("cooperativity must be non-negative");
  const double amplitude = 2.0 * std::sqrt(c_coh) / (1.0 + c_coh);
  const Complex i(0.0, 1.0);
  return {amplitude * i * std::polar(1.0, theta), amplitude * i * std::polar(1.0, -theta)};
}

std::vector<double> ResponseCurve::magnitude(std::size_t out, std::size_t in) const {
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = std::abs(s[i](out, in));
  return v;
}

std::vector<double> ResponseCurve::phase(std::size_t out, std::size_t in) const {
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v[i] = std::arg(s[i](out, in));
  return v;
}

std::vector<double> uniform_grid(double delta_min, double delta_max, std::size_t n_points) {
  if (n_points < 2) throw ValidationError("sweep needs at least 2 grid points");
  if (!std::isfinite(delta_min) || !std::isfinite(delta_max) || !(delta_max > delta_min))
    throw ValidationError("sweep range must satisfy delta_min < delta_max");
  std::vector<double> grid(n_points);
  const double step = (delta_max - delta_min) / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) grid[i] = delta_min + step * static_cast<double>(i);
  grid.back() = delta_max;
  return grid;
}

ResponseCurve sweep(const ValidatedSystem& system, std::span<const double> grid,
                    const SweepOptions& options) {
  if (grid.empty()) throw ValidationError("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ValidationError("sweep grid must be strictly increasing");
  }

  const DynamicalMatrix dyn = build_dynamics(system);
  ResponseCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.ports = dyn.ports;
  curve.external_count = dyn.external_count;
  curve.s.resize(grid.size());
  std::vector<double> residuals(grid.size(), 0.0);

  const std::size_t workers =
      std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(grid.size(), 1));
  struct Failure {
    std::size_t index = 0;
    std::exception_ptr error;
  };
  std::vector<Failure> failures(workers);
  // Strided partition; each worker owns disjoint output slots and stops at
  // its first failing point.
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < grid.size(); i += workers) {
      try {
        ScatteringMatrix sm = scattering(dyn, grid[i]);
        curve.s[i] = std::move(sm.s);
        residuals[i] = sm.residual;
      } catch (...) {
        failures[w] = {i, std::current_exception()};
        return;
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  // Report the failing point with the smallest grid index.
  const Failure* first = nullptr;
  for (const auto& f : failures) {
    if (f.error && (!first || f.index < first->index)) first = &f;
  }
  if (first) std::rethrow_exception(first->error);

  curve.max_residual = *std::max_element(residuals.begin(), residuals.end());
  return curve;
}

ResponseCurve sweep(const ValidatedSystem& system, double delta_min, double delta_max,
                    std::size_t n_points, const SweepOptions& options) {
  const auto grid = uniform_grid(delta_min, delta_max, n_points);
  return sweep(system, grid, options);
}

void write_response_csv(std::ostream& out, const ResponseCurve& curve,
                        std::span<const PortPair> pairs, double delta_scale,
                        std::string_view delta_label) {
  out << delta_label;
  for (const auto& [o, i] : pairs) {
    const std::string tag = curve.ports.at(o).label + "_" + curve.ports.at(i).label;
    out << ",mag_" << tag << ",phase_" << tag;
  }
  out << '\n';
  for (std::size_t g = 0; g < curve.size(); ++g) {
    out << fixed12(curve.grid[g] / delta_scale);
    for (const auto& [o, i] : pairs) {
      const Complex v = curve.s[g](o, i);
      out << ',' << fixed12(std::abs(v)) << ',' << fixed12(std::arg(v));
    }
    out << '\n';
  }
}

}  // namespace nrcm
