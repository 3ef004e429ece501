#pragma once

// Domain model for linearized coupled-mode systems.
//
// Frame convention: every mode is described in a common frame rotating at the
// centre of the conversion window, and all responses are expressed versus the
// probe detuning delta (rad/s) from that centre.  An electromagnetic mode
// carries the pump detuning Delta of the Hamiltonian term -hbar*Delta*a^dag a,
// so its resonance sits at delta = -Delta.  A mechanical mode carries its
// frequency offset Omega from the window centre (term +hbar*Omega*b^dag b), so
// its resonance sits at delta = +Omega.  Resonant red-sideband pumping is
// therefore Delta = 0 and Omega = 0.
//
// A coupling between `first` and `second` with rate r and phase p contributes
//   hbar * r * (exp(i p) x_first x_second^dag + exp(-i p) x_first^dag x_second).
// All rates are angular (rad/s).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nrcm {

enum class ModeKind { electromagnetic, mechanical };
enum class CouplingKind { optomechanical, coherent };

std::string_view to_string(ModeKind kind);
std::string_view to_string(CouplingKind kind);

struct Mode {
  std::string id;
  ModeKind kind = ModeKind::electromagnetic;
  double detuning = 0.0;       // Delta (electromagnetic) or Omega offset (mechanical)
  double external_rate = 0.0;  // kappa_ex; zero for mechanical modes
  double loss_rate = 0.0;      // kappa_0 (electromagnetic) or Gamma_m (mechanical)
  double occupancy = 0.0;      // thermal occupancy of the intrinsic bath

  double total_decay() const noexcept { return external_rate + loss_rate; }
  /// Position of the bare resonance on the probe-detuning axis.
  double resonance() const noexcept {
    return kind == ModeKind::electromagnetic ? -detuning : detuning;
  }

  bool operator==(const Mode&) const = default;
};

struct Coupling {
  std::string first;
  std::string second;
  CouplingKind kind = CouplingKind::optomechanical;
  double rate = 0.0;   // g or J
  double phase = 0.0;  // phi or theta
  std::optional<double> vacuum_rate;   // g_0
  std::optional<double> pump_photons;  // n_c

  bool operator==(const Coupling&) const = default;
};

struct SystemSpec {
  std::vector<Mode> modes;
  std::vector<Coupling> couplings;

  bool operator==(const SystemSpec&) const = default;
};

/// A system that passed validation: phases wrapped into (-pi, pi] and
/// coupling endpoints resolved to mode indices (declaration order).
class ValidatedSystem {
 public:
  struct Link {
    std::size_t first;
    std::size_t second;
  };

  const SystemSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return spec_.modes.size(); }
  const Mode& mode(std::size_t i) const { return spec_.modes.at(i); }
  const std::vector<Mode>& modes() const noexcept { return spec_.modes; }
  const std::vector<Coupling>& couplings() const noexcept { return spec_.couplings; }
  const std::vector<Link>& links() const noexcept { return links_; }

  /// Index of the mode with the given id; throws ValidationError if absent.
  std::size_t mode_index(std::string_view id) const;
  std::optional<std::size_t> find_mode(std::string_view id) const;

 private:
  friend ValidatedSystem validate(SystemSpec spec);
  SystemSpec spec_;
  std::vector<Link> links_;
};

/// Checks every structural and physical rule and returns the normalized
/// system.  Throws ValidationError listing all violations.
ValidatedSystem validate(SystemSpec spec);

/// Same as validate but returns the violations instead of throwing.
std::vector<std::string> check(const SystemSpec& spec);

struct Cooperativity {
  double value = 0.0;
};

/// 4 g^2 / (kappa Gamma_m) for an optomechanical coupling (kappa of the
/// electromagnetic endpoint), 4 J^2 / (kappa_1 kappa_2) for a coherent one.
Cooperativity cooperativity(const ValidatedSystem& system, const Coupling& coupling);
Cooperativity cooperativity(const ValidatedSystem& system, std::size_t coupling_index);

/// Gauge-invariant phase accumulated around a closed loop of couplings.
///
/// The loop is walked starting from the `first` endpoint of the first listed
/// coupling and traversing it towards its `second` endpoint; each following
/// coupling must continue from the current mode.  Traversing a coupling along
/// its declared direction adds its phase, traversing it backwards subtracts
/// it.  The sum is wrapped into (-pi, pi].  Throws ValidationError when the
/// couplings do not chain into a closed loop.
double synthetic_flux(const ValidatedSystem& system, std::span<const std::size_t> loop);

/// Rate implied by a vacuum coupling and a pump photon number: g_0 sqrt(n_c).
double enhanced_rate(double vacuum_rate, double pump_photons);

}  // namespace nrcm
