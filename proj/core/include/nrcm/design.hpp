#pragma once

// Isolator synthesis: adiabatic elimination of mechanical modes, reference
// topologies, the matched condition for the coherent + optomechanical
// three-mode isolator, numerical synthesis for the two-mechanical-mode
// isolator, and isolation metrics.
//
// Loop orientation used for the synthetic flux of both reference topologies:
// a1 -> (mechanical path) -> a2 -> (second path) -> a1.  With this
// orientation a positive flux of pi/2 in the three-mode isolator cancels
// S12 (transmission a1 -> a2 survives).

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "nrcm/dynamics.hpp"
#include "nrcm/linalg.hpp"
#include "nrcm/system.hpp"

namespace nrcm {

// ---------------------------------------------------------------------------
// Adiabatic elimination

struct EffectiveSystem {
  std::vector<std::size_t> retained;  // indices of the kept (electromagnetic) modes
  DynamicalMatrix dynamics;           // effective M and the kept modes' own ports
  Complex coherent;                   // J_tot e^{i theta_tot}: Hermitian part, entry (2,1)
  Complex dissipative;                // Gamma_dis e^{i psi}: anti-Hermitian part, entry (2,1)
  double evaluation_detuning = 0.0;
  /// min Gamma_m / max(g, kappa); elimination is accurate when this is large.
  double validity_ratio = 0.0;
};

/// Replaces every mechanical mode by the effective interaction it mediates,
/// with the mechanical susceptibility frozen at `evaluation_detuning`.  For
/// resonant mechanics this yields the dissipative coupling 2 g1 g2 / Gamma_m
/// with phase phi_1 - phi_2 plus local damping 2 g_i^2 / Gamma_m.  Exact at
/// delta == evaluation_detuning.  Throws ValidationError when a mechanical
/// mode couples to fewer than two electromagnetic modes.
EffectiveSystem adiabatic_eliminate(const ValidatedSystem& system, double evaluation_detuning = 0.0);

ScatteringMatrix scattering(const EffectiveSystem& effective, double delta);

// ---------------------------------------------------------------------------
// Reference topologies (mode ids a1, a2, b / b1, b2)

struct ConverterParams {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double gamma_m = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
};
SystemSpec make_converter(const ConverterParams& p);

struct SchemeBParams {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double gamma_m = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c_coh = 1.0;
  double flux = kPi / 2.0;  // carried entirely by the coherent coupling
};
SystemSpec make_scheme_b(const SchemeBParams& p);

struct SchemeCParams {
  double kappa1 = 1.0;        // external rates
  double kappa2 = 1.0;
  double loss1 = 0.0;         // intrinsic cavity loss
  double loss2 = 0.0;
  double gamma1 = 1.0;        // b1 damping
  double gamma2 = 1.0;        // b2 damping
  double cooperativity = 1.0; // shared by all four links
  double flux = 0.0;          // carried entirely by the a1-b1 link
  double splitting = 0.0;     // b1 at +splitting/2, b2 at -splitting/2
  double mechanical_occupancy = 0.0;

  bool operator==(const SchemeCParams&) const = default;
};
SystemSpec make_scheme_c(const SchemeCParams& p);

/// Loop flux of the three-mode or four-mode reference topology, in the
/// orientation documented above.
double scheme_flux(const ValidatedSystem& system);

// ---------------------------------------------------------------------------
// Three-mode isolator

struct SchemeBCondition {
  double c_coh = 0.0;
  double flux = 0.0;
};

/// Matched coherent and dissipative paths: C_coh = C1 C2 and flux +pi/2
/// (|S12(0)| = 0) or -pi/2 when `reverse` (|S21(0)| = 0).
SchemeBCondition scheme_b_condition(double c1, double c2, bool reverse = false);

// ---------------------------------------------------------------------------
// Metrics

inline constexpr double kInfiniteDepth = std::numeric_limits<double>::infinity();

struct IsolationMetrics {
  /// |20 log10(|S21(0)| / |S12(0)|)|; +infinity when the blocked entry is exactly zero.
  double depth_db = 0.0;
  /// Measure of the detuning set where the isolation in `direction` reaches
  /// the threshold (rad/s).
  double bandwidth = 0.0;
  /// -20 log10 of the passing transmission at the centre.
  double insertion_loss_db = 0.0;
  /// +1 when S21 passes, -1 when S12 passes, 0 when reciprocal at the centre.
  int direction = 0;
};

/// Metrics from a response curve.  `forward` is the (out, in) pair of S21.
/// The centre value is taken at delta = 0 (linear interpolation of the
/// magnitudes if 0 is not a grid point).
IsolationMetrics isolation_metrics(const ResponseCurve& curve, double threshold_db,
                                   PortPair forward = {1, 0});

/// Centre-only metrics (bandwidth left at zero).
IsolationMetrics center_metrics(const CMatrix& s, PortPair forward = {1, 0});

// ---------------------------------------------------------------------------
// Four-mode isolator synthesis

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SchemeCProblem {
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double loss1 = 0.0;
  double loss2 = 0.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double mechanical_occupancy = 0.0;
  Interval flux{-kPi, kPi};
  Interval splitting{0.0, 10.0};      // rad/s
  Interval cooperativity{0.1, 100.0};
  double insertion_loss_budget_db = 3.0;
  double target_depth_db = 20.0;
  double threshold_db = 20.0;         // for the reported bandwidth
  std::size_t flux_points = 24;
  std::size_t splitting_points = 12;
  std::size_t cooperativity_points = 5;
  std::size_t refinements = 3;        // simplex runs from the best seeds
  double tolerance = 1e-10;
  std::size_t max_evaluations = 20000;
  std::size_t verification_points = 4001;
  unsigned workers = 1;               // threads for grid seeding and verification
};

/// Reads the fixed rates of a four-mode (two electromagnetic, two mechanical,
/// four optomechanical links, no coherent link) system into a problem with
/// default bounds scaled to its mechanical damping.
SchemeCProblem scheme_c_problem(const ValidatedSystem& system);

enum class DesignStatus { target_met, below_target, not_converged };
std::string_view to_string(DesignStatus status);

struct DesignResult {
  SchemeCParams parameters;
  IsolationMetrics metrics;
  double objective = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  DesignStatus status = DesignStatus::below_target;
  std::string message;
};

/// Coarse grid over (flux, splitting, cooperativity), evaluated in parallel,
/// followed by simplex
/// refinement of |S12(0)|^2/|S21(0)|^2 plus a quadratic penalty on insertion
/// loss above budget.  Deterministic.  Throws ValidationError for infeasible
/// bounds; a run that cannot reach the target is reported through `status`.
DesignResult optimize_scheme_c(const SchemeCProblem& problem);

/// Bandwidth and metrics of a configuration from a verification sweep.
IsolationMetrics verify_scheme_c(const SchemeCParams& params, double threshold_db,
                                 std::size_t points, const SweepOptions& options = {});

}  // namespace nrcm
