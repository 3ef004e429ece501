#include "nrcm/system.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "nrcm/errors.hpp"
#include "nrcm/linalg.hpp"

namespace nrcm {

std::string_view to_string(ModeKind kind) {
  return kind == ModeKind::electromagnetic ? "electromagnetic" : "mechanical";
}

std::string_view to_string(CouplingKind kind) {
  return kind == CouplingKind::optomechanical ? "optomechanical" : "coherent";
}

double enhanced_rate(double vacuum_rate, double pump_photons) {
  return vacuum_rate * std::sqrt(pump_photons);
}

namespace {

bool nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

std::string coupling_name(const Coupling& c, std::size_t index) {
  return "coupling #" + std::to_string(index) + " (" + c.first + " -> " + c.second + ")";
}

}  // namespace

std::vector<std::string> check(const SystemSpec& spec) {
  std::vector<std::string> errors;
  std::map<std::string, std::size_t, std::less<>> index;

  if (spec.modes.empty()) errors.emplace_back("system has no modes");

  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    const Mode& m = spec.modes[i];
    const std::string name = "mode '" + m.id + "'";
    if (m.id.empty()) errors.push_back("mode #" + std::to_string(i) + " has an empty id");
    if (!index.emplace(m.id, i).second) errors.push_back("duplicate mode id '" + m.id + "'");
    if (!std::isfinite(m.detuning)) errors.push_back(name + ": detuning is not finite");
    if (!nonnegative(m.external_rate)) errors.push_back(name + ": negative or non-finite external rate");
    if (!nonnegative(m.loss_rate)) errors.push_back(name + ": negative or non-finite loss rate");
    if (!nonnegative(m.occupancy)) errors.push_back(name + ": negative or non-finite occupancy");
    if (m.kind == ModeKind::mechanical && m.external_rate != 0.0)
      errors.push_back(name + ": mechanical modes cannot have an external port");
    if (nonnegative(m.external_rate) && nonnegative(m.loss_rate) && !(m.total_decay() > 0.0))
      errors.push_back(name + ": total decay rate must be positive (undamped mode)");
  }

  // Union-find over mode indices for the connectivity rule.
  std::vector<std::size_t> parent(spec.modes.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::size_t i = 0; i < spec.couplings.size(); ++i) {
    const Coupling& c = spec.couplings[i];
    const std::string name = coupling_name(c, i);
    auto a = index.find(c.first);
    auto b = index.find(c.second);
    if (a == index.end()) errors.push_back(name + ": unknown mode id '" + c.first + "'");
    if (b == index.end()) errors.push_back(name + ": unknown mode id '" + c.second + "'");
    if (c.first == c.second) errors.push_back(name + ": endpoints must be distinct");
    if (!nonnegative(c.rate)) errors.push_back(name + ": negative or non-finite rate");
    if (!std::isfinite(c.phase)) errors.push_back(name + ": phase is not finite");

    if (c.vacuum_rate.has_value() != c.pump_photons.has_value()) {
      errors.push_back(name + ": g0 and n_c must be given together");
    } else if (c.vacuum_rate) {
      if (!nonnegative(*c.vacuum_rate) || !nonnegative(*c.pump_photons)) {
        errors.push_back(name + ": g0 and n_c must be non-negative");
      } else {
        const double implied = enhanced_rate(*c.vacuum_rate, *c.pump_photons);
        if (std::abs(c.rate - implied) > 1e-12 * c.rate)
          errors.push_back(name + ": rate differs from g0*sqrt(n_c)");
      }
    }

    if (a != index.end() && b != index.end()) {
      const Mode& ma = spec.modes[a->second];
      const Mode& mb = spec.modes[b->second];
      if (c.kind == CouplingKind::optomechanical && ma.kind == mb.kind)
        errors.push_back(name + ": optomechanical coupling must join an electromagnetic and a "
                                "mechanical mode (kind mismatch)");
      parent[find(a->second)] = find(b->second);
    }
  }

  if (errors.empty() && !spec.modes.empty()) {
    const std::size_t root = find(0);
    for (std::size_t i = 1; i < spec.modes.size(); ++i) {
      if (find(i) != root) {
        errors.push_back("coupling graph is not connected: mode '" + spec.modes[i].id +
                         "' is unreachable from '" + spec.modes[0].id + "'");
      }
    }
  }
  return errors;
}

ValidatedSystem validate(SystemSpec spec) {
  auto errors = check(spec);
  if (!errors.empty()) throw ValidationError(std::move(errors));

  ValidatedSystem out;
  for (Coupling& c : spec.couplings) c.phase = wrap_phase(c.phase);
  out.spec_ = std::move(spec);
  for (const Coupling& c : out.spec_.couplings) {
    out.links_.push_back({*out.find_mode(c.first), *out.find_mode(c.second)});
  }
  return out;
}

std::optional<std::size_t> ValidatedSystem::find_mode(std::string_view id) const {
  for (std::size_t i = 0; i < spec_.modes.size(); ++i) {
    if (spec_.modes[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t ValidatedSystem::mode_index(std::string_view id) const {
  auto i = find_mode(id);
  if (!i) throw ValidationError("unknown mode id '" + std::string(id) + "'");
  return *i;
}

Cooperativity cooperativity(const ValidatedSystem& system, const Coupling& coupling) {
  const Mode& a = system.mode(system.mode_index(coupling.first));
  const Mode& b = system.mode(system.mode_index(coupling.second));
  const double product = a.total_decay() * b.total_decay();
  if (!(a.total_decay() > 0.0) || !(b.total_decay() > 0.0))
    throw ValidationError("cooperativity undefined: zero total decay on an endpoint of " +
                          coupling.first + " -> " + coupling.second);
  // Both branches reduce to 4 r^2 / (decay_a decay_b): kappa * Gamma_m for an
  // optomechanical link, kappa_1 * kappa_2 for a coherent one.
  return {4.0 * coupling.rate * coupling.rate / product};
}

Cooperativity cooperativity(const ValidatedSystem& system, std::size_t coupling_index) {
  return cooperativity(system, system.couplings().at(coupling_index));
}

double synthetic_flux(const ValidatedSystem& system, std::span<const std::size_t> loop) {
  if (loop.empty()) throw ValidationError("synthetic flux: empty loop");
  const auto& links = system.links();
  const auto& couplings = system.couplings();

  std::set<std::size_t> seen;
  const std::size_t start = links.at(loop.front()).first;
  std::size_t current = start;
  double flux = 0.0;
  for (std::size_t idx : loop) {
    if (idx >= links.size()) throw ValidationError("synthetic flux: coupling index out of range");
    if (!seen.insert(idx).second)
      throw ValidationError("synthetic flux: coupling #" + std::to_string(idx) + " repeated");
    const auto& link = links[idx];
    if (link.first == current) {
      flux += couplings[idx].phase;
      current = link.second;
    } else if (link.second == current) {
      flux -= couplings[idx].phase;
      current = link.first;
    } else {
      throw ValidationError("synthetic flux: couplings do not form a loop (coupling #" +
                            std::to_string(idx) + " does not touch mode '" +
                            system.mode(current).id + "')");
    }
  }
  if (current != start)
    throw ValidationError("synthetic flux: couplings do not form a closed loop");
  return wrap_phase(flux);
}

}  // namespace nrcm
