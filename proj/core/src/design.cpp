#include "nrcm/design.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <set>
#include <thread>

#include "nrcm/errors.hpp"
#include "nrcm/format.hpp"
#include "nrcm/simplex.hpp"

namespace nrcm {

// ---------------------------------------------------------------------------
// Adiabatic elimination

EffectiveSystem adiabatic_eliminate(const ValidatedSystem& system, double evaluation_detuning) {
  std::vector<std::size_t> em, mech;
  for (std::size_t j = 0; j < system.size(); ++j) {
    (system.mode(j).kind == ModeKind::electromagnetic ? em : mech).push_back(j);
  }
  if (em.empty()) throw ValidationError("adiabatic elimination needs electromagnetic modes");

  double max_rate = 0.0;
  for (std::size_t j : em) max_rate = std::max(max_rate, system.mode(j).total_decay());
  for (const Coupling& c : system.couplings()) {
    if (c.kind == CouplingKind::optomechanical) max_rate = std::max(max_rate, c.rate);
  }

  double min_gamma = std::numeric_limits<double>::infinity();
  for (std::size_t m : mech) {
    std::set<std::size_t> partners;
    for (std::size_t c = 0; c < system.links().size(); ++c) {
      const auto& l = system.links()[c];
      if (l.first == m && system.mode(l.second).kind == ModeKind::electromagnetic) partners.insert(l.second);
      if (l.second == m && system.mode(l.first).kind == ModeKind::electromagnetic) partners.insert(l.first);
    }
    if (partners.size() < 2)
      throw ValidationError("mechanical mode '" + system.mode(m).id +
                            "' couples to fewer than two electromagnetic modes");
    min_gamma = std::min(min_gamma, system.mode(m).total_decay());
  }

  const DynamicalMatrix full = build_dynamics(system);
  auto pick = [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    CMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            full.drift(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
  };

  EffectiveSystem eff;
  eff.retained = em;
  eff.evaluation_detuning = evaluation_detuning;
  eff.validity_ratio = mech.empty() ? std::numeric_limits<double>::infinity()
                                    : min_gamma / std::max(max_rate, 1e-300);

  CMatrix drift = pick(em, em);
  if (!mech.empty()) {
    const auto nm = static_cast<Eigen::Index>(mech.size());
    const CMatrix response =
        pick(mech, mech) - Complex(0.0, evaluation_detuning) * CMatrix::Identity(nm, nm);
    Eigen::PartialPivLU<CMatrix> lu(response);
    if (!(lu.rcond() > 1e-14))
      throw SingularityError("mechanical response singular at evaluation detuning " +
                                 exact(evaluation_detuning),
                             evaluation_detuning);
    drift -= pick(em, mech) * lu.solve(pick(mech, em));
  }
  eff.dynamics.drift = drift;

  // Keep only ports attached to retained modes.
  std::vector<Port> ports;
  for (const Port& p : full.ports) {
    auto it = std::find(em.begin(), em.end(), p.mode);
    if (it == em.end()) continue;
    Port q = p;
    q.mode = static_cast<std::size_t>(it - em.begin());
    if (q.kind == PortKind::external) ++eff.dynamics.external_count;
    ports.push_back(q);
  }
  eff.dynamics.ports = ports;
  eff.dynamics.input = RMatrix::Zero(static_cast<Eigen::Index>(em.size()),
                                     static_cast<Eigen::Index>(ports.size()));
  for (std::size_t p = 0; p < ports.size(); ++p)
    eff.dynamics.input(static_cast<Eigen::Index>(ports[p].mode), static_cast<Eigen::Index>(p)) =
        std::sqrt(ports[p].rate);

  if (em.size() >= 2) {
    const CMatrix herm = (drift - drift.adjoint()) / Complex(0.0, 2.0);
    const CMatrix anti = (drift + drift.adjoint()) / 2.0;
    eff.coherent = herm(1, 0);
    eff.dissipative = anti(1, 0);
  }
  return eff;
}

ScatteringMatrix scattering(const EffectiveSystem& effective, double delta) {
  return scattering(effective.dynamics, delta);
}

// ---------------------------------------------------------------------------
// Reference topologies

namespace {

double link_rate(double cooperativity, double decay_a, double decay_b) {
  return std::sqrt(cooperativity * decay_a * decay_b / 4.0);
}

Mode cavity(std::string id, double kappa_ex, double loss = 0.0) {
  Mode m;
  m.id = std::move(id);
  m.kind = ModeKind::electromagnetic;
  m.external_rate = kappa_ex;
  m.loss_rate = loss;
  return m;
}

Mode resonator(std::string id, double gamma, double offset = 0.0, double occupancy = 0.0) {
  Mode m;
  m.id = std::move(id);
  m.kind = ModeKind::mechanical;
  m.loss_rate = gamma;
  m.detuning = offset;
  m.occupancy = occupancy;
  return m;
}

Coupling link(std::string a, std::string b, CouplingKind kind, double rate, double phase) {
  Coupling c;
  c.first = std::move(a);
  c.second = std::move(b);
  c.kind = kind;
  c.rate = rate;
  c.phase = phase;
  return c;
}

}  // namespace

SystemSpec make_converter(const ConverterParams& p) {
  SystemSpec s;
  s.modes = {cavity("a1", p.kappa1), cavity("a2", p.kappa2), resonator("b", p.gamma_m)};
  s.couplings = {
      link("a1", "b", CouplingKind::optomechanical, link_rate(p.c1, p.kappa1, p.gamma_m), p.phi1),
      link("a2", "b", CouplingKind::optomechanical, link_rate(p.c2, p.kappa2, p.gamma_m), p.phi2),
  };
  return s;
}

SystemSpec make_scheme_b(const SchemeBParams& p) {
  SystemSpec s = make_converter({p.kappa1, p.kappa2, p.gamma_m, p.c1, p.c2, 0.0, 0.0});
  // flux = phi1 - phi2 - theta with both pump phases at zero.
  s.couplings.push_back(link("a1", "a2", CouplingKind::coherent,
                             link_rate(p.c_coh, p.kappa1, p.kappa2), -p.flux));
  return s;
}

SystemSpec make_scheme_c(const SchemeCParams& p) {
  SystemSpec s;
  const double k1 = p.kappa1 + p.loss1, k2 = p.kappa2 + p.loss2;
  s.modes = {cavity("a1", p.kappa1, p.loss1), cavity("a2", p.kappa2, p.loss2),
             resonator("b1", p.gamma1, p.splitting / 2.0, p.mechanical_occupancy),
             resonator("b2", p.gamma2, -p.splitting / 2.0, p.mechanical_occupancy)};
  const double c = p.cooperativity;
  s.couplings = {
      link("a1", "b1", CouplingKind::optomechanical, link_rate(c, k1, p.gamma1), p.flux),
      link("a2", "b1", CouplingKind::optomechanical, link_rate(c, k2, p.gamma1), 0.0),
      link("a2", "b2", CouplingKind::optomechanical, link_rate(c, k2, p.gamma2), 0.0),
      link("a1", "b2", CouplingKind::optomechanical, link_rate(c, k1, p.gamma2), 0.0),
  };
  return s;
}

namespace {

struct Topology {
  std::vector<std::size_t> em;
  std::vector<std::size_t> mech;
};

Topology topology(const ValidatedSystem& system) {
  Topology t;
  for (std::size_t j = 0; j < system.size(); ++j)
    (system.mode(j).kind == ModeKind::electromagnetic ? t.em : t.mech).push_back(j);
  return t;
}

// Index of the unique coupling joining modes a and b.
std::size_t link_between(const ValidatedSystem& system, std::size_t a, std::size_t b) {
  std::optional<std::size_t> found;
  for (std::size_t c = 0; c < system.links().size(); ++c) {
    const auto& l = system.links()[c];
    if ((l.first == a && l.second == b) || (l.first == b && l.second == a)) {
      if (found) throw ValidationError("more than one coupling joins '" + system.mode(a).id +
                                       "' and '" + system.mode(b).id + "'");
      found = c;
    }
  }
  if (!found) throw ValidationError("no coupling joins '" + system.mode(a).id + "' and '" +
                                    system.mode(b).id + "'");
  return *found;
}

// Phase picked up walking coupling c away from mode `from`.
double walk(const ValidatedSystem& system, std::size_t c, std::size_t from) {
  const double phase = system.couplings()[c].phase;
  return system.links()[c].first == from ? phase : -phase;
}

}  // namespace

double scheme_flux(const ValidatedSystem& system) {
  const Topology t = topology(system);
  if (t.em.size() != 2)
    throw ValidationError("reference topologies have exactly two electromagnetic modes");
  const std::size_t a1 = t.em[0], a2 = t.em[1];
  if (t.mech.size() == 1) {
    const std::size_t b = t.mech[0];
    const std::size_t c1 = link_between(system, a1, b);
    const std::size_t c2 = link_between(system, a2, b);
    const std::size_t cc = link_between(system, a1, a2);
    return wrap_phase(walk(system, c1, a1) + walk(system, c2, b) + walk(system, cc, a2));
  }
  if (t.mech.size() == 2) {
    const std::size_t b1 = t.mech[0], b2 = t.mech[1];
    return wrap_phase(walk(system, link_between(system, a1, b1), a1) +
                      walk(system, link_between(system, a2, b1), b1) +
                      walk(system, link_between(system, a2, b2), a2) +
                      walk(system, link_between(system, a1, b2), b2));
  }
  throw ValidationError("reference topologies have one or two mechanical modes");
}

SchemeBCondition scheme_b_condition(double c1, double c2, bool reverse) {
  if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw ValidationError("cooperativities must be non-negative");
  return {c1 * c2, reverse ? -kPi / 2.0 : kPi / 2.0};
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

IsolationMetrics metrics_from(double s21, double s12) {
  IsolationMetrics m;
  if (s21 == s12) {
    m.direction = 0;
    m.depth_db = 0.0;
    m.insertion_loss_db = s21 > 0.0 ? -20.0 * std::log10(s21) : kInfiniteDepth;
    return m;
  }
  m.direction = s21 > s12 ? 1 : -1;
  const double pass = std::max(s21, s12), block = std::min(s21, s12);
  m.depth_db = block == 0.0 ? kInfiniteDepth : 20.0 * std::log10(pass / block);
  m.insertion_loss_db = -20.0 * std::log10(pass);
  return m;
}

double isolation_db(double pass, double block) {
  if (pass == block) return 0.0;
  if (block == 0.0) return kInfiniteDepth;
  if (pass == 0.0) return -kInfiniteDepth;
  return 20.0 * std::log10(pass / block);
}

}  // namespace

IsolationMetrics center_metrics(const CMatrix& s, PortPair forward) {
  const auto [o, i] = forward;
  return metrics_from(std::abs(s(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i))),
                      std::abs(s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o))));
}

IsolationMetrics isolation_metrics(const ResponseCurve& curve, double threshold_db, PortPair forward) {
  const auto [o, i] = forward;
  if (o >= curve.ports.size() || i >= curve.ports.size() || o == i)
    throw ValidationError("isolation metrics need two distinct ports of the curve");
  const auto& g = curve.grid;
  if (g.empty() || g.front() > 0.0 || g.back() < 0.0)
    throw ValidationError("isolation metrics need a grid spanning delta = 0");
  const auto fwd = curve.magnitude(o, i);
  const auto bwd = curve.magnitude(i, o);

  const double span = g.back() - g.front();
  double c21 = 0.0, c12 = 0.0;
  const auto upper = std::lower_bound(g.begin(), g.end(), 0.0);
  const auto k = static_cast<std::size_t>(upper - g.begin());
  if (std::abs(g[k]) <= 1e-12 * span) {
    c21 = fwd[k];
    c12 = bwd[k];
  } else if (k > 0 && std::abs(g[k - 1]) <= 1e-12 * span) {
    c21 = fwd[k - 1];
    c12 = bwd[k - 1];
  } else {
    const double t = (0.0 - g[k - 1]) / (g[k] - g[k - 1]);
    c21 = fwd[k - 1] + t * (fwd[k] - fwd[k - 1]);
    c12 = bwd[k - 1] + t * (bwd[k] - bwd[k - 1]);
  }
  IsolationMetrics m = metrics_from(c21, c12);

  const int dir = m.direction >= 0 ? 1 : -1;
  std::vector<double> iso(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    iso[n] = dir > 0 ? isolation_db(fwd[n], bwd[n]) : isolation_db(bwd[n], fwd[n]);
  }
  double measure = 0.0;
  for (std::size_t n = 0; n + 1 < g.size(); ++n) {
    const double len = g[n + 1] - g[n];
    const bool a = iso[n] >= threshold_db, b = iso[n + 1] >= threshold_db;
    if (a && b) {
      measure += len;
    } else if (a != b) {
      if (std::isfinite(iso[n]) && std::isfinite(iso[n + 1])) {
        const double t = (threshold_db - iso[n]) / (iso[n + 1] - iso[n]);
        measure += a ? t * len : (1.0 - t) * len;
      } else {
        measure += 0.5 * len;
      }
    }
  }
  m.bandwidth = m.direction == 0 && measure == 0.0 ? 0.0 : measure;
  return m;
}

// ---------------------------------------------------------------------------
// Four-mode synthesis

std::string_view to_string(DesignStatus status) {
  switch (status) {
    case DesignStatus::target_met:
      return "target_met";
    case DesignStatus::below_target:
      return "below_target";
    case DesignStatus::not_converged:
      return "not_converged";
  }
  return "unknown";
}

SchemeCProblem scheme_c_problem(const ValidatedSystem& system) {
  const Topology t = topology(system);
  if (t.em.size() != 2 || t.mech.size() != 2 || system.couplings().size() != 4)
    throw ValidationError("four-mode synthesis needs 2 electromagnetic modes, 2 mechanical modes "
                          "and 4 optomechanical couplings");
  for (const Coupling& c : system.couplings()) {
    if (c.kind != CouplingKind::optomechanical)
      throw ValidationError("four-mode synthesis does not allow coherent couplings");
  }
  for (std::size_t a : t.em)
    for (std::size_t b : t.mech) link_between(system, a, b);

  SchemeCProblem p;
  const Mode& a1 = system.mode(t.em[0]);
  const Mode& a2 = system.mode(t.em[1]);
  const Mode& b1 = system.mode(t.mech[0]);
  const Mode& b2 = system.mode(t.mech[1]);
  p.kappa1 = a1.external_rate;
  p.kappa2 = a2.external_rate;
  p.loss1 = a1.loss_rate;
  p.loss2 = a2.loss_rate;
  p.gamma1 = b1.loss_rate;
  p.gamma2 = b2.loss_rate;
  p.mechanical_occupancy = std::max(b1.occupancy, b2.occupancy);
  if (!(p.kappa1 > 0.0) || !(p.kappa2 > 0.0))
    throw ValidationError("four-mode synthesis needs an external port on both cavities");
  const double gamma = std::max(p.gamma1, p.gamma2);
  p.splitting = {0.0, 10.0 * gamma};
  return p;
}

namespace {

void check_interval(const Interval& i, const char* name, std::vector<std::string>& errors) {
  if (!std::isfinite(i.lo) || !std::isfinite(i.hi)) {
    errors.push_back(std::string(name) + " bounds must be finite");
  } else if (i.lo > i.hi) {
    errors.push_back(std::string(name) + " bounds are infeasible (lower " + exact(i.lo) +
                     " > upper " + exact(i.hi) + ")");
  }
}

std::vector<double> seeds(double lo, double hi, std::size_t n) {
  if (hi == lo || n <= 1) return {hi == lo ? lo : 0.5 * (lo + hi)};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(n);
  return v;
}

SchemeCParams params_at(const SchemeCProblem& p, const std::vector<double>& x, double gamma_scale) {
  SchemeCParams q;
  q.kappa1 = p.kappa1;
  q.kappa2 = p.kappa2;
  q.loss1 = p.loss1;
  q.loss2 = p.loss2;
  q.gamma1 = p.gamma1;
  q.gamma2 = p.gamma2;
  q.mechanical_occupancy = p.mechanical_occupancy;
  q.flux = x[0];
  q.splitting = x[1] * gamma_scale;
  q.cooperativity = std::exp(x[2]);
  return q;
}

}  // namespace

IsolationMetrics verify_scheme_c(const SchemeCParams& params, double threshold_db,
                                 std::size_t points, const SweepOptions& options) {
  const ValidatedSystem system = validate(make_scheme_c(params));
  const double gamma = std::max(params.gamma1, params.gamma2);
  const double half = 3.0 * (params.splitting / 2.0 + gamma * (1.0 + 2.0 * params.cooperativity));
  if (points % 2 == 0) ++points;  // keep delta = 0 on the grid
  const ResponseCurve curve = sweep(system, -half, half, std::max<std::size_t>(points, 3), options);
  return isolation_metrics(curve, threshold_db, {1, 0});
}

DesignResult optimize_scheme_c(const SchemeCProblem& p) {
  std::vector<std::string> errors;
  check_interval(p.flux, "flux", errors);
  check_interval(p.splitting, "splitting", errors);
  check_interval(p.cooperativity, "cooperativity", errors);
  if (p.splitting.lo < 0.0) errors.emplace_back("splitting bounds must be non-negative");
  if (!(p.cooperativity.lo > 0.0)) errors.emplace_back("cooperativity bounds must be positive");
  if (!(p.kappa1 > 0.0) || !(p.kappa2 > 0.0) || !(p.gamma1 > 0.0) || !(p.gamma2 > 0.0))
    errors.emplace_back("all fixed decay rates must be positive");
  if (p.flux_points == 0 || p.splitting_points == 0 || p.cooperativity_points == 0)
    errors.emplace_back("seed grid must have at least one point per axis");
  if (!errors.empty()) throw ValidationError(std::move(errors));

  const double gamma_scale = 0.5 * (p.gamma1 + p.gamma2);
  const std::vector<double> lower = {p.flux.lo, p.splitting.lo / gamma_scale,
                                     std::log(p.cooperativity.lo)};
  const std::vector<double> upper = {p.flux.hi, p.splitting.hi / gamma_scale,
                                     std::log(p.cooperativity.hi)};

  auto objective = [&](const std::vector<double>& x) {
    const ValidatedSystem sys = validate(make_scheme_c(params_at(p, x, gamma_scale)));
    const CMatrix s = scattering(sys, 0.0).s;
    const double fwd = std::norm(s(1, 0)), bwd = std::norm(s(0, 1));
    const double loss_db = -10.0 * std::log10(fwd + 1e-300);
    const double excess = std::max(0.0, loss_db - p.insertion_loss_budget_db);
    return bwd / (fwd + 1e-300) + excess * excess;
  };

  struct Seed {
    std::vector<double> x;
    double f;
  };
  std::vector<Seed> grid;
  for (double f : seeds(lower[0], upper[0], p.flux_points))
    for (double s : seeds(lower[1], upper[1], p.splitting_points))
      for (double c : seeds(lower[2], upper[2], p.cooperativity_points))
        grid.push_back({{f, s, c}, 0.0});

  // Seeds are independent; each worker fills a fixed stride of slots.
  {
    const unsigned workers =
        static_cast<unsigned>(std::clamp<std::size_t>(p.workers, 1, grid.size()));
    std::vector<std::exception_ptr> failures(workers);
    auto fill = [&](unsigned w) {
      try {
        for (std::size_t n = w; n < grid.size(); n += workers) grid[n].f = objective(grid[n].x);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(fill, w);
    fill(0);
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
  }
  std::stable_sort(grid.begin(), grid.end(), [](const Seed& a, const Seed& b) { return a.f < b.f; });

  std::vector<double> step(3);
  const std::size_t counts[3] = {p.flux_points, p.splitting_points, p.cooperativity_points};
  for (std::size_t d = 0; d < 3; ++d) step[d] = (upper[d] - lower[d]) / static_cast<double>(counts[d]);

  SimplexOptions opts;
  opts.f_tolerance = std::min(p.tolerance, std::pow(10.0, -(p.target_depth_db + 20.0) / 10.0));
  opts.max_evaluations = p.max_evaluations;

  DesignResult result;
  result.evaluations = grid.size();
  std::optional<SimplexResult> best;
  const std::size_t runs = std::min(std::max<std::size_t>(p.refinements, 1), grid.size());
  for (std::size_t r = 0; r < runs; ++r) {
    SimplexResult run = nelder_mead(objective, grid[r].x, step, lower, upper, opts);
    result.evaluations += run.evaluations;
    if (!best || run.f < best->f) best = std::move(run);
  }

  result.parameters = params_at(p, best->x, gamma_scale);
  result.parameters.flux = wrap_phase(result.parameters.flux);
  result.objective = best->f;
  result.converged = best->converged;
  result.metrics =
      verify_scheme_c(result.parameters, p.threshold_db, p.verification_points, {p.workers});

  const bool deep = result.metrics.direction > 0 && result.metrics.depth_db >= p.target_depth_db;
  const bool low_loss = result.metrics.insertion_loss_db <= p.insertion_loss_budget_db;
  if (deep && low_loss) {
    result.status = DesignStatus::target_met;
    result.message = result.converged ? "isolation target met"
                                      : "isolation target met before the simplex converged";
  } else if (!result.converged) {
    result.status = DesignStatus::not_converged;
    result.message = "simplex refinement hit the evaluation limit below the target";
  } else {
    result.status = DesignStatus::below_target;
    result.message = "no isolating configuration found above " + exact(p.target_depth_db) +
                     " dB within the insertion-loss budget";
  }
  return result;
}

}  // namespace nrcm
