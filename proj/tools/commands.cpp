#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nrcm/config.hpp"
#include "nrcm/design.hpp"
#include "nrcm/dynamics.hpp"
#include "nrcm/errors.hpp"
#include "nrcm/format.hpp"
#include "nrcm/network.hpp"
#include "nrcm/noise.hpp"

namespace nrcm::cli {

unsigned worker_count() {
  if (const char* env = std::getenv("NRCM_WORKERS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::string cell(double v, int precision = 6) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -precision)) v = 0.0;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// The phase of a numerically-zero entry is noise.
double display_phase(Complex v) { return std::abs(v) < 1e-12 ? 0.0 : std::arg(v); }

std::string padded(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

std::string unit_label(Units u) { return u == Units::hz ? "hz" : "rad_s"; }

// Run manifest written next to the outputs.
struct Manifest {
  std::string subcommand;
  std::string config_path;
  std::string config_text;
  std::map<std::string, std::string> flags;
  std::vector<std::string> outputs;

  void write(const std::string& path) const {
    nlohmann::json j;
    j["tool"] = "nrcm";
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    j["config"] = config_path;
    j["config_hash"] = "fnv1a64:" + fnv1a_hex(config_text);
    j["flags"] = flags;
    j["outputs"] = outputs;
    std::ofstream f(path, std::ios::binary);
    f << j.dump(2) << '\n';
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
}

std::vector<std::size_t> select_ports(const std::vector<Port>& ports, std::size_t count,
                                      const std::string& flag) {
  std::vector<std::size_t> chosen;
  if (flag.empty()) {
    for (std::size_t i = 0; i < count; ++i) chosen.push_back(i);
    return chosen;
  }
  for (const auto& label : split_list(flag)) {
    auto it = std::find_if(ports.begin(), ports.end(), [&](const Port& p) { return p.label == label; });
    if (it == ports.end()) throw ValidationError("--ports: unknown port '" + label + "'");
    chosen.push_back(static_cast<std::size_t>(it - ports.begin()));
  }
  return chosen;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  double delta = 0.0;
  std::string ports;
  std::string out;
};

int simulate(const SimulateArgs& a, std::ostream& out) {
  const std::string text = read_file(a.config);
  const SystemConfig cfg = parse_system_config(text);
  const ValidatedSystem system = validate(cfg.spec);
  const double scale = to_rad_per_s(cfg.units);
  const ScatteringMatrix sm = scattering(system, a.delta * scale);
  const auto chosen = select_ports(sm.ports, sm.ports.size(), a.ports);

  out << "# S(delta) at delta = " << cell(a.delta) << " " << unit_label(cfg.units) << "\n";
  out << padded("out", 12) << padded("in", 12) << padded("|S|", 12) << padded("arg(S)", 12)
      << padded("re", 12) << "im\n";
  std::ostringstream csv;
  csv << "out,in,re,im,mag,phase\n";
  for (std::size_t o : chosen) {
    for (std::size_t i : chosen) {
      const Complex v = sm.s(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i));
      out << padded(sm.ports[o].label, 12) << padded(sm.ports[i].label, 12)
          << padded(cell(std::abs(v)), 12) << padded(cell(display_phase(v)), 12)
          << padded(cell(v.real()), 12) << cell(v.imag()) << "\n";
      csv << sm.ports[o].label << ',' << sm.ports[i].label << ',' << fixed12(v.real()) << ','
          << fixed12(v.imag()) << ',' << fixed12(std::abs(v)) << ',' << fixed12(std::arg(v)) << "\n";
    }
  }
  if (sm.residual > kResidualWarning) {
    out << "# warning: linear solve residual " << exact(sm.residual) << " exceeds "
        << exact(kResidualWarning) << "\n";
  }
  if (!a.out.empty()) {
    write_text(a.out, csv.str());
    Manifest m{"simulate", a.config, text,
               {{"delta", exact(a.delta)}, {"ports", a.ports}}, {a.out}};
    m.write(a.out + ".manifest.json");
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string config;
  double delta_min = 0.0;
  double delta_max = 0.0;
  std::size_t points = 1001;
  std::string ports;
  bool noise = false;
  double threshold_db = 20.0;
  std::string out = "sweep";
};

int sweep_cmd(const SweepArgs& a, std::ostream& out) {
  const std::string text = read_file(a.config);
  const SystemConfig cfg = parse_system_config(text);
  const ValidatedSystem system = validate(cfg.spec);
  const double scale = to_rad_per_s(cfg.units);

  const auto grid = uniform_grid(a.delta_min * scale, a.delta_max * scale, a.points);
  const ResponseCurve curve = sweep(system, grid, {worker_count()});
  const auto chosen = select_ports(curve.ports, curve.external_count, a.ports);

  std::vector<PortPair> pairs;
  for (std::size_t o : chosen)
    for (std::size_t i : chosen) pairs.emplace_back(o, i);

  const std::string delta_label = "delta_" + unit_label(cfg.units);
  Manifest manifest{"sweep", a.config, text,
                    {{"delta_min", exact(a.delta_min)},
                     {"delta_max", exact(a.delta_max)},
                     {"points", std::to_string(a.points)},
                     {"ports", a.ports},
                     {"noise", a.noise ? "true" : "false"},
                     {"threshold_db", exact(a.threshold_db)}},
                    {}};

  std::ostringstream csv;
  write_response_csv(csv, curve, pairs, scale, delta_label);
  const std::string response_path = a.out + ".csv";
  write_text(response_path, csv.str());
  manifest.outputs.push_back(response_path);
  out << "wrote " << response_path << " (" << curve.size() << " points, " << pairs.size()
      << " port pairs)\n";

  if (a.noise) {
    std::vector<NoiseSpectrum> spectra;
    for (std::size_t p : chosen) {
      if (curve.ports[p].kind != PortKind::external) continue;
      spectra.push_back(output_noise(curve, cfg.port_occupancy, curve.ports[p].label));
    }
    std::ostringstream ncsv;
    write_noise_csv(ncsv, spectra, scale, delta_label);
    const std::string noise_path = a.out + "_noise.csv";
    write_text(noise_path, ncsv.str());
    manifest.outputs.push_back(noise_path);
    out << "wrote " << noise_path << "\n";
  }

  if (curve.external_count >= 2 && a.delta_min <= 0.0 && a.delta_max >= 0.0) {
    const IsolationMetrics m = isolation_metrics(curve, a.threshold_db, {1, 0});
    out << "isolation " << curve.ports[1].label << "<-" << curve.ports[0].label
        << ": depth_db=" << (std::isinf(m.depth_db) ? std::string("inf") : cell(m.depth_db))
        << " insertion_loss_db=" << cell(m.insertion_loss_db)
        << " bandwidth_" << unit_label(cfg.units) << "=" << cell(m.bandwidth / scale)
        << " direction=" << m.direction << "\n";
  }
  if (curve.max_residual > kResidualWarning) {
    out << "# warning: max linear solve residual " << exact(curve.max_residual) << "\n";
  }
  manifest.write(a.out + ".manifest.json");
  return kSuccess;
}

// ---------------------------------------------------------------------------

struct OptimizeArgs {
  std::string config;
  std::string seed_grid = "24x12x5";
  std::optional<double> threshold_db;
  std::optional<double> target_db;
  std::optional<double> loss_budget_db;
  std::string out = "design.yaml";
};

std::string yaml_number(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  return exact(v);
}

int optimize(const OptimizeArgs& a, std::ostream& out) {
  const std::string text = read_file(a.config);
  const SystemConfig cfg = parse_system_config(text);
  const ValidatedSystem system = validate(cfg.spec);
  SchemeCProblem problem = scheme_c_problem(system);

  const auto& o = cfg.optimize;
  if (o.flux) problem.flux = *o.flux;
  if (o.splitting) problem.splitting = *o.splitting;
  if (o.cooperativity) problem.cooperativity = *o.cooperativity;
  if (o.insertion_loss_budget_db) problem.insertion_loss_budget_db = *o.insertion_loss_budget_db;
  if (o.target_depth_db) problem.target_depth_db = *o.target_depth_db;
  if (o.threshold_db) problem.threshold_db = *o.threshold_db;
  if (a.threshold_db) problem.threshold_db = *a.threshold_db;
  if (a.target_db) problem.target_depth_db = *a.target_db;
  if (a.loss_budget_db) problem.insertion_loss_budget_db = *a.loss_budget_db;

  std::vector<std::size_t> grid;
  {
    std::stringstream ss(a.seed_grid);
    std::string item;
    while (std::getline(ss, item, 'x')) {
      char* end = nullptr;
      const long n = std::strtol(item.c_str(), &end, 10);
      if (item.empty() || *end != '\0' || n < 1)
        throw ValidationError("--seed-grid must look like 24x12x5");
      grid.push_back(static_cast<std::size_t>(n));
    }
    if (grid.size() != 3) throw ValidationError("--seed-grid needs three counts: flux x splitting x cooperativity");
  }
  problem.flux_points = grid[0];
  problem.splitting_points = grid[1];
  problem.cooperativity_points = grid[2];
  problem.workers = worker_count();

  const DesignResult r = optimize_scheme_c(problem);
  const auto& p = r.parameters;

  std::ostringstream design;
  design << "design:\n";
  design << "  status: " << to_string(r.status) << "\n";
  design << "  message: \"" << r.message << "\"\n";
  design << "  converged: " << (r.converged ? "true" : "false") << "\n";
  design << "  evaluations: " << r.evaluations << "\n";
  design << "  objective: " << yaml_number(r.objective) << "\n";
  design << "  flux: " << yaml_number(p.flux) << "\n";
  design << "  splitting_rad_s: " << yaml_number(p.splitting) << "\n";
  design << "  cooperativity: " << yaml_number(p.cooperativity) << "\n";
  design << "  depth_db: " << yaml_number(r.metrics.depth_db) << "\n";
  design << "  insertion_loss_db: " << yaml_number(r.metrics.insertion_loss_db) << "\n";
  design << "  bandwidth_rad_s: " << yaml_number(r.metrics.bandwidth) << "\n";
  design << "  direction: " << r.metrics.direction << "\n";
  design << "  threshold_db: " << yaml_number(problem.threshold_db) << "\n";
  design << "  target_depth_db: " << yaml_number(problem.target_depth_db) << "\n";
  design << "  insertion_loss_budget_db: " << yaml_number(problem.insertion_loss_budget_db) << "\n";

  // Keep the user's mode ids so the report reads like the input file.
  SystemSpec spec = make_scheme_c(p);
  std::map<std::string, std::string> rename;
  {
    std::vector<std::string> em, mech;
    for (const Mode& m : system.modes())
      (m.kind == ModeKind::electromagnetic ? em : mech).push_back(m.id);
    rename = {{"a1", em[0]}, {"a2", em[1]}, {"b1", mech[0]}, {"b2", mech[1]}};
  }
  for (Mode& m : spec.modes) m.id = rename.at(m.id);
  for (Coupling& c : spec.couplings) {
    c.first = rename.at(c.first);
    c.second = rename.at(c.second);
  }
  write_text(a.out, emit_system_config(spec, cfg.port_occupancy, design.str()));

  Manifest manifest{"optimize", a.config, text,
                    {{"seed_grid", a.seed_grid},
                     {"threshold_db", exact(problem.threshold_db)},
                     {"target_db", exact(problem.target_depth_db)},
                     {"loss_budget_db", exact(problem.insertion_loss_budget_db)}},
                    {a.out}};
  manifest.write(a.out + ".manifest.json");

  out << "status: " << to_string(r.status) << " (" << r.message << ")\n";
  out << "flux: " << cell(p.flux) << " rad\n";
  out << "splitting: " << cell(p.splitting / to_rad_per_s(cfg.units)) << " " << unit_label(cfg.units) << "\n";
  out << "cooperativity: " << cell(p.cooperativity) << "\n";
  out << "depth_db: " << (std::isinf(r.metrics.depth_db) ? std::string("inf") : cell(r.metrics.depth_db)) << "\n";
  out << "insertion_loss_db: " << cell(r.metrics.insertion_loss_db) << "\n";
  out << "bandwidth: " << cell(r.metrics.bandwidth / to_rad_per_s(cfg.units)) << " "
      << unit_label(cfg.units) << " at " << cell(problem.threshold_db) << " dB\n";
  out << "wrote " << a.out << "\n";
  return r.status == DesignStatus::target_met ? kSuccess : kNotConverged;
}

// ---------------------------------------------------------------------------

struct ComposeArgs {
  std::string config;
  std::string terminate;
  std::string out;
};

int compose(const ComposeArgs& a, std::ostream& out) {
  const std::string text = read_file(a.config);
  NetlistConfig cfg = parse_netlist_config(text);
  if (!a.terminate.empty()) {
    cfg.terminate.clear();
    for (const auto& item : split_list(a.terminate)) {
      char* end = nullptr;
      const long k = std::strtol(item.c_str(), &end, 10);
      if (*end != '\0' || k < 1 || static_cast<std::size_t>(k) > cfg.netlist.external.size())
        throw ValidationError("--terminate: bad port position '" + item + "'");
      cfg.terminate.push_back(static_cast<std::size_t>(k - 1));
    }
  }
  NetworkComponent reduced = connect(cfg.netlist);
  if (!cfg.terminate.empty()) reduced = terminate(reduced, cfg.terminate);

  const auto n = static_cast<std::size_t>(reduced.s.rows());
  out << "# |S| over external ports:";
  for (const auto& label : reduced.ports) out << ' ' << label;
  out << "\n";
  for (std::size_t o = 0; o < n; ++o) {
    for (std::size_t i = 0; i < n; ++i) {
      out << (i ? " " : "")
          << cell(std::abs(reduced.s(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i))));
    }
    out << "\n";
  }
  if (!a.out.empty()) {
    std::ostringstream csv;
    csv << "out,in,re,im,mag,phase\n";
    for (std::size_t o = 0; o < n; ++o)
      for (std::size_t i = 0; i < n; ++i) {
        const Complex v = reduced.s(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i));
        csv << reduced.ports[o] << ',' << reduced.ports[i] << ',' << fixed12(v.real()) << ','
            << fixed12(v.imag()) << ',' << fixed12(std::abs(v)) << ',' << fixed12(std::arg(v)) << "\n";
      }
    write_text(a.out, csv.str());
    Manifest m{"compose", a.config, text, {{"terminate", a.terminate}}, {a.out}};
    m.write(a.out + ".manifest.json");
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nrcm: nonreciprocal coupled-mode network toolkit", "nrcm"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "print the labeled S-matrix at one detuning");
  s->add_option("--config", sim.config, "system config file")->required();
  s->add_option("--delta", sim.delta, "probe detuning (config units)");
  s->add_option("--ports", sim.ports, "comma-separated port labels to print");
  s->add_option("--out", sim.out, "also write the table as CSV");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "scattering (and noise) spectra on a uniform grid");
  w->add_option("--config", sw.config, "system config file")->required();
  w->add_option("--delta-min", sw.delta_min, "lower detuning (config units)")->required();
  w->add_option("--delta-max", sw.delta_max, "upper detuning (config units)")->required();
  w->add_option("--points", sw.points, "number of grid points (>= 2)");
  w->add_option("--ports", sw.ports, "comma-separated port labels (default: external ports)");
  w->add_flag("--noise", sw.noise, "also write output noise spectra");
  w->add_option("--threshold-db", sw.threshold_db, "isolation threshold for the bandwidth");
  w->add_option("--out", sw.out, "output prefix");

  OptimizeArgs opt;
  auto* o = app.add_subcommand("optimize", "synthesize a four-mode isolator");
  o->add_option("--config", opt.config, "four-mode system config file")->required();
  o->add_option("--seed-grid", opt.seed_grid, "seed grid flux x splitting x cooperativity");
  o->add_option("--threshold-db", opt.threshold_db, "isolation threshold for the bandwidth");
  o->add_option("--target-db", opt.target_db, "required isolation depth");
  o->add_option("--loss-budget-db", opt.loss_budget_db, "allowed insertion loss");
  o->add_option("--out", opt.out, "report file");

  ComposeArgs comp;
  auto* c = app.add_subcommand("compose", "reduce a netlist of ideal components");
  c->add_option("--config", comp.config, "netlist config file")->required();
  c->add_option("--terminate", comp.terminate, "1-based external positions to terminate");
  c->add_option("--out", comp.out, "write the reduced S-matrix as CSV");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    if (s->parsed()) return simulate(sim, out);
    if (w->parsed()) return sweep_cmd(sw, out);
    if (o->parsed()) return optimize(opt, out);
    if (c->parsed()) return compose(comp, out);
  } catch (const ValidationError& e) {
    err << "error: invalid input\n";
    for (const auto& v : e.violations()) err << "  " << v << "\n";
    return kValidationError;
  } catch (const SingularityError& e) {
    err << "error: " << e.what() << "\n";
    return kSingular;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return kValidationError;
}

}  // namespace nrcm::cli
