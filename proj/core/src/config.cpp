#include "nrcm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "nrcm/errors.hpp"
#include "nrcm/format.hpp"

namespace nrcm {

double to_rad_per_s(Units units) { return units == Units::hz ? kTwoPi : 1.0; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string at(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.line < 0) return "";
  return "line " + std::to_string(mark.line + 1) + ": ";
}

// Line prefix for a system check message ("coupling #i ..." or "... mode 'id' ...").
std::string locate(const std::string& msg, const SystemSpec& spec,
                   const std::vector<std::string>& mode_lines,
                   const std::vector<std::string>& coupling_lines) {
  constexpr std::string_view coupling = "coupling #";
  if (msg.starts_with(coupling)) {
    const auto i = std::stoul(msg.substr(coupling.size()));
    return i < coupling_lines.size() ? coupling_lines[i] : "";
  }
  for (std::size_t i = spec.modes.size(); i-- > 0;) {
    if (msg.find("mode '" + spec.modes[i].id + "'") != std::string::npos ||
        msg.find("mode id '" + spec.modes[i].id + "'") != std::string::npos)
      return mode_lines[i];
  }
  return "";
}

// Collects diagnostics instead of stopping at the first problem.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const YAML::Node& node, const std::string& msg) { errors.push_back(at(node) + msg); }

  void allow_keys(const YAML::Node& map, std::initializer_list<std::string_view> keys,
                  const std::string& where) {
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (auto k : keys) ok = ok || k == key;
      if (!ok) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  std::optional<double> number(const YAML::Node& map, const char* key) {
    const YAML::Node n = map[key];
    if (!n) return std::nullopt;
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) {
        fail(n, std::string("'") + key + "' must be finite");
        return std::nullopt;
      }
      return v;
    } catch (const YAML::Exception&) {
      fail(n, std::string("'") + key + "' must be a number");
      return std::nullopt;
    }
  }

  std::optional<std::string> text(const YAML::Node& map, const char* key) {
    const YAML::Node n = map[key];
    if (!n) return std::nullopt;
    if (!n.IsScalar()) {
      fail(n, std::string("'") + key + "' must be a string");
      return std::nullopt;
    }
    return n.as<std::string>();
  }

  std::optional<Interval> interval(const YAML::Node& map, const char* key, double scale) {
    const YAML::Node n = map[key];
    if (!n) return std::nullopt;
    if (!n.IsSequence() || n.size() != 2) {
      fail(n, std::string("'") + key + "' must be a [lower, upper] pair");
      return std::nullopt;
    }
    try {
      return Interval{n[0].as<double>() * scale, n[1].as<double>() * scale};
    } catch (const YAML::Exception&) {
      fail(n, std::string("'") + key + "' bounds must be numbers");
      return std::nullopt;
    }
  }
};

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ValidationError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

void check_schema(Reader& r, const YAML::Node& root, std::string_view expected) {
  const auto schema = r.text(root, "schema");
  if (!schema) {
    r.fail(root, "missing 'schema: " + std::string(expected) + "' header");
  } else if (*schema != expected) {
    r.fail(root["schema"], "unsupported schema '" + *schema + "', expected '" +
                               std::string(expected) + "'");
  }
}

}  // namespace

SystemConfig parse_system_config(const std::string& text) {
  const YAML::Node root = load_yaml(text);
  if (!root.IsMap()) throw ValidationError("system config must be a YAML mapping");

  Reader r;
  SystemConfig cfg;
  r.allow_keys(root, {"schema", "units", "modes", "couplings", "port_occupancy", "optimize", "design"},
               "system config");
  check_schema(r, root, kSystemSchema);

  if (auto u = r.text(root, "units")) {
    if (*u == "hz" || *u == "Hz") {
      cfg.units = Units::hz;
    } else if (*u == "rad/s") {
      cfg.units = Units::rad_per_s;
    } else {
      r.fail(root["units"], "units must be 'hz' or 'rad/s'");
    }
  }
  const double scale = to_rad_per_s(cfg.units);

  // Source line of each mode and coupling, for the semantic checks below.
  std::vector<std::string> mode_lines, coupling_lines;

  const YAML::Node modes = root["modes"];
  if (!modes || !modes.IsSequence()) {
    r.fail(root, "'modes' must be a list");
  } else {
    for (const auto& node : modes) {
      if (!node.IsMap()) {
        r.fail(node, "each mode must be a mapping");
        continue;
      }
      r.allow_keys(node, {"id", "kind", "detuning", "kappa_ex", "kappa_0", "gamma_m", "occupancy"},
                   "mode");
      Mode m;
      mode_lines.push_back(at(node));
      m.id = r.text(node, "id").value_or("");
      if (m.id.empty()) r.fail(node, "mode needs an 'id'");
      const auto kind = r.text(node, "kind").value_or("");
      if (kind == "electromagnetic") {
        m.kind = ModeKind::electromagnetic;
        if (node["gamma_m"]) r.fail(node["gamma_m"], "mode '" + m.id + "': gamma_m is for mechanical modes");
        m.external_rate = r.number(node, "kappa_ex").value_or(0.0) * scale;
        m.loss_rate = r.number(node, "kappa_0").value_or(0.0) * scale;
      } else if (kind == "mechanical") {
        m.kind = ModeKind::mechanical;
        if (node["kappa_ex"]) r.fail(node["kappa_ex"], "mode '" + m.id + "': mechanical modes have no kappa_ex");
        if (node["kappa_0"]) r.fail(node["kappa_0"], "mode '" + m.id + "': use gamma_m for mechanical damping");
        m.loss_rate = r.number(node, "gamma_m").value_or(0.0) * scale;
      } else {
        r.fail(node, "mode '" + m.id + "': kind must be 'electromagnetic' or 'mechanical'");
      }
      m.detuning = r.number(node, "detuning").value_or(0.0) * scale;
      m.occupancy = r.number(node, "occupancy").value_or(0.0);
      cfg.spec.modes.push_back(std::move(m));
    }
  }

  const YAML::Node couplings = root["couplings"];
  if (couplings && !couplings.IsSequence()) {
    r.fail(couplings, "'couplings' must be a list");
  } else if (couplings) {
    for (const auto& node : couplings) {
      if (!node.IsMap()) {
        r.fail(node, "each coupling must be a mapping");
        continue;
      }
      r.allow_keys(node, {"modes", "kind", "rate", "cooperativity", "phase", "g0", "n_c"}, "coupling");
      Coupling c;
      const YAML::Node ends = node["modes"];
      coupling_lines.push_back(at(node));
      if (!ends || !ends.IsSequence() || ends.size() != 2) {
        r.fail(node, "coupling needs 'modes: [first, second]'");
        continue;
      }
      c.first = ends[0].as<std::string>();
      c.second = ends[1].as<std::string>();
      const auto kind = r.text(node, "kind").value_or("");
      if (kind == "optomechanical") {
        c.kind = CouplingKind::optomechanical;
      } else if (kind == "coherent") {
        c.kind = CouplingKind::coherent;
      } else {
        r.fail(node, "coupling kind must be 'optomechanical' or 'coherent'");
      }
      c.phase = r.number(node, "phase").value_or(0.0);
      const auto rate = r.number(node, "rate");
      const auto coop = r.number(node, "cooperativity");
      const auto g0 = r.number(node, "g0");
      const auto nc = r.number(node, "n_c");
      if (g0 || nc) {
        if (!g0 || !nc) {
          r.fail(node, "g0 and n_c must be given together");
        } else {
          c.vacuum_rate = *g0 * scale;
          c.pump_photons = *nc;
        }
      }
      const int given = (rate ? 1 : 0) + (coop ? 1 : 0);
      if (given > 1) {
        r.fail(node, "give either 'rate' or 'cooperativity', not both");
      } else if (rate) {
        c.rate = *rate * scale;
      } else if (coop) {
        const Mode* a = nullptr;
        const Mode* b = nullptr;
        for (const auto& m : cfg.spec.modes) {
          if (m.id == c.first) a = &m;
          if (m.id == c.second) b = &m;
        }
        if (!a || !b) {
          r.fail(node, "cooperativity given for a coupling with unknown endpoints");
        } else if (*coop < 0.0) {
          r.fail(node["cooperativity"], "cooperativity must be non-negative");
        } else {
          c.rate = std::sqrt(*coop * a->total_decay() * b->total_decay() / 4.0);
        }
      } else if (c.vacuum_rate) {
        c.rate = enhanced_rate(*c.vacuum_rate, *c.pump_photons);
      } else {
        r.fail(node, "coupling needs 'rate', 'cooperativity' or g0 + n_c");
      }
      cfg.spec.couplings.push_back(std::move(c));
    }
  }

  if (const YAML::Node occ = root["port_occupancy"]) {
    if (!occ.IsMap()) {
      r.fail(occ, "'port_occupancy' must be a mapping of port label to occupancy");
    } else {
      for (const auto& kv : occ) {
        const auto label = kv.first.as<std::string>();
        if (auto v = r.number(occ, label.c_str())) cfg.port_occupancy[label] = *v;
      }
    }
  }

  if (const YAML::Node opt = root["optimize"]) {
    if (!opt.IsMap()) {
      r.fail(opt, "'optimize' must be a mapping");
    } else {
      r.allow_keys(opt, {"flux", "splitting", "cooperativity", "insertion_loss_budget_db",
                         "target_depth_db", "threshold_db"},
                   "optimize block");
      cfg.optimize.flux = r.interval(opt, "flux", 1.0);
      cfg.optimize.splitting = r.interval(opt, "splitting", scale);
      cfg.optimize.cooperativity = r.interval(opt, "cooperativity", 1.0);
      cfg.optimize.insertion_loss_budget_db = r.number(opt, "insertion_loss_budget_db");
      cfg.optimize.target_depth_db = r.number(opt, "target_depth_db");
      cfg.optimize.threshold_db = r.number(opt, "threshold_db");
    }
  }

  if (r.errors.empty() && mode_lines.size() == cfg.spec.modes.size() &&
      coupling_lines.size() == cfg.spec.couplings.size()) {
    for (auto& e : check(cfg.spec)) r.errors.push_back(locate(e, cfg.spec, mode_lines, coupling_lines) + e);
  }
  if (!r.errors.empty()) throw ValidationError(std::move(r.errors));
  return cfg;
}

SystemConfig load_system_config(const std::filesystem::path& path) {
  return parse_system_config(read_file(path));
}

std::string emit_system_config(const SystemSpec& spec, const BathOccupancies& port_occupancy,
                               const std::string& extra) {
  std::ostringstream out;
  out << "schema: " << kSystemSchema << "\n";
  out << "units: rad/s\n";
  out << "modes:\n";
  for (const Mode& m : spec.modes) {
    out << "  - id: " << m.id << "\n";
    out << "    kind: " << to_string(m.kind) << "\n";
    out << "    detuning: " << exact(m.detuning) << "\n";
    if (m.kind == ModeKind::electromagnetic) {
      out << "    kappa_ex: " << exact(m.external_rate) << "\n";
      out << "    kappa_0: " << exact(m.loss_rate) << "\n";
    } else {
      out << "    gamma_m: " << exact(m.loss_rate) << "\n";
    }
    out << "    occupancy: " << exact(m.occupancy) << "\n";
  }
  out << (spec.couplings.empty() ? "couplings: []\n" : "couplings:\n");
  for (const Coupling& c : spec.couplings) {
    out << "  - modes: [" << c.first << ", " << c.second << "]\n";
    out << "    kind: " << to_string(c.kind) << "\n";
    out << "    rate: " << exact(c.rate) << "\n";
    out << "    phase: " << exact(c.phase) << "\n";
    if (c.vacuum_rate) {
      out << "    g0: " << exact(*c.vacuum_rate) << "\n";
      out << "    n_c: " << exact(*c.pump_photons) << "\n";
    }
  }
  if (!port_occupancy.empty()) {
    out << "port_occupancy:\n";
    for (const auto& [label, v] : port_occupancy) out << "  " << label << ": " << exact(v) << "\n";
  }
  out << extra;
  return out.str();
}

NetlistConfig parse_netlist_config(const std::string& text) {
  const YAML::Node root = load_yaml(text);
  if (!root.IsMap()) throw ValidationError("netlist config must be a YAML mapping");

  Reader r;
  NetlistConfig cfg;
  r.allow_keys(root, {"schema", "components", "connections", "external", "terminate"}, "netlist config");
  check_schema(r, root, kNetlistSchema);

  const YAML::Node comps = root["components"];
  if (!comps || !comps.IsSequence()) {
    r.fail(root, "'components' must be a list");
  } else {
    for (const auto& node : comps) {
      r.allow_keys(node, {"name", "type", "s"}, "component");
      const auto name = r.text(node, "name").value_or("");
      const auto type = r.text(node, "type").value_or("");
      if (name.empty()) r.fail(node, "component needs a 'name'");
      if (type == "custom") {
        const YAML::Node s = node["s"];
        if (!s || !s.IsSequence() || s.size() == 0) {
          r.fail(node, "custom component '" + name + "' needs a square 's' matrix");
          continue;
        }
        const auto n = static_cast<Eigen::Index>(s.size());
        NetworkComponent c;
        c.name = name;
        c.s = CMatrix::Zero(n, n);
        bool ok = true;
        for (Eigen::Index i = 0; i < n && ok; ++i) {
          const YAML::Node row = s[static_cast<std::size_t>(i)];
          if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != n) {
            r.fail(row, "custom component '" + name + "': matrix is not square");
            ok = false;
            break;
          }
          for (Eigen::Index j = 0; j < n; ++j) {
            const YAML::Node e = row[static_cast<std::size_t>(j)];
            try {
              if (e.IsSequence() && e.size() == 2) {
                c.s(i, j) = Complex(e[0].as<double>(), e[1].as<double>());
              } else {
                c.s(i, j) = e.as<double>();
              }
            } catch (const YAML::Exception&) {
              r.fail(e, "custom component '" + name + "': entries must be numbers or [re, im]");
              ok = false;
              break;
            }
          }
        }
        for (Eigen::Index i = 1; i <= n; ++i) c.ports.push_back(std::to_string(i));
        if (ok) cfg.netlist.components.push_back(std::move(c));
      } else {
        try {
          cfg.netlist.components.push_back(ideal(type, name));
        } catch (const ValidationError& e) {
          r.fail(node, e.what());
        }
      }
    }
  }

  auto port_ref = [&](const YAML::Node& n) -> std::optional<PortRef> {
    try {
      return parse_port_ref(n.as<std::string>());
    } catch (const ValidationError& e) {
      r.fail(n, e.what());
    } catch (const YAML::Exception&) {
      r.fail(n, "port reference must be a string");
    }
    return std::nullopt;
  };

  if (const YAML::Node conns = root["connections"]) {
    for (const auto& pair : conns) {
      if (!pair.IsSequence() || pair.size() != 2) {
        r.fail(pair, "each connection must be a [port, port] pair");
        continue;
      }
      auto a = port_ref(pair[0]);
      auto b = port_ref(pair[1]);
      if (a && b) cfg.netlist.connections.emplace_back(*a, *b);
    }
  }

  const YAML::Node ext = root["external"];
  if (!ext || !ext.IsSequence()) {
    r.fail(root, "'external' must be a list of ports");
  } else {
    for (const auto& n : ext) {
      if (auto p = port_ref(n)) cfg.netlist.external.push_back(*p);
    }
  }

  if (const YAML::Node term = root["terminate"]) {
    for (const auto& n : term) {
      try {
        const long k = n.as<long>();
        if (k < 1 || static_cast<std::size_t>(k) > cfg.netlist.external.size()) {
          r.fail(n, "terminate position " + std::to_string(k) + " is out of range");
        } else {
          cfg.terminate.push_back(static_cast<std::size_t>(k - 1));
        }
      } catch (const YAML::Exception&) {
        r.fail(n, "terminate entries must be 1-based integers");
      }
    }
  }

  if (r.errors.empty()) {
    for (auto& e : check(cfg.netlist)) r.errors.push_back(std::move(e));
  }
  if (!r.errors.empty()) throw ValidationError(std::move(r.errors));
  return cfg;
}

NetlistConfig load_netlist_config(const std::filesystem::path& path) {
  return parse_netlist_config(read_file(path));
}

}  // namespace nrcm
