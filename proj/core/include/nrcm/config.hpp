#pragma once

// YAML configuration files.
//
// System files (schema "nrcm-system/1"):
//
//   schema: nrcm-system/1
//   units: hz                 # hz or rad/s; every rate and detuning below
//   modes:
//     - id: a1
//       kind: electromagnetic # or mechanical
//       detuning: 0           # Delta (electromagnetic) or Omega offset (mechanical)
//       kappa_ex: 200e3       # electromagnetic only
//       kappa_0: 0            # electromagnetic intrinsic loss
//       gamma_m: 100          # mechanical damping
//       occupancy: 0          # thermal occupancy of the intrinsic bath
//   couplings:
//     - modes: [a1, b1]       # ordered: first, second
//       kind: optomechanical  # or coherent
//       rate: 1.0e3           # or `cooperativity: 1.0`, or g0 + n_c
//       phase: 0              # radians
//   port_occupancy: {a1: 0}   # optional input occupancy per port label
//   optimize: {...}           # optional bounds for the four-mode synthesis
//   design: {...}             # written by the optimizer, ignored on load
//
// Netlist files (schema "nrcm-netlist/1"):
//
//   schema: nrcm-netlist/1
//   components:
//     - {name: bs1, type: beam_splitter}
//     - {name: x, type: custom, s: [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}
//   connections:
//     - [bs1.3, gyr.1]
//   external: [bs1.1, bs2.3, bs1.2, bs2.4]
//   terminate: [3, 4]         # optional, 1-based positions in `external`
//
// Errors are reported as ValidationError with "line N:" prefixes.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nrcm/design.hpp"
#include "nrcm/network.hpp"
#include "nrcm/noise.hpp"
#include "nrcm/system.hpp"

namespace nrcm {

inline constexpr std::string_view kSystemSchema = "nrcm-system/1";
inline constexpr std::string_view kNetlistSchema = "nrcm-netlist/1";

enum class Units { rad_per_s, hz };

/// Factor converting a value in `units` to rad/s.
double to_rad_per_s(Units units);

struct OptimizeSettings {
  std::optional<Interval> flux;
  std::optional<Interval> splitting;       // rad/s
  std::optional<Interval> cooperativity;
  std::optional<double> insertion_loss_budget_db;
  std::optional<double> target_depth_db;
  std::optional<double> threshold_db;
};

struct SystemConfig {
  SystemSpec spec;  // all values in rad/s
  Units units = Units::rad_per_s;
  BathOccupancies port_occupancy;
  OptimizeSettings optimize;
};

SystemConfig parse_system_config(const std::string& text);
SystemConfig load_system_config(const std::filesystem::path& path);

/// Writes a system file in rad/s with round-trip exact numbers.  `extra` is
/// appended verbatim (already formatted YAML, e.g. a design block).
std::string emit_system_config(const SystemSpec& spec, const BathOccupancies& port_occupancy = {},
                               const std::string& extra = {});

struct NetlistConfig {
  Netlist netlist;
  std::vector<std::size_t> terminate;  // 0-based external positions
};

NetlistConfig parse_netlist_config(const std::string& text);
NetlistConfig load_netlist_config(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace nrcm
