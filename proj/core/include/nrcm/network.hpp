#pragma once

// Ideal multiport components and their interconnection.
//
// Wave convention: b = S a, with a incoming and b outgoing at each port.
// Port labels are "1", "2", ... in the order of the S-matrix rows.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nrcm/linalg.hpp"

namespace nrcm {

struct NetworkComponent {
  std::string name;
  std::vector<std::string> ports;
  CMatrix s;

  std::size_t port_index(std::string_view label) const;
};

/// Canonical ideal elements: gyrator, transmission_line, beam_splitter,
/// matched_load, isolator, circulator4.
///
/// The beam splitter is a 4-port joining the pair (1, 2) to the pair (3, 4)
/// with straight-through amplitude 1/sqrt(2) (1->3, 2->4) and cross amplitude
/// i/sqrt(2) (1->4, 2->3).  With this phase convention the shipped circulator
/// netlist circulates 1 -> 2 -> 3 -> 4 -> 1; other conventions permute the
/// circulation direction.
NetworkComponent ideal(std::string_view type);
NetworkComponent ideal(std::string_view type, std::string instance_name);

/// Names accepted by ideal().
std::span<const std::string_view> ideal_types();

struct PortRef {
  std::string component;
  std::string port;

  std::string str() const { return component + "." + port; }
  bool operator==(const PortRef&) const = default;
};

/// Parses "component.port"; the port is the text after the last dot.
PortRef parse_port_ref(std::string_view text);

struct Netlist {
  std::vector<NetworkComponent> components;
  std::vector<std::pair<PortRef, PortRef>> connections;
  std::vector<PortRef> external;
};

/// Structural problems: unknown references, ports used twice, external ports
/// that are also connected, ports left dangling.
std::vector<std::string> check(const Netlist& netlist);

/// Reduced S-matrix over the external ports, in the order they are listed.
/// Internal waves are eliminated by solving the connection system exactly.
/// Throws ValidationError for a malformed netlist and SingularityError when
/// the internal system has no unique solution.
NetworkComponent connect(const Netlist& netlist, std::string name = "network");

/// Connects matched loads to `ports` (0-based) and reduces.  Remaining ports
/// keep their labels and order.
NetworkComponent terminate(const NetworkComponent& component, std::span<const std::size_t> ports);

/// Fig.-2a style four-port circulator: two beam splitters whose arms hold a
/// gyrator and a transmission line.  External ports in circulation order.
Netlist gyrator_circulator_netlist();

}  // namespace nrcm
