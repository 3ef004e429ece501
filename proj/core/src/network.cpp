#include "nrcm/network.hpp"

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "nrcm/errors.hpp"
#include "nrcm/format.hpp"

namespace nrcm {

namespace {

constexpr std::array<std::string_view, 6> kIdealTypes = {
    "gyrator", "transmission_line", "beam_splitter", "matched_load", "isolator", "circulator4"};

std::vector<std::string> numbered_ports(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

}  // namespace

std::span<const std::string_view> ideal_types() { return kIdealTypes; }

std::size_t NetworkComponent::port_index(std::string_view label) const {
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (ports[i] == label) return i;
  }
  throw ValidationError("component '" + name + "' has no port '" + std::string(label) + "'");
}

NetworkComponent ideal(std::string_view type, std::string instance_name) {
  NetworkComponent c;
  c.name = std::move(instance_name);
  if (type == "gyrator") {
    c.s = CMatrix::Zero(2, 2);
    c.s(0, 1) = 1.0;
    c.s(1, 0) = -1.0;
  } else if (type == "transmission_line") {
    c.s = CMatrix::Zero(2, 2);
    c.s(0, 1) = 1.0;
    c.s(1, 0) = 1.0;
  } else if (type == "beam_splitter") {
    const double t = 1.0 / std::sqrt(2.0);
    const Complex x(0.0, t);
    c.s = CMatrix::Zero(4, 4);
    c.s(2, 0) = c.s(0, 2) = t;
    c.s(3, 1) = c.s(1, 3) = t;
    c.s(3, 0) = c.s(0, 3) = x;
    c.s(2, 1) = c.s(1, 2) = x;
  } else if (type == "matched_load") {
    c.s = CMatrix::Zero(1, 1);
  } else if (type == "isolator") {
    c.s = CMatrix::Zero(2, 2);
    c.s(1, 0) = 1.0;
  } else if (type == "circulator4") {
    c.s = CMatrix::Zero(4, 4);
    c.s(1, 0) = c.s(2, 1) = c.s(3, 2) = c.s(0, 3) = 1.0;
  } else {
    throw ValidationError("unknown component type '" + std::string(type) + "'");
  }
  c.ports = numbered_ports(static_cast<std::size_t>(c.s.rows()));
  return c;
}

NetworkComponent ideal(std::string_view type) { return ideal(type, std::string(type)); }

PortRef parse_port_ref(std::string_view text) {
  const auto dot = text.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size())
    throw ValidationError("port reference '" + std::string(text) + "' is not of the form name.port");
  return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

namespace {

struct Layout {
  std::map<std::string, std::size_t, std::less<>> component_index;
  std::vector<std::size_t> offset;  // first global port of each component
  std::size_t total = 0;
};

Layout layout_of(const Netlist& net, std::vector<std::string>& errors) {
  Layout l;
  for (std::size_t c = 0; c < net.components.size(); ++c) {
    const auto& comp = net.components[c];
    if (!l.component_index.emplace(comp.name, c).second)
      errors.push_back("duplicate component name '" + comp.name + "'");
    if (comp.s.rows() != comp.s.cols() ||
        static_cast<std::size_t>(comp.s.rows()) != comp.ports.size())
      errors.push_back("component '" + comp.name + "' has an S-matrix inconsistent with its ports");
    l.offset.push_back(l.total);
    l.total += comp.ports.size();
  }
  return l;
}

// Global port index or nullopt with an error recorded.
std::optional<std::size_t> resolve(const Netlist& net, const Layout& l, const PortRef& ref,
                                   std::vector<std::string>& errors) {
  auto it = l.component_index.find(ref.component);
  if (it == l.component_index.end()) {
    errors.push_back("port " + ref.str() + ": unknown component '" + ref.component + "'");
    return std::nullopt;
  }
  const auto& comp = net.components[it->second];
  for (std::size_t p = 0; p < comp.ports.size(); ++p) {
    if (comp.ports[p] == ref.port) return l.offset[it->second] + p;
  }
  errors.push_back("port " + ref.str() + ": component has no such port");
  return std::nullopt;
}

struct Resolved {
  Layout layout;
  std::vector<std::size_t> external;
  std::vector<std::size_t> partner;  // connected partner, or npos
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

Resolved resolve_all(const Netlist& net, std::vector<std::string>& errors) {
  Resolved r;
  r.layout = layout_of(net, errors);
  r.partner.assign(r.layout.total, npos);
  std::vector<std::string> label(r.layout.total);
  for (std::size_t c = 0; c < net.components.size(); ++c) {
    for (std::size_t p = 0; p < net.components[c].ports.size(); ++p)
      label[r.layout.offset[c] + p] = net.components[c].name + "." + net.components[c].ports[p];
  }
  std::vector<int> uses(r.layout.total, 0);

  for (const auto& [a, b] : net.connections) {
    auto ga = resolve(net, r.layout, a, errors);
    auto gb = resolve(net, r.layout, b, errors);
    if (!ga || !gb) continue;
    if (*ga == *gb) {
      errors.push_back("port " + a.str() + " is connected to itself");
      continue;
    }
    for (std::size_t g : {*ga, *gb}) {
      if (++uses[g] == 2) errors.push_back("port " + label[g] + " appears in more than one connection");
    }
    r.partner[*ga] = *gb;
    r.partner[*gb] = *ga;
  }
  std::set<std::size_t> ext_seen;
  for (const auto& e : net.external) {
    auto g = resolve(net, r.layout, e, errors);
    if (!g) continue;
    if (!ext_seen.insert(*g).second) errors.push_back("external port " + e.str() + " listed twice");
    if (uses[*g] > 0) errors.push_back("external port " + e.str() + " is also connected");
    r.external.push_back(*g);
  }
  for (std::size_t g = 0; g < r.layout.total; ++g) {
    if (uses[g] == 0 && !ext_seen.count(g))
      errors.push_back("port " + label[g] + " is neither connected nor external");
  }
  return r;
}

}  // namespace

std::vector<std::string> check(const Netlist& netlist) {
  std::vector<std::string> errors;
  resolve_all(netlist, errors);
  return errors;
}

NetworkComponent connect(const Netlist& netlist, std::string name) {
  std::vector<std::string> errors;
  const Resolved r = resolve_all(netlist, errors);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  if (r.external.empty()) throw ValidationError("netlist has no external ports");

  // Block-diagonal S over every component port.
  const auto total = static_cast<Eigen::Index>(r.layout.total);
  CMatrix s = CMatrix::Zero(total, total);
  for (std::size_t c = 0; c < netlist.components.size(); ++c) {
    const auto o = static_cast<Eigen::Index>(r.layout.offset[c]);
    const auto& cs = netlist.components[c].s;
    s.block(o, o, cs.rows(), cs.cols()) = cs;
  }

  std::vector<std::size_t> internal;
  for (std::size_t g = 0; g < r.layout.total; ++g) {
    if (r.partner[g] != npos) internal.push_back(g);
  }
  const auto ni = static_cast<Eigen::Index>(internal.size());

  auto block = [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s(
            static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return m;
  };

  NetworkComponent out;
  out.name = std::move(name);
  for (const auto& e : netlist.external) out.ports.push_back(e.str());

  CMatrix see = block(r.external, r.external);
  if (ni == 0) {
    out.s = see;
    return out;
  }

  // a_i = P b_i with P swapping connected partners; b_i = S_ie a_e + S_ii a_i.
  std::map<std::size_t, Eigen::Index> position;
  for (Eigen::Index k = 0; k < ni; ++k) position[internal[static_cast<std::size_t>(k)]] = k;
  RMatrix perm = RMatrix::Zero(ni, ni);
  for (Eigen::Index k = 0; k < ni; ++k)
    perm(k, position.at(r.partner[internal[static_cast<std::size_t>(k)]])) = 1.0;
  const CMatrix p = perm.cast<Complex>();

  const CMatrix sei = block(r.external, internal);
  const CMatrix sie = block(internal, r.external);
  const CMatrix sii = block(internal, internal);
  const CMatrix system = CMatrix::Identity(ni, ni) - p * sii;

  Eigen::FullPivLU<CMatrix> lu(system);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw SingularityError("internal connection system of '" + out.name +
                               "' is singular (lossless loop with unit round-trip gain)",
                           std::nan(""));
  }
  out.s = see + sei * lu.solve(p * sie);
  return out;
}

NetworkComponent terminate(const NetworkComponent& component, std::span<const std::size_t> ports) {
  const std::size_t n = component.ports.size();
  std::set<std::size_t> dropped;
  for (std::size_t p : ports) {
    if (p >= n) throw ValidationError("cannot terminate port index " + std::to_string(p) +
                                      " of '" + component.name + "'");
    dropped.insert(p);
  }
  if (dropped.size() == n) throw ValidationError("terminating every port leaves no external port");

  Netlist net;
  net.components.push_back(component);
  std::size_t load = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (dropped.count(p)) {
      NetworkComponent m = ideal("matched_load", "__load" + std::to_string(load++));
      net.connections.push_back({{component.name, component.ports[p]}, {m.name, m.ports[0]}});
      net.components.push_back(std::move(m));
    } else {
      net.external.push_back({component.name, component.ports[p]});
    }
  }
  NetworkComponent out = connect(net, component.name);
  out.ports.clear();
  for (std::size_t p = 0; p < n; ++p) {
    if (!dropped.count(p)) out.ports.push_back(component.ports[p]);
  }
  return out;
}

Netlist gyrator_circulator_netlist() {
  Netlist net;
  net.components = {ideal("beam_splitter", "bs1"), ideal("gyrator", "gyr"),
                    ideal("transmission_line", "tl"), ideal("beam_splitter", "bs2")};
  net.connections = {
      {{"bs1", "3"}, {"gyr", "1"}},
      {{"gyr", "2"}, {"bs2", "1"}},
      {{"bs1", "4"}, {"tl", "1"}},
      {{"tl", "2"}, {"bs2", "2"}},
  };
  net.external = {{"bs1", "1"}, {"bs2", "3"}, {"bs1", "2"}, {"bs2", "4"}};
  return net;
}

}  // namespace nrcm
