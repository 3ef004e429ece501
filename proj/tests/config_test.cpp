#include <gtest/gtest.h>

#include "nrcm/config.hpp"
#include "nrcm/dynamics.hpp"
#include "nrcm/errors.hpp"
#include "support.hpp"

namespace nrcm {
namespace {

std::string configs(const std::string& name) {
  return std::string(NRCM_SOURCE_DIR) + "/configs/" + name;
}

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_system_config(text);
  } catch (const ValidationError& e) {
    return e.violations();
  }
  return {};
}

const char* kConverter = R"(schema: nrcm-system/1
units: rad/s
modes:
  - {id: a1, kind: electromagnetic, kappa_ex: 1.0}
  - {id: a2, kind: electromagnetic, kappa_ex: 1.0, kappa_0: 0.5}
  - {id: b, kind: mechanical, gamma_m: 0.25, occupancy: 3}
couplings:
  - {modes: [a1, b], kind: optomechanical, cooperativity: 2.0, phase: 0.5}
  - {modes: [a2, b], kind: optomechanical, rate: 0.1}
port_occupancy: {a1: 0.5}
)";

TEST(SystemConfig, ParsesEveryField) {
  const auto cfg = parse_system_config(kConverter);
  ASSERT_EQ(cfg.spec.modes.size(), 3u);
  EXPECT_EQ(cfg.units, Units::rad_per_s);
  EXPECT_EQ(cfg.spec.modes[1].loss_rate, 0.5);
  EXPECT_EQ(cfg.spec.modes[2].kind, ModeKind::mechanical);
  EXPECT_EQ(cfg.spec.modes[2].occupancy, 3.0);
  EXPECT_NEAR(cooperativity(validate(cfg.spec), 0).value, 2.0, 1e-12);
  EXPECT_EQ(cfg.spec.couplings[0].phase, 0.5);
  EXPECT_EQ(cfg.port_occupancy.at("a1"), 0.5);
}

TEST(SystemConfig, HertzBecomeAngularRates) {
  const auto cfg = parse_system_config(R"(schema: nrcm-system/1
units: hz
modes:
  - {id: a, kind: electromagnetic, kappa_ex: 1000, detuning: 10}
)");
  EXPECT_NEAR(cfg.spec.modes[0].external_rate, 2000.0 * kPi, 1e-9);
  EXPECT_NEAR(cfg.spec.modes[0].detuning, 20.0 * kPi, 1e-12);
  EXPECT_EQ(cfg.units, Units::hz);
}

TEST(SystemConfig, VacuumCouplingAndPhotons) {
  const auto cfg = parse_system_config(R"(schema: nrcm-system/1
modes:
  - {id: a, kind: electromagnetic, kappa_ex: 1}
  - {id: b, kind: mechanical, gamma_m: 1}
couplings:
  - {modes: [a, b], kind: optomechanical, g0: 0.002, n_c: 10000}
)");
  EXPECT_NEAR(cfg.spec.couplings[0].rate, 0.2, 1e-15);
  EXPECT_TRUE(check(cfg.spec).empty());
}

TEST(SystemConfig, RoundTripIsLossless) {
  auto spec = testing::converter_with_hop(1.7, 0.3, 0.51, -2.2, 0.9, 0.013);
  spec.modes[0].loss_rate = 1.0 / 3.0;
  spec.modes[2].occupancy = 12.5;
  spec.modes[2].detuning = -1e-7;
  const auto v = validate(spec);
  const BathOccupancies occ{{"a2", 0.25}};
  const std::string text = emit_system_config(v.spec(), occ);
  const auto back = parse_system_config(text);
  EXPECT_EQ(back.spec, v.spec());
  EXPECT_EQ(back.port_occupancy, occ);
  EXPECT_EQ(emit_system_config(validate(back.spec).spec(), back.port_occupancy), text);
}

TEST(SystemConfig, DiagnosticsCarryLineNumbers) {
  const auto errors = violations_of(R"(schema: nrcm-system/1
modes:
  - {id: a1, kind: electromagnetic, kappa_ex: 1}
  - {id: b, kind: mechanical, gamma_m: 1, colour: red}
)");
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0], "line 4: unknown key 'colour' in mode");
}

TEST(SystemConfig, SemanticErrorsPointAtTheirNode) {
  const auto errors = violations_of(R"(schema: nrcm-system/1
modes:
  - {id: a1, kind: electromagnetic, kappa_ex: 1}
  - {id: b, kind: mechanical, gamma_m: 1}
couplings:
  - {modes: [a1, b], kind: optomechanical, rate: 1}
  - {modes: [a1, b2], kind: optomechanical, rate: 1}
)");
  ASSERT_FALSE(errors.empty());
  EXPECT_EQ(errors[0].rfind("line 7: ", 0), 0u) << errors[0];
  EXPECT_NE(errors[0].find("'b2'"), std::string::npos);
}

TEST(SystemConfig, RejectsMalformedInput) {
  EXPECT_FALSE(violations_of("modes: []\n").empty());                        // no schema
  EXPECT_FALSE(violations_of("schema: nrcm-system/9\nmodes: []\n").empty());  // wrong version
  EXPECT_FALSE(violations_of("schema: nrcm-system/1\nmodes: [\n").empty());   // YAML syntax
  EXPECT_FALSE(violations_of(R"(schema: nrcm-system/1
units: furlongs
modes:
  - {id: a, kind: electromagnetic, kappa_ex: 1}
)").empty());
  EXPECT_FALSE(violations_of(R"(schema: nrcm-system/1
modes:
  - {id: a, kind: electromagnetic, kappa_ex: one}
)").empty());
}

TEST(SystemConfig, ShippedFilesLoad) {
  for (const char* name : {"converter.yaml", "scheme_b.yaml", "scheme_c.yaml"}) {
    const auto cfg = load_system_config(configs(name));
    EXPECT_NO_THROW(validate(cfg.spec)) << name;
  }
  const auto c = load_system_config(configs("scheme_c.yaml"));
  ASSERT_TRUE(c.optimize.splitting.has_value());
  EXPECT_NEAR(c.optimize.splitting->hi, 2000.0 * kPi, 1e-9);
}

TEST(NetlistConfig, ShippedCirculator) {
  const auto cfg = load_netlist_config(configs("circulator.yaml"));
  EXPECT_EQ(cfg.netlist.components.size(), 4u);
  EXPECT_EQ(cfg.netlist.connections.size(), 4u);
  EXPECT_TRUE(cfg.terminate.empty());
  const auto iso = load_netlist_config(configs("isolator.yaml"));
  EXPECT_EQ(iso.terminate, (std::vector<std::size_t>{2, 3}));
}

TEST(NetlistConfig, CustomComponent) {
  const auto cfg = parse_netlist_config(R"(schema: nrcm-netlist/1
components:
  - name: x
    type: custom
    s: [[0, [0, 1]], [[0, 1], 0]]
external: [x.1, x.2]
)");
  const auto& s = cfg.netlist.components[0].s;
  EXPECT_EQ(s(0, 1), Complex(0.0, 1.0));
  EXPECT_EQ(s(1, 1), Complex(0.0, 0.0));
}

TEST(NetlistConfig, DoubleConnectedPortIsNamed) {
  try {
    parse_netlist_config(R"(schema: nrcm-netlist/1
components:
  - {name: g, type: gyrator}
  - {name: t, type: transmission_line}
connections:
  - [g.2, t.1]
  - [g.2, t.2]
external: [g.1]
)");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("g.2"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace nrcm
