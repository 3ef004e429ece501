#include <gtest/gtest.h>

#include <random>

#include "nrcm/errors.hpp"
#include "nrcm/linalg.hpp"
#include "nrcm/system.hpp"
#include "support.hpp"

namespace nrcm {
namespace {

using testing::cavity;
using testing::converter;
using testing::converter_with_hop;
using testing::link;
using testing::mechanics;

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

TEST(Validate, AcceptsConverter) {
  const auto v = validate(converter(1.0, 1.0));
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(v.mode_index("b"), 2u);
  EXPECT_EQ(v.links().size(), 2u);
  EXPECT_TRUE(check(converter(1.0, 1.0)).empty());
}

TEST(Validate, UnknownEndpointIsNamed) {
  auto spec = converter(1.0, 1.0);
  spec.couplings[1].second = "b2";
  const auto errors = check(spec);
  ASSERT_FALSE(errors.empty());
  EXPECT_TRUE(mentions(errors, "'b2'"));
  try {
    validate(spec);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("b2"), std::string::npos);
  }
}

TEST(Validate, OptomechanicalBetweenCavitiesIsKindMismatch) {
  auto spec = converter(1.0, 1.0);
  spec.couplings.push_back(link("a1", "a2", 0.5));
  EXPECT_TRUE(mentions(check(spec), "kind mismatch"));
}

TEST(Validate, CollectsEveryViolation) {
  SystemSpec spec;
  spec.modes = {cavity("a", 1.0), cavity("a", -1.0), mechanics("m", 0.0)};
  spec.modes[2].external_rate = 0.5;
  spec.couplings = {link("a", "q", -2.0)};
  const auto errors = check(spec);
  EXPECT_TRUE(mentions(errors, "duplicate mode id 'a'"));
  EXPECT_TRUE(mentions(errors, "negative or non-finite external rate"));
  EXPECT_TRUE(mentions(errors, "mechanical modes cannot have an external port"));
  EXPECT_TRUE(mentions(errors, "unknown mode id 'q'"));
  EXPECT_TRUE(mentions(errors, "negative or non-finite rate"));
}

TEST(Validate, RejectsUndampedMode) {
  SystemSpec spec;
  spec.modes = {cavity("a", 0.0)};
  EXPECT_TRUE(mentions(check(spec), "undamped"));
}

TEST(Validate, RejectsDisconnectedGraph) {
  auto spec = converter(1.0, 1.0);
  spec.modes.push_back(cavity("lonely", 1.0));
  EXPECT_TRUE(mentions(check(spec), "not connected"));
}

TEST(Validate, VacuumRateTimesRootPhotons) {
  auto spec = converter(1.0, 1.0);
  spec.couplings[0].vacuum_rate = 2.0;
  spec.couplings[0].pump_photons = 0.0625;
  spec.couplings[0].rate = 0.5;
  EXPECT_TRUE(check(spec).empty());
  spec.couplings[0].rate = 0.5 * (1.0 + 1e-9);
  EXPECT_TRUE(mentions(check(spec), "g0*sqrt(n_c)"));
  spec.couplings[0].rate = 0.5 * (1.0 + 1e-14);
  EXPECT_TRUE(check(spec).empty());
  EXPECT_DOUBLE_EQ(enhanced_rate(2.0, 0.0625), 0.5);
}

TEST(Validate, WrapsPhasesAndIsIdempotent) {
  auto spec = converter(1.0, 2.0, 3.0 * kPi, -kPi);
  const auto once = validate(spec);
  EXPECT_NEAR(once.couplings()[0].phase, kPi, 1e-15);
  EXPECT_NEAR(once.couplings()[1].phase, kPi, 1e-15);
  const auto twice = validate(once.spec());
  EXPECT_EQ(once.spec(), twice.spec());
}

TEST(Cooperativity, UnitExample) {
  SystemSpec spec;
  spec.modes = {cavity("a", 4.0), mechanics("b", 1.0)};
  spec.couplings = {link("a", "b", 1.0)};
  EXPECT_DOUBLE_EQ(cooperativity(validate(spec), 0).value, 1.0);

  spec.couplings[0].rate = 2.0;
  EXPECT_DOUBLE_EQ(cooperativity(validate(spec), 0).value, 4.0);
}

TEST(Cooperativity, CoherentZeroRate) {
  auto spec = converter_with_hop(1.0, 1.0, 0.0, 0.0);
  const auto v = validate(spec);
  EXPECT_EQ(cooperativity(v, 2).value, 0.0);
}

TEST(Cooperativity, ScalesQuadraticallyAndInversely) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double kappa = u(rng), gamma = u(rng), g = u(rng);
    SystemSpec spec;
    spec.modes = {cavity("a", kappa), mechanics("b", gamma)};
    spec.couplings = {link("a", "b", g)};
    const double c = cooperativity(validate(spec), 0).value;
    EXPECT_NEAR(c, 4.0 * g * g / (kappa * gamma), 1e-12 * c);

    spec.couplings[0].rate = 3.0 * g;
    spec.modes[0].external_rate = 2.0 * kappa;
    spec.modes[1].loss_rate = 5.0 * gamma;
    const double scaled = cooperativity(validate(spec), 0).value;
    EXPECT_NEAR(scaled, c * 9.0 / 10.0, 1e-12 * c);
  }
}

TEST(SyntheticFlux, HopPhaseAloneGivesQuarterTurn) {
  // Loop a1 -a1a2-> a2 -(a2,b)-> b -(a1,b) backwards-> a1.
  const auto v = validate(converter_with_hop(1.0, 1.0, 1.0, kPi / 2.0));
  const std::vector<std::size_t> loop{2, 1, 0};
  EXPECT_NEAR(synthetic_flux(v, loop), kPi / 2.0, 1e-15);
}

TEST(SyntheticFlux, ZeroPhases) {
  const auto v = validate(converter_with_hop(1.0, 1.0, 1.0, 0.0));
  const std::vector<std::size_t> loop{0, 1, 2};
  EXPECT_EQ(synthetic_flux(v, loop), 0.0);
}

TEST(SyntheticFlux, RejectsOpenPath) {
  const auto v = validate(converter(1.0, 1.0));
  const std::vector<std::size_t> path{0, 1};
  EXPECT_THROW(synthetic_flux(v, path), ValidationError);
}

// Redefining mode m as m e^{i alpha} shifts the phase of every coupling that
// leaves m by +alpha and of every coupling that enters m by -alpha.
SystemSpec gauge_shift(SystemSpec spec, const std::string& id, double alpha) {
  for (auto& c : spec.couplings) {
    if (c.first == id) c.phase += alpha;
    if (c.second == id) c.phase -= alpha;
  }
  return spec;
}

TEST(SyntheticFlux, InvariantUnderSingleModeGauge) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  const std::vector<std::size_t> loop{0, 1, 2};
  for (int trial = 0; trial < 100; ++trial) {
    auto spec = converter_with_hop(1.0, 2.0, 0.5, phase(rng));
    spec.couplings[0].phase = phase(rng);
    spec.couplings[1].phase = phase(rng);
    const double before = synthetic_flux(validate(spec), loop);
    for (const char* id : {"a1", "a2", "b"}) {
      const double after = synthetic_flux(validate(gauge_shift(spec, id, 0.7)), loop);
      EXPECT_NEAR(std::abs(wrap_phase(after - before)), 0.0, 1e-12) << id;
    }
  }
}

TEST(SyntheticFlux, SameShiftOnBothMechanicalLinks) {
  // Both links point into b, so adding 0.7 to each cancels around the loop.
  auto spec = converter_with_hop(1.0, 1.0, 1.0, 0.3);
  const std::vector<std::size_t> loop{0, 1, 2};
  const double before = synthetic_flux(validate(spec), loop);
  spec.couplings[0].phase += 0.7;
  spec.couplings[1].phase += 0.7;
  EXPECT_NEAR(synthetic_flux(validate(spec), loop), before, 1e-12);
}

}  // namespace
}  // namespace nrcm
