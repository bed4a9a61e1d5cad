#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "relshift/redshift.hpp"

using namespace relshift;

namespace {

const PhysConsts K;
const double kSync = 42241095.674;

Link ground_uplink(double ecc) { return {GroundStation{}, KeplerOrbit{kSync, ecc}, K, K.R_E}; }

}  // namespace

TEST(Geostationary, ConstantRelativisticShift) {
  const Link up = ground_uplink(0.0);
  const Link down{up.receiver, up.emitter, K, K.R_E};
  for (double t = 0.0; t <= 86400.0; t += 3600.0) {
    const ShiftBreakdown u = shift_breakdown(up, t), d = shift_breakdown(down, t);
    EXPECT_NEAR(u.z_total, 5.390556e-10, 1e-15);
    EXPECT_NEAR(d.z_total, -5.390556e-10, 1e-15);
    EXPECT_LT(std::abs(u.z_ret), 1e-20);
    EXPECT_LT(std::abs(u.z_long_exact), 1e-20);
    EXPECT_TRUE(u.los);
  }
  EXPECT_NEAR(z_rel_ground(GroundStation{}, KeplerOrbit{kSync}, kSync), 5.390556e-10, 1e-15);
  EXPECT_NEAR(z_rel_ground(GroundStation{}, KeplerOrbit{kSync}, kSync, K, LinkDirection::Downlink), -5.390556e-10,
              1e-15);
}

TEST(ZeroShiftRadius, ValueAndVanishingShift) {
  const double r = zero_shift_radius();
  EXPECT_NEAR(r, 9550766.0, 1.0);
  EXPECT_LT(std::abs(z_rel_ground(GroundStation{}, KeplerOrbit{r}, r)), 1e-13);
  // Below the radius the uplink shift is negative, above it positive.
  EXPECT_LT(z_rel_ground(GroundStation{}, KeplerOrbit{8e6}, 8e6), 0.0);
  EXPECT_GT(z_rel_ground(GroundStation{}, KeplerOrbit{2e7}, 2e7), 0.0);
}

TEST(RetardationTerm, EccentricGeosynchronousUplink) {
  const Link up = ground_uplink(0.4);
  EXPECT_NEAR(shift_breakdown(up, 0.0).z_ret, 8.98161e-11, 1e-15);
  EXPECT_NEAR(shift_breakdown(up, 43200.0).z_ret, -3.22881e-11, 1e-15);
}

TEST(RetardationTerm, RequiresAcceleration) {
  StateVector a{0, {7e6, 0, 0}, {0, 7e3, 0}, {}}, b{0, {4e7, 0, 0}, {0, 3e3, 0}, {}};
  EXPECT_THROW(z_retardation(a, b, 3.3e7), DomainError);
}

TEST(KeplerForm, AgreesWithInstantaneousStates) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> e(0.0, 0.8), t(0.0, 1e5), a(8e6, 5e7);
  int checked = 0;
  while (checked < 1000) {
    const KeplerOrbit oa{a(rng), e(rng)}, ob{a(rng), e(rng)};
    if (oa.periapsis() <= K.R_E || ob.periapsis() <= K.R_E) continue;
    const StateVector sa = kepler_state(oa, t(rng)), sb = kepler_state(ob, t(rng));
    EXPECT_NEAR(z_rel_kepler(oa, ob, norm(sa.r), norm(sb.r)), z_rel_instant(sa, sb), 1e-15);
    ++checked;
  }
}

TEST(KeplerForm, RejectsInconsistentRadius) {
  EXPECT_THROW(z_rel_kepler(KeplerOrbit{1e7, 0.1}, KeplerOrbit{2e7}, 5e6, 2e7), DomainError);
}

TEST(Decomposition, FirstOrderSplitHoldsOnLeoGeosyncLink) {
  const Link link{KeplerOrbit{6778137.0}, KeplerOrbit{42248e3, 0.4}, K, K.R_E};
  for (double t = 0.0; t <= 86400.0; t += 600.0) {
    const ShiftBreakdown b = shift_breakdown(link, t);
    const double first_order = b.z_long_exact - b.z_long_quadratic;
    EXPECT_LT(std::abs(first_order - (b.z_long0 + b.z_ret)), 2e-14) << t;
    EXPECT_DOUBLE_EQ(b.z_total, b.z_long_exact + b.z_rel);
    EXPECT_DOUBLE_EQ(b.z_corr, b.z_ret + b.z_rel0);
  }
}

TEST(Decomposition, SanityBound) {
  const Link link{KeplerOrbit{6778137.0}, KeplerOrbit{kSync}, K, K.R_E};
  for (double t = 0.0; t <= 86400.0; t += 900.0) EXPECT_LT(std::abs(shift_breakdown(link, t).z_total), 1e-3);
}

TEST(LimitCases, NearUplinkCancelsToSecondOrder) {
  for (double ratio : {1e-2, 3e-3, 1e-3}) {
    const auto r = limit_case_gravity(LinkDirection::Uplink, LimitRegime::Near, ratio, 2e7);
    EXPECT_LT(std::abs(r.coefficient), 3.0) << ratio;
    EXPECT_NEAR(r.coefficient, 1.0, 0.05);
  }
}

TEST(LimitCases, NearDownlinkDoubles) {
  for (double ratio : {1e-2, 1e-3, 1e-4}) {
    const auto r = limit_case_gravity(LinkDirection::Downlink, LimitRegime::Near, ratio, 2e7);
    EXPECT_NEAR(r.coefficient, 2.0, 0.02) << ratio;
  }
}

TEST(LimitCases, FarDownlinkReceiverTermsCancel) {
  for (double ratio : {100.0, 1000.0}) {
    const auto r = limit_case_gravity(LinkDirection::Downlink, LimitRegime::Far, ratio, 7e6);
    EXPECT_LT(r.receiver_residual_fraction, 0.02) << ratio;
    EXPECT_NEAR(r.coefficient, 1.0, 0.02);
  }
}

TEST(LimitCases, RadialTermsRejectNonRadialGeometry) {
  EXPECT_THROW(radial_gravity_terms(7e6, 2e7, 1.3e7, 0.5), DomainError);
}
