#include <cmath>

#include <gtest/gtest.h>

#include "relshift/qkd.hpp"

using namespace relshift;

TEST(Plob, AnchorValue) {
  EXPECT_NEAR(plob_bound(0.4), -std::log2(0.6), 1e-15);
  EXPECT_NEAR(plob_bound(0.4), 0.7369655941662062, 1e-12);
  EXPECT_EQ(plob_bound(0.0), 0.0);
  EXPECT_THROW(plob_bound(1.0), DomainError);
  EXPECT_THROW(plob_bound(-0.1), DomainError);
}

TEST(Plob, MonotoneInTransmissivity) {
  double prev = -1.0;
  for (double eta = 0.0; eta < 0.99; eta += 0.01) {
    const double p = plob_bound(eta);
    EXPECT_GT(p, prev);
    prev = p;
  }
}

TEST(Overlap, PerfectMatchAtZeroShift) {
  const SignalSpec spec = SignalSpec::from_ratio(1e10);
  EXPECT_DOUBLE_EQ(gaussian_overlap(0.0, spec), 1.0);
  EXPECT_DOUBLE_EQ(gaussian_overlap_approx(0.0, 1e10), 1.0);
}

TEST(Overlap, ApproximationMatchesExactForSmallShifts) {
  for (double R : {1e9, 1e10, 1e11}) {
    const SignalSpec spec = SignalSpec::from_ratio(R);
    EXPECT_NEAR(spec.ratio_R(), R, 1e-6 * R);
    for (double rz : {-3.0, -1.0, -0.2, 0.1, 0.5, 2.0, 4.0}) {
      const double z = rz / R;
      EXPECT_NEAR(gaussian_overlap(z, spec), gaussian_overlap_approx(z, R), 1e-8) << R << " " << rz;
    }
  }
}

TEST(Overlap, HalfPowerAtUnitScaledShift) {
  // 2^(-R^2 z^2 / 4) equals 1/2 at R|z| = 2.
  EXPECT_NEAR(gaussian_overlap_approx(2e-10, 1e10), 0.5, 1e-15);
  EXPECT_THROW(gaussian_overlap(-1.0, SignalSpec::from_ratio(1e10)), DomainError);
}

TEST(Plob, SmallShiftExpansion) {
  const double R = 1e10, eta0 = 0.4;
  const SignalSpec spec = SignalSpec::from_ratio(R, eta0);
  for (double rz : {0.01, 0.03, 0.1}) {
    const double exact = plob_bound(eta0 * gaussian_overlap(rz / R, spec));
    const double approx = plob_small_z(rz / R, R, eta0);
    EXPECT_NEAR(exact, approx, 0.1 * (plob_bound(eta0) - approx) + 1e-12);
  }
}

TEST(Capacity, NullOutsideLineOfSight) {
  const SignalSpec spec = SignalSpec::from_ratio(1e10);
  const CapacitySample s = capacity_at(3.0, 1e-11, false, spec);
  EXPECT_FALSE(s.gamma);
  EXPECT_FALSE(s.plob_bits);
  const CapacitySample v = capacity_at(3.0, 1e-11, true, spec);
  ASSERT_TRUE(v.plob_bits);
  EXPECT_NEAR(*v.eta, 0.4 * *v.gamma, 1e-16);
}

TEST(Capacity, CorrectionModeSelectsShift) {
  ShiftBreakdown b;
  b.z_corr = 1e-11;
  b.z_total = 1e-6;
  const SignalSpec spec = SignalSpec::from_ratio(1e10);
  const auto corr = capacity_timeseries({b}, spec, CorrectionMode::Corrected);
  const auto unc = capacity_timeseries({b}, spec, CorrectionMode::Uncorrected);
  EXPECT_GT(*corr[0].plob_bits, 0.7);
  EXPECT_LT(*unc[0].plob_bits, 1e-100);
}

TEST(SignalSpec, Validation) {
  EXPECT_THROW(SignalSpec::from_ratio(0.0), DomainError);
  EXPECT_THROW(SignalSpec::from_ratio(1e10, 1.5), DomainError);
  EXPECT_THROW(SignalSpec::from_width(1e15, -1.0), DomainError);
  EXPECT_NEAR(SignalSpec::from_ratio(1e10).eta0(), 0.4, 0.0);
}
