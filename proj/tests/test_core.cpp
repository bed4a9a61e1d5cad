#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "relshift/core.hpp"

using namespace relshift;

namespace {

// Bisection on the bracket [M - e, M + e]; independent of the production solver.
double kepler_by_bisection(double M, double e) {
  double lo = M - e, hi = M + e;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - e * std::sin(mid) - M > 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Constants, SchwarzschildRadiusIsDerived) {
  PhysConsts k;
  EXPECT_NEAR(k.r_S(), 8.870056e-3, 1e-9);
  k.GM *= 2.0;
  EXPECT_NEAR(k.r_S(), 2.0 * 8.870056e-3, 2e-9);
}

TEST(Constants, RejectsNonPositiveValues) {
  PhysConsts k;
  k.c = 0.0;
  EXPECT_THROW(k.validate(), DomainError);
  k = {};
  k.GM = -1.0;
  EXPECT_THROW(k.validate(), DomainError);
  EXPECT_NO_THROW(PhysConsts{}.validate());
}

TEST(Vec3, Algebra) {
  const Vec3 a{1, 2, 3}, b{-2, 0.5, 4};
  EXPECT_DOUBLE_EQ(dot(a, b), -2 + 1 + 12);
  const Vec3 c = cross(a, b);
  EXPECT_DOUBLE_EQ(dot(c, a), 0.0);
  EXPECT_DOUBLE_EQ(dot(c, b), 0.0);
  EXPECT_DOUBLE_EQ(norm(Vec3{3, 4, 12}), 13.0);
}

TEST(Kepler, CircularReturnsMeanAnomaly) {
  EXPECT_EQ(solve_kepler(1.234, 0.0), 1.234);
  EXPECT_EQ(solve_kepler(-17.5, 0.0), -17.5);
}

TEST(Kepler, MatchesBisectionOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> m(-std::numbers::pi, std::numbers::pi), e(0.0, 0.99);
  for (int i = 0; i < 2000; ++i) {
    const double M = m(rng), ecc = e(rng);
    EXPECT_NEAR(solve_kepler(M, ecc), kepler_by_bisection(M, ecc), 1e-12) << M << " " << ecc;
  }
}

TEST(Kepler, ResidualOnRandomInputs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> m(-100.0, 100.0), e(0.0, 0.999);
  for (int i = 0; i < 10000; ++i) {
    const double M = m(rng), ecc = e(rng);
    const double E = solve_kepler(M, ecc);
    EXPECT_LT(std::abs(E - ecc * std::sin(E) - M), 1e-13);
  }
}

TEST(Kepler, ContinuousAcrossPeriods) {
  for (double ecc : {0.1, 0.5, 0.9}) {
    for (double M : {-3.0, -0.2, 0.0, 1.0, 3.1}) {
      EXPECT_NEAR(solve_kepler(M + 2.0 * std::numbers::pi, ecc), solve_kepler(M, ecc) + 2.0 * std::numbers::pi,
                  1e-12);
    }
  }
}

TEST(Kepler, HighEccentricityNearPeriapsis) {
  const double E = solve_kepler(1e-6, 0.9999);
  EXPECT_LT(std::abs(E - 0.9999 * std::sin(E) - 1e-6), 1e-13);
}

TEST(Kepler, RejectsOpenOrbits) {
  EXPECT_THROW(solve_kepler(1.0, 1.0), DomainError);
  EXPECT_THROW(solve_kepler(1.0, -0.1), DomainError);
  EXPECT_THROW(solve_kepler(NAN, 0.3), DomainError);
}
