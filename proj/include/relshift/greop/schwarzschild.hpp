#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "relshift/core.hpp"

namespace relshift::greop {

/// Schwarzschild coordinates (t, r, theta, phi), SI units.
struct Event {
  double t = 0.0;
  double r = 0.0;
  double theta = std::numbers::pi / 2.0;
  double phi = 0.0;
};

enum class Parametrization { ProperTime, Affine };

/// Tangent components (dt, dr, dtheta, dphi) per unit parameter.
struct FourVector {
  std::array<double, 4> v{};
  Parametrization param = Parametrization::ProperTime;

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

enum class GeodesicKind { Timelike, Null };

/// Christoffel symbols of the exterior Schwarzschild metric, nonzero entries only.
struct Christoffel {
  double t_tr = 0.0;
  double r_tt = 0.0, r_rr = 0.0, r_thth = 0.0, r_phph = 0.0;
  double th_rth = 0.0, th_phph = 0.0;
  double ph_rph = 0.0, ph_thph = 0.0;
};

class Schwarzschild {
 public:
  /// gm = 0 gives Minkowski space in spherical coordinates.
  explicit Schwarzschild(double gm = PhysConsts{}.GM, double c = PhysConsts{}.c)
      : gm_(gm), c_(c), rs_(2.0 * gm / (c * c)) {
    if (!(gm >= 0.0) || !(c > 0.0)) throw DomainError("metric parameters out of range");
  }
  explicit Schwarzschild(const PhysConsts& k) : Schwarzschild(k.GM, k.c) {}

  double gm() const { return gm_; }
  double c() const { return c_; }
  double r_s() const { return rs_; }

  void check_exterior(double r) const {
    if (!(r > rs_ * (1.0 + 1e-6)) || !(r > 0.0)) throw DomainError("event too close to the horizon");
  }

  double lapse2(double r) const { return 1.0 - rs_ / r; }

  /// Diagonal metric components at an event.
  std::array<double, 4> metric(const Event& x) const {
    const double f = lapse2(x.r);
    const double s = std::sin(x.theta);
    return {-f * c_ * c_, 1.0 / f, x.r * x.r, x.r * x.r * s * s};
  }

  double dot(const Event& x, const FourVector& a, const FourVector& b) const {
    const auto g = metric(x);
    return g[0] * a[0] * b[0] + g[1] * a[1] * b[1] + g[2] * a[2] * b[2] + g[3] * a[3] * b[3];
  }
  double norm2(const Event& x, const FourVector& a) const { return dot(x, a, a); }

  Christoffel christoffel(const Event& x) const {
    check_exterior(x.r);
    const double r = x.r;
    const double f = lapse2(r);
    const double s = std::sin(x.theta), co = std::cos(x.theta);
    Christoffel g;
    g.t_tr = rs_ / (2.0 * r * r * f);
    g.r_tt = c_ * c_ * f * rs_ / (2.0 * r * r);
    g.r_rr = -rs_ / (2.0 * r * r * f);
    g.r_thth = -r * f;
    g.r_phph = -r * f * s * s;
    g.th_rth = 1.0 / r;
    g.th_phph = -s * co;
    g.ph_rph = 1.0 / r;
    g.ph_thph = co / s;
    return g;
  }

  /// Second derivatives -Gamma^mu_ab u^a u^b.
  std::array<double, 4> acceleration(const Event& x, const FourVector& u) const {
    const Christoffel g = christoffel(x);
    const double ut = u[0], ur = u[1], uth = u[2], uph = u[3];
    return {
        -2.0 * g.t_tr * ut * ur,
        -(g.r_tt * ut * ut + g.r_rr * ur * ur + g.r_thth * uth * uth + g.r_phph * uph * uph),
        -(2.0 * g.th_rth * ur * uth + g.th_phph * uph * uph),
        -(2.0 * g.ph_rph * ur * uph + 2.0 * g.ph_thph * uth * uph),
    };
  }

  /// Conserved energy (1 - r_S/r) dt/dlambda and angular momentum r^2 sin^2(theta) dphi/dlambda.
  double energy(const Event& x, const FourVector& u) const { return lapse2(x.r) * u[0]; }
  double angular_momentum(const Event& x, const FourVector& u) const {
    const double s = std::sin(x.theta);
    return x.r * x.r * s * s * u[3];
  }

 private:
  double gm_;
  double c_;
  double rs_;
};

/// Integrator state layout: t, r, theta, phi, then the tangent components.
using GeodesicState = std::array<double, 8>;

inline GeodesicState pack(const Event& x, const FourVector& u) {
  return {x.t, x.r, x.theta, x.phi, u[0], u[1], u[2], u[3]};
}
inline Event event_of(const GeodesicState& y) { return {y[0], y[1], y[2], y[3]}; }
inline FourVector tangent_of(const GeodesicState& y, Parametrization p) {
  return {{y[4], y[5], y[6], y[7]}, p};
}

inline GeodesicState geodesic_rhs(const Schwarzschild& m, const GeodesicState& y) {
  const Event x = event_of(y);
  const FourVector u = tangent_of(y, Parametrization::Affine);
  const auto acc = m.acceleration(x, u);
  return {y[4], y[5], y[6], y[7], acc[0], acc[1], acc[2], acc[3]};
}

/// Cartesian position from spherical coordinates.
inline Vec3 cartesian(const Event& x) {
  const double s = std::sin(x.theta);
  return {x.r * s * std::cos(x.phi), x.r * s * std::sin(x.phi), x.r * std::cos(x.theta)};
}

/// Coordinate-time Cartesian velocity of a tangent vector.
inline Vec3 cartesian_velocity(const Event& x, const FourVector& u) {
  const double st = std::sin(x.theta), ct = std::cos(x.theta);
  const double sp = std::sin(x.phi), cp = std::cos(x.phi);
  const double dr = u[1] / u[0], dth = u[2] / u[0], dph = u[3] / u[0];
  return {dr * st * cp + x.r * ct * cp * dth - x.r * st * sp * dph,
          dr * st * sp + x.r * ct * sp * dth + x.r * st * cp * dph,
          dr * ct - x.r * st * dth};
}

inline Event spherical(double t, const Vec3& p) {
  const double r = norm(p);
  return {t, r, std::acos(std::clamp(p.z / r, -1.0, 1.0)), std::atan2(p.y, p.x)};
}

/// Spherical coordinate rates (dr/dt, dtheta/dt, dphi/dt) of a Cartesian velocity.
inline std::array<double, 3> spherical_rates(const Event& x, const Vec3& v) {
  const double st = std::sin(x.theta), ct = std::cos(x.theta);
  const double sp = std::sin(x.phi), cp = std::cos(x.phi);
  const Vec3 er{st * cp, st * sp, ct};
  const Vec3 eth{ct * cp, ct * sp, -st};
  const Vec3 eph{-sp, cp, 0.0};
  return {relshift::dot(v, er), relshift::dot(v, eth) / x.r, relshift::dot(v, eph) / (x.r * st)};
}

/// Timelike four-velocity of an observer with Cartesian coordinate velocity v at x.
inline FourVector four_velocity(const Schwarzschild& m, const Event& x, const Vec3& v) {
  m.check_exterior(x.r);
  const auto rates = spherical_rates(x, v);
  const auto g = m.metric(x);
  const double spatial = g[1] * rates[0] * rates[0] + g[2] * rates[1] * rates[1] + g[3] * rates[2] * rates[2];
  const double denom = -g[0] - spatial;
  if (!(denom > 0.0)) throw DomainError("observer velocity is not timelike");
  const double ut = m.c() / std::sqrt(denom);
  return {{ut, ut * rates[0], ut * rates[1], ut * rates[2]}, Parametrization::ProperTime};
}

}  // namespace relshift::greop
