#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <type_traits>
#include <variant>

#include "relshift/core.hpp"

namespace relshift {

enum class OrbitDirection { Prograde, Retrograde };

struct KeplerOrbit {
  double a = 0.0;
  double ecc = 0.0;
  double M0 = 0.0;
  double argp = 0.0;
  OrbitDirection direction = OrbitDirection::Prograde;

  double semi_latus_rectum() const { return a * (1.0 - ecc * ecc); }
  double periapsis() const { return a * (1.0 - ecc); }
  double apoapsis() const { return a * (1.0 + ecc); }

  void validate(const PhysConsts& k = {}) const {
    if (!(ecc >= 0.0) || !(ecc < 1.0)) throw DomainError("orbit eccentricity must lie in [0, 1)");
    if (!std::isfinite(a) || !(periapsis() > k.R_E))
      throw DomainError("orbit periapsis must lie above the Earth radius");
    if (!std::isfinite(M0) || !std::isfinite(argp)) throw DomainError("orbit angles must be finite");
  }

  bool operator==(const KeplerOrbit&) const = default;
};

struct GroundStation {
  double radius = PhysConsts{}.R_E;
  double phi0 = 0.0;

  void validate(const PhysConsts& k = {}) const {
    if (!(radius >= k.R_E)) throw DomainError("ground station radius below the Earth radius");
    if (!std::isfinite(phi0)) throw DomainError("ground station azimuth must be finite");
  }

  bool operator==(const GroundStation&) const = default;
};

using Endpoint = std::variant<KeplerOrbit, GroundStation>;
using Trajectory = std::function<StateVector(double)>;

inline double orbital_period(const KeplerOrbit& orbit, const PhysConsts& k = {}) {
  return 2.0 * std::numbers::pi * std::sqrt(orbit.a * orbit.a * orbit.a / k.GM);
}

inline double mean_motion(const KeplerOrbit& orbit, const PhysConsts& k = {}) {
  return std::sqrt(k.GM / (orbit.a * orbit.a * orbit.a));
}

inline double semi_major_axis_for_period(double period, const PhysConsts& k = {}) {
  const double n = 2.0 * std::numbers::pi / period;
  return std::cbrt(k.GM / (n * n));
}

/// Two-body state at coordinate time t; t = 0 is the epoch where the mean anomaly equals M0.
inline StateVector kepler_state(const KeplerOrbit& orbit, double t, const PhysConsts& k = {}) {
  const double ecc = orbit.ecc;
  const double E = solve_kepler(orbit.M0 + mean_motion(orbit, k) * t, ecc);
  const double cosE = std::cos(E), sinE = std::sin(E);
  const double root = std::sqrt((1.0 - ecc) * (1.0 + ecc));
  const double r = orbit.a * (1.0 - ecc * cosE);
  // Perifocal position and velocity, periapsis along +x.
  const double x = orbit.a * (cosE - ecc);
  const double y = orbit.a * root * sinE;
  const double edot = mean_motion(orbit, k) / (1.0 - ecc * cosE);
  double vx = -orbit.a * sinE * edot;
  double vy = orbit.a * root * cosE * edot;
  double py = y;
  if (orbit.direction == OrbitDirection::Retrograde) {
    py = -py;
    vy = -vy;
  }
  const double ca = std::cos(orbit.argp), sa = std::sin(orbit.argp);
  StateVector s;
  s.t = t;
  s.r = {ca * x - sa * py, sa * x + ca * py, 0.0};
  s.v = {ca * vx - sa * vy, sa * vx + ca * vy, 0.0};
  s.a = s.r * (-k.GM / (r * r * r));
  return s;
}

inline StateVector ground_station_state(const GroundStation& gs, double t, const PhysConsts& k = {}) {
  const double phi = gs.phi0 + k.omega_E * t;
  const double c = std::cos(phi), s = std::sin(phi);
  StateVector st;
  st.t = t;
  st.r = {gs.radius * c, gs.radius * s, 0.0};
  st.v = {-k.omega_E * gs.radius * s, k.omega_E * gs.radius * c, 0.0};
  st.a = st.r * (-k.omega_E * k.omega_E);
  return st;
}

inline StateVector endpoint_state(const Endpoint& ep, double t, const PhysConsts& k = {}) {
  return std::visit(
      [&](const auto& e) -> StateVector {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, KeplerOrbit>)
          return kepler_state(e, t, k);
        else
          return ground_station_state(e, t, k);
      },
      ep);
}

inline Trajectory endpoint_trajectory(const Endpoint& ep, const PhysConsts& k = {}) {
  return [ep, k](double t) { return endpoint_state(ep, t, k); };
}

inline void validate_endpoint(const Endpoint& ep, const PhysConsts& k = {}) {
  std::visit([&](const auto& e) { e.validate(k); }, ep);
}

inline double vis_viva_speed(const KeplerOrbit& orbit, double r, const PhysConsts& k = {}) {
  constexpr double slack = 1e-12;
  if (!(r >= orbit.periapsis() * (1.0 - slack) && r <= orbit.apoapsis() * (1.0 + slack)))
    throw DomainError("radius outside the orbit's radial range");
  return std::sqrt(k.GM * (2.0 / r - 1.0 / orbit.a));
}

inline double periapsis_shift(const KeplerOrbit& orbit, const PhysConsts& k = {}) {
  return 3.0 * std::numbers::pi * k.r_S() / orbit.semi_latus_rectum();
}

/// Relative size of the first-order orbit correction at radius r.
inline double orbit_correction_scale(double r, const PhysConsts& k = {}) {
  return 1.5 * k.r_S() / r;
}

struct PerturbedOrbitState {
  double phi = 0.0;
  double r = 0.0;
  double r_dot = 0.0;    // dr/dt
  double phi_dot = 0.0;  // dphi/dt
  double r_kepler = 0.0;
  double r_dot_kepler = 0.0;
  double phi_dot_kepler = 0.0;
  double r_correction = 0.0;
  double r_dot_correction = 0.0;
  double phi_dot_correction = 0.0;
  double inverse_radius = 0.0;  // u(phi), including the correction
  bool perturbative = true;     // r_S/p below the validity threshold
};

/// First-order Schwarzschild correction to a bound orbit as a function of the
/// true-anomaly angle phi (measured from periapsis, secular term included).
/// schwarzschild_radius defaults to 2GM/c^2; pass another value to scale it.
inline PerturbedOrbitState relativistic_orbit_state(const KeplerOrbit& orbit, double phi,
                                                    const PhysConsts& k = {},
                                                    std::optional<double> schwarzschild_radius = {}) {
  const double rs = schwarzschild_radius.value_or(k.r_S());
  const double e = orbit.ecc;
  const double p = orbit.semi_latus_rectum();
  const double L = std::sqrt(k.GM * p);
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double q = 1.0 + e * cp;

  PerturbedOrbitState s;
  s.phi = phi;
  s.perturbative = rs / p <= 1e-6;

  s.r_kepler = p / q;
  s.r_correction = -0.25 * rs * (6.0 + 3.0 * e * e - e * e * std::cos(2.0 * phi) + 6.0 * e * phi * sp) / (q * q);
  s.r = s.r_kepler + s.r_correction;
  s.inverse_radius = q / p + 1.5 * rs / (p * p) *
                                 (1.0 + 0.5 * e * e - e * e / 6.0 * std::cos(2.0 * phi) + e * phi * sp);

  // Proper-time radial velocity.
  const double rdot_tau_kepler = L * e / p * sp;
  const double rdot_tau_corr =
      -L * 1.5 * rs * e / (p * p) * (e / 3.0 * std::sin(2.0 * phi) + sp + phi * cp);

  // Conserved energy per unit rest energy, fixed at the Kepler periapsis.
  // Differences from 1 are formed directly to keep them exact at O(r_S).
  const double rp = p / (1.0 + e);
  const double b = rs * (1.0 + e) * (1.0 + e) / (2.0 * p);
  const double energy_m1 = std::expm1(0.5 * std::log1p(b - rs / rp - rs / rp * b));
  const double lapse_m1 = (-rs / s.r - energy_m1) / (1.0 + energy_m1);
  const double lapse = 1.0 + lapse_m1;

  s.r_dot_kepler = rdot_tau_kepler;
  s.phi_dot_kepler = L / (s.r_kepler * s.r_kepler);
  s.r_dot_correction = rdot_tau_corr * lapse + rdot_tau_kepler * lapse_m1;
  s.phi_dot_correction =
      -L * s.r_correction * (s.r + s.r_kepler) / (s.r * s.r * s.r_kepler * s.r_kepler) * lapse +
      s.phi_dot_kepler * lapse_m1;
  s.r_dot = s.r_dot_kepler + s.r_dot_correction;
  s.phi_dot = s.phi_dot_kepler + s.phi_dot_correction;
  return s;
}

}  // namespace relshift
