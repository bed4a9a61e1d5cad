#pragma once

#include <cmath>

#include "relshift/core.hpp"
#include "relshift/linkgeo.hpp"
#include "relshift/orbits.hpp"

namespace relshift {

enum class LinkDirection { Uplink, Downlink };

/// Exact flat-space longitudinal shift at the retarded reception event.
inline double z_longitudinal_exact(const LinkSample& link, double c = PhysConsts{}.c) {
  const Vec3 dv = link.recv_retarded.v - link.emit.v;
  const double n_dv = dot(link.N_AB, dv);
  return n_dv / c + n_dv * dot(link.N_AB, link.recv_retarded.v) / (c * c);
}

/// The quadratic part of z_longitudinal_exact alone.
inline double z_longitudinal_quadratic(const LinkSample& link, double c = PhysConsts{}.c) {
  const Vec3 dv = link.recv_retarded.v - link.emit.v;
  return dot(link.N_AB, dv) * dot(link.N_AB, link.recv_retarded.v) / (c * c);
}

inline double z_long_instant(const StateVector& emitA, const StateVector& recvB, double c = PhysConsts{}.c) {
  return dot(unit_ray_instantaneous(emitA, recvB), recvB.v - emitA.v) / c;
}

inline double z_retardation(const StateVector& emitA, const StateVector& recvB, double d,
                            double c = PhysConsts{}.c) {
  if (!recvB.a) throw DomainError("retardation term needs the receiver acceleration");
  const Vec3 N0 = unit_ray_instantaneous(emitA, recvB);
  const Vec3 dv = recvB.v - emitA.v;
  return (dot(recvB.v, dv) - dot(N0, dv) * dot(N0, recvB.v) + d * dot(*recvB.a, N0)) / (c * c);
}

inline double z_rel_instant(const StateVector& emitA, const StateVector& recvB, const PhysConsts& k = {}) {
  const double kinetic = 0.5 * (dot(emitA.v, emitA.v) - dot(recvB.v, recvB.v));
  const double potential = k.GM * (1.0 / norm(emitA.r) - 1.0 / norm(recvB.r));
  return (kinetic + potential) / (k.c * k.c);
}

inline double z_correction(double z_ret, double z_rel0) { return z_ret + z_rel0; }

inline double z_rel_kepler(const KeplerOrbit& orbitA, const KeplerOrbit& orbitB, double rA, double rB,
                           const PhysConsts& k = {}) {
  vis_viva_speed(orbitA, rA, k);
  vis_viva_speed(orbitB, rB, k);
  return k.GM / (k.c * k.c) *
         (2.0 / rA - 2.0 / rB - 1.0 / (2.0 * orbitA.a) + 1.0 / (2.0 * orbitB.a));
}

/// Ground station at one end of the link; Uplink means the station emits.
inline double z_rel_ground(const GroundStation& gs, const KeplerOrbit& orbitB, double rB,
                           const PhysConsts& k = {}, LinkDirection dir = LinkDirection::Uplink) {
  vis_viva_speed(orbitB, rB, k);
  const double w = k.omega_E * gs.radius;
  const double z = w * w / (2.0 * k.c * k.c) +
                   k.GM / (k.c * k.c) * (1.0 / gs.radius + 1.0 / (2.0 * orbitB.a) - 2.0 / rB);
  return dir == LinkDirection::Uplink ? z : -z;
}

/// Radius of the circular orbit whose relativistic shift against a ground station vanishes.
inline double zero_shift_radius(const PhysConsts& k = {}) {
  const double w = k.omega_E * k.R_E;
  return 1.5 / (w * w / (2.0 * k.GM) + 1.0 / k.R_E);
}

/// Gravitational parts of z_rel0 + z_ret for a radial configuration, in units of 1/c^2:
/// GM(1/r_A - 1/r_B) + d*(a_B.N0) with a_B = -GM r_B/|r_B|^3 and N0.r_B/|r_B| = radial_sign.
inline double radial_gravity_terms(double r_A, double r_B, double d, double radial_sign,
                                   const PhysConsts& k = {}) {
  if (std::abs(std::abs(radial_sign) - 1.0) > 1e-12)
    throw DomainError("limit-case evaluation needs a radial configuration");
  return k.GM * (1.0 / r_A - 1.0 / r_B - d * radial_sign / (r_B * r_B));
}

/// Same quantity from actual states, with the radial condition checked.
inline double radial_gravity_terms(const StateVector& emitA, const StateVector& recvB,
                                   const PhysConsts& k = {}) {
  const Vec3 N0 = unit_ray_instantaneous(emitA, recvB);
  const double rB = norm(recvB.r);
  return radial_gravity_terms(norm(emitA.r), rB, norm(recvB.r - emitA.r), dot(N0, recvB.r) / rB, k);
}

enum class LimitRegime { Near, Far };

struct LimitCaseResult {
  double r_A = 0.0, r_B = 0.0, d = 0.0;
  double gravity_sum = 0.0;   // GM-terms of z_rel0 + z_ret times c^2
  double leading_term = 0.0;  // the expansion's leading value, same units
  double coefficient = 0.0;   // gravity_sum scaled by the regime's natural unit
  double receiver_residual_fraction = 0.0;  // far regime only
};

/// Evaluates the radial limit cases. Near: r_B = r_ref, d = ratio*r_B,
/// r_A = r_B - d. Far: r_A = r_ref, r_B = ratio*r_A, d = r_B - r_A.
/// The downlink cases reverse the sign of N0 along r_B at the same radii.
/// Near-uplink coefficient is sum/(GM/r_B*(d/r_B)^2); near-downlink is
/// sum/(GM*d/r_B^2); far is sum/(GM/r_A).
inline LimitCaseResult limit_case_gravity(LinkDirection dir, LimitRegime regime, double ratio,
                                          double r_ref, const PhysConsts& k = {}) {
  LimitCaseResult out;
  const double sign = dir == LinkDirection::Uplink ? 1.0 : -1.0;
  if (regime == LimitRegime::Near) {
    out.r_B = r_ref;
    out.d = ratio * r_ref;
    out.r_A = out.r_B - out.d;
  } else {
    out.r_A = r_ref;
    out.r_B = ratio * r_ref;
    out.d = out.r_B - out.r_A;
  }
  out.gravity_sum = radial_gravity_terms(out.r_A, out.r_B, out.d, sign, k);
  const double rb2 = out.r_B * out.r_B;
  if (regime == LimitRegime::Near) {
    out.leading_term = dir == LinkDirection::Uplink ? 0.0 : 2.0 * k.GM * out.d / rb2;
    const double x = out.d / out.r_B;
    out.coefficient = dir == LinkDirection::Uplink ? out.gravity_sum / (k.GM / out.r_B * x * x)
                                                   : out.gravity_sum / (k.GM * out.d / rb2);
  } else {
    out.leading_term = dir == LinkDirection::Uplink ? k.GM * (1.0 / out.r_A - 2.0 / out.r_B)
                                                    : k.GM / out.r_A;
    out.coefficient = out.gravity_sum / (k.GM / out.r_A);
    // Receiver-side terms: -GM/r_B from the potential and the acceleration term.
    const double receiver = -k.GM / out.r_B - sign * k.GM * out.d / rb2;
    out.receiver_residual_fraction = std::abs(receiver) / (k.GM / out.r_B);
  }
  return out;
}

struct ShiftBreakdown {
  double t_e = 0.0;
  double z_long0 = 0.0;
  double z_ret = 0.0;
  double z_rel0 = 0.0;
  double z_corr = 0.0;
  double z_long_exact = 0.0;
  double z_total = 0.0;
  double z_rel = 0.0;             // relativistic part at emission / retarded reception
  double z_long_quadratic = 0.0;  // second-order part of z_long_exact
  double delay = 0.0;
  bool los = true;
};

struct Link {
  Endpoint emitter;
  Endpoint receiver;
  PhysConsts consts;
  double occlusion_radius = PhysConsts{}.R_E;
};

inline ShiftBreakdown shift_breakdown(const Link& link, double t_e) {
  const PhysConsts& k = link.consts;
  const LinkSample s = make_link_sample(endpoint_trajectory(link.emitter, k),
                                        endpoint_trajectory(link.receiver, k), t_e, k,
                                        link.occlusion_radius);
  ShiftBreakdown b;
  b.t_e = t_e;
  b.los = s.los;
  b.delay = s.delay;
  b.z_long0 = z_long_instant(s.emit, s.recv_instant, k.c);
  b.z_ret = z_retardation(s.emit, s.recv_instant, s.d, k.c);
  b.z_rel0 = z_rel_instant(s.emit, s.recv_instant, k);
  b.z_corr = z_correction(b.z_ret, b.z_rel0);
  b.z_long_exact = z_longitudinal_exact(s, k.c);
  b.z_long_quadratic = z_longitudinal_quadratic(s, k.c);
  b.z_rel = z_rel_instant(s.emit, s.recv_retarded, k);
  b.z_total = b.z_long_exact + b.z_rel;
  return b;
}

}  // namespace relshift
