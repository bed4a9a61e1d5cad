#pragma once

#include <cmath>
#include <limits>

#include "relshift/core.hpp"
#include "relshift/orbits.hpp"

namespace relshift {

/// False iff the chord rA-rB passes strictly inside the sphere of the given
/// radius at a point strictly between its endpoints.
inline bool line_of_sight(const Vec3& rA, const Vec3& rB, double occluder_radius) {
  // Endpoints sitting on the sphere (ground stations) are admitted.
  const double floor = occluder_radius * (1.0 - 1e-12);
  if (norm(rA) < floor || norm(rB) < floor)
    throw DomainError("line-of-sight endpoint inside the occluding sphere");
  const Vec3 d = rB - rA;
  const double dd = dot(d, d);
  if (dd == 0.0) return true;
  const double s = -dot(rA, d) / dd;
  if (!(s > 0.0 && s < 1.0)) return true;
  return norm(rA + d * s) >= occluder_radius;
}

inline Vec3 unit_ray_instantaneous(const StateVector& emit, const StateVector& recv_instant) {
  const Vec3 d = recv_instant.r - emit.r;
  const double n = norm(d);
  if (n == 0.0) throw DomainError("coincident endpoints have no ray direction");
  return d / n;
}

inline Vec3 unit_ray_retarded_firstorder(const Vec3& N0, const Vec3& v_B0, double c) {
  return N0 * (1.0 - dot(N0, v_B0) / c) + v_B0 / c;
}

struct RetardedReception {
  double t_r = 0.0;
  double delay = 0.0;
  StateVector recv;
  double residual = 0.0;  // c*delay - |r_B(t_r) - r_A| [m]
  int iterations = 0;
};

/// Fixed-point light-time solution in flat spacetime. The delay is iterated as
/// its own variable so that large epochs do not swamp it; once the update falls
/// below the resolution of t_e + delay the result is accepted.
inline RetardedReception retarded_reception(const Trajectory& receiver, const StateVector& emit,
                                            double c = PhysConsts{}.c, double tol_m = 1e-9,
                                            int max_iter = 50) {
  StateVector s = receiver(emit.t);
  double delay = norm(s.r - emit.r) / c;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    s = receiver(emit.t + delay);
    const double dist = norm(s.r - emit.r);
    residual = c * delay - dist;
    const double next = dist / c;
    const double resolution = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(emit.t + delay);
    if (std::abs(residual) < tol_m || std::abs(next - delay) <= resolution) {
      if (delay <= 0.0) throw DomainError("receiver coincides with emission event");
      return {emit.t + delay, delay, s, residual, it};
    }
    delay = next;
  }
  throw NumericError("retarded reception did not converge", residual);
}

struct LinkSample {
  StateVector emit;
  StateVector recv_instant;
  StateVector recv_retarded;
  Vec3 N0;
  Vec3 N_AB;
  double d = 0.0;
  double delay = 0.0;
  bool los = true;
};

inline LinkSample make_link_sample(const Trajectory& emitter, const Trajectory& receiver, double t_e,
                                   const PhysConsts& k, double occluder_radius) {
  LinkSample s;
  s.emit = emitter(t_e);
  s.recv_instant = receiver(t_e);
  s.N0 = unit_ray_instantaneous(s.emit, s.recv_instant);
  s.d = norm(s.recv_instant.r - s.emit.r);
  const RetardedReception rr = retarded_reception(receiver, s.emit, k.c);
  s.recv_retarded = rr.recv;
  s.delay = rr.delay;
  const Vec3 dr = s.recv_retarded.r - s.emit.r;
  s.N_AB = dr / norm(dr);
  s.los = line_of_sight(s.emit.r, s.recv_instant.r, occluder_radius);
  return s;
}

}  // namespace relshift
