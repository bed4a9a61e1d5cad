#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/tools/toms748_solve.hpp>

#include "relshift/greop/geodesic.hpp"
#include "relshift/greop/tetrad.hpp"
#include "relshift/optim/differential_evolution.hpp"

namespace relshift::greop {

struct ClosestApproach {
  double distance = std::numeric_limits<double>::infinity();
  double lambda = 0.0;      // ray parameter
  double t = 0.0;           // coordinate time of the slice
  bool interior = false;    // minimum lies strictly inside the overlap
  WorldlinePoint receiver;  // receiver at time t
};

namespace detail {

inline double refine_root(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  boost::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

/// Sample parameters at quarter steps of every segment, restricted to a time window.
inline std::vector<double> sample_parameters(const GeodesicCurve& ray, double t_lo, double t_hi) {
  std::vector<double> out;
  for (const Segment& s : ray.segments) {
    for (int j = 0; j < 4; ++j) {
      const double lam = s.t0 + 0.25 * j * (s.t1 - s.t0);
      const double t = s.component(lam, 0);
      if (t >= t_lo && t <= t_hi) out.push_back(lam);
    }
  }
  const Segment& last = ray.segments.back();
  if (const double t = last.end()[0]; t >= t_lo && t <= t_hi) out.push_back(last.t1);
  return out;
}

}  // namespace detail

/// Minimum Euclidean separation, within t = const slices, between a ray and a receiver worldline.
inline ClosestApproach closest_approach(const GeodesicCurve& ray, const Worldline& recv) {
  if (ray.empty()) throw DomainError("closest approach needs a non-empty ray");
  const double t_lo = std::max(ray.time_begin(), recv.t_min);
  const double t_hi = std::min(ray.time_end(), recv.t_max);
  if (!(t_lo <= t_hi)) throw DomainError("ray and receiver worldline do not overlap in time");
  std::vector<double> lams = detail::sample_parameters(ray, t_lo, t_hi);
  if (lams.empty()) lams.push_back(ray.lambda_at_time(t_lo));

  // Half the derivative of the squared distance with respect to coordinate time.
  auto slope = [&](double lam) {
    const GeodesicState y = ray.state(lam);
    const Event x = event_of(y);
    const WorldlinePoint p = recv(x.t);
    const Vec3 vr = cartesian_velocity(x, tangent_of(y, Parametrization::Affine));
    return dot(cartesian(x) - p.r, vr - p.v);
  };

  std::size_t hit = lams.size();
  double g_prev = slope(lams[0]);
  double lam_min = lams[0];
  const double g_first = g_prev;
  bool interior = false;
  for (std::size_t i = 1; i < lams.size(); ++i) {
    const double g = slope(lams[i]);
    if (g_prev < 0.0 && g >= 0.0) {
      hit = i;
      lam_min = detail::refine_root(slope, lams[i - 1], lams[i], g_prev, g);
      interior = true;
      break;
    }
    g_prev = g;
  }
  if (hit == lams.size()) lam_min = g_first >= 0.0 ? lams.front() : lams.back();

  ClosestApproach ca;
  const Event x = ray.event(lam_min);
  ca.lambda = lam_min;
  ca.t = x.t;
  ca.receiver = recv(x.t);
  ca.distance = norm(cartesian(x) - ca.receiver.r);
  ca.interior = interior;
  return ca;
}

struct RayRadius {
  double min_radius = 0.0;                  // over the whole traversed part, endpoints included
  std::optional<double> turning_radius;     // interior minimum where the radial component changes sign
};

/// Radial extent of the ray up to parameter lambda_end.
inline RayRadius ray_radius(const GeodesicCurve& ray, double lambda_end) {
  RayRadius out;
  out.min_radius = ray.segments.front().r[0][1];
  for (const Segment& s : ray.segments) {
    if (s.t0 > lambda_end) break;
    const double b = std::min(s.t1, lambda_end);
    out.min_radius = std::min({out.min_radius, s.component(s.t0, 1), s.component(b, 1)});
    const double ka = s.component(s.t0, 5), kb = s.component(b, 5);
    if (ka < 0.0 && kb >= 0.0) {
      const double lam = detail::refine_root([&](double l) { return s.component(l, 5); }, s.t0, b, ka, kb);
      const double r = s.component(lam, 1);
      out.min_radius = std::min(out.min_radius, r);
      out.turning_radius = r;
    }
  }
  return out;
}

struct EopOptions {
  double threshold = 1.0;
  optim::DeConfig de{};
  double shrink = 0.7;
  double bound_safety = 4.0;
  std::optional<std::array<double, 2>> warm_start;  // celestial angles to centre the search on
  double warm_half_width = 1e-5;
  double occlusion_radius = PhysConsts{}.R_E;
  IntegrationControl ray_control{};
};

struct EopSolution {
  Event emit_event;
  Event recv_event;
  FourVector u_emit, u_recv;
  FourVector k_emit, k_recv;
  GeodesicCurve null_curve;
  double recv_lambda = 0.0;
  std::array<double, 2> celestial_angles{};
  double closest_distance = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  double redshift = 0.0;
  double delay = 0.0;
  double min_radius = 0.0;
  bool converged = false;
  bool occluded = false;
};

/// Light time from a fixed emission point to a moving receiver, straight-line estimate.
inline double flat_delay(const Worldline& recv, const Vec3& emit_pos, double t_e, double c) {
  double delay = norm(recv(t_e).r - emit_pos) / c;
  for (int i = 0; i < 8; ++i) delay = norm(recv(t_e + delay).r - emit_pos) / c;
  return delay;
}

/// Launch angles of the coordinate straight line towards the flat-space reception point.
inline std::array<double, 2> flat_launch_angles(const Schwarzschild& m, const Tetrad& frame, const WorldlinePoint& emit,
                                                const Worldline& recv) {
  const double delay = flat_delay(recv, emit.r, emit.x.t, m.c());
  const Vec3 n = (recv(emit.x.t + delay).r - emit.r) / (m.c() * delay);
  const auto rates = spherical_rates(emit.x, n);
  const auto g = m.metric(emit.x);
  const double s2 = g[1] * rates[0] * rates[0] + g[2] * rates[1] * rates[1] + g[3] * rates[2] * rates[2];
  const double speed = std::sqrt(-g[0] / s2);
  const FourVector k{{1.0, speed * rates[0], speed * rates[1], speed * rates[2]}, Parametrization::Affine};
  return wavevector_to_celestial(m, frame, k);
}

inline GeodesicCurve shoot_ray(const Schwarzschild& m, const Tetrad& frame, double phi_c, double psi_c,
                               double t_stop, const IntegrationControl& ctl) {
  IntegrationControl c = ctl;
  c.stop_time = t_stop;
  const FourVector k = celestial_to_wavevector(frame, phi_c, psi_c);
  const double span = (t_stop - frame.x.t) * 1.001 + 1e-6;
  return integrate_geodesic(m, frame.x, k, GeodesicKind::Null, span, c);
}

/// Receiver-side wavevector: conserved energy and azimuthal momentum from the
/// emission end, radial and polar components from the integrated tangent.
inline FourVector received_wavevector(const Schwarzschild& m, const Event& x_emit, const FourVector& k_emit,
                                      const Event& x_recv, const FourVector& k_integrated) {
  FourVector k = k_integrated;
  const double s = std::sin(x_recv.theta);
  k[0] = m.energy(x_emit, k_emit) / m.lapse2(x_recv.r);
  k[3] = m.angular_momentum(x_emit, k_emit) / (x_recv.r * x_recv.r * s * s);
  return k;
}

/// Emitter-observer problem: finds the null geodesic from the emission event
/// that meets the receiver worldline, by differential evolution over the
/// celestial angles of the emitter's local frame.
inline EopSolution solve_eop(const Schwarzschild& m, const WorldlinePoint& emit, const Worldline& recv,
                             const EopOptions& opt = {}) {
  if (!(opt.threshold > 0.0)) throw DomainError("closest-approach threshold must be positive");
  const Tetrad frame = make_tetrad(m, emit.x, emit.u);
  const double delay_est = flat_delay(recv, emit.r, emit.x.t, m.c());
  const double t_stop = emit.x.t + delay_est * (1.0 + 1e-3) + 1e-4;
  if (!recv.covers(emit.x.t + delay_est)) throw DomainError("receiver worldline does not cover the reception time");
  const double path = m.c() * delay_est;

  auto objective = [&](const optim::Point<2>& a) {
    try {
      const GeodesicCurve ray = shoot_ray(m, frame, a[0], a[1], t_stop, opt.ray_control);
      return closest_approach(ray, recv).distance;
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  constexpr double pi = std::numbers::pi;
  optim::Box<2> box{{-pi, -pi / 2.0}, {pi, pi / 2.0}};
  if (opt.warm_start) {
    const auto& w = *opt.warm_start;
    box = {{w[0] - opt.warm_half_width, std::max(-pi / 2.0, w[1] - opt.warm_half_width)},
           {w[0] + opt.warm_half_width, std::min(pi / 2.0, w[1] + opt.warm_half_width)}};
  }
  auto rebox = [&](const optim::Point<2>& best, double value, const optim::Box<2>& cur) {
    optim::Box<2> nb;
    for (std::size_t i = 0; i < 2; ++i) {
      const double hw = 0.5 * (cur.hi[i] - cur.lo[i]);
      const double wanted = std::min(hw, std::max(opt.shrink * hw, opt.bound_safety * value / path));
      nb.lo[i] = best[i] - wanted;
      nb.hi[i] = best[i] + wanted;
    }
    nb.lo[1] = std::max(nb.lo[1], -pi / 2.0);
    nb.hi[1] = std::min(nb.hi[1], pi / 2.0);
    return nb;
  };

  optim::DeConfig de = opt.de;
  de.target = opt.threshold;
  std::optional<optim::Point<2>> initial;
  if (opt.warm_start) initial = *opt.warm_start;
  const auto res = optim::differential_evolution<2>(objective, box, de, rebox, initial);

  EopSolution sol;
  sol.emit_event = emit.x;
  sol.u_emit = emit.u;
  sol.celestial_angles = res.best;
  sol.iterations = res.generations;
  sol.evaluations = res.evaluations;
  sol.converged = res.converged;
  sol.k_emit = celestial_to_wavevector(frame, res.best[0], res.best[1]);
  sol.null_curve = shoot_ray(m, frame, res.best[0], res.best[1], t_stop, opt.ray_control);
  const ClosestApproach ca = closest_approach(sol.null_curve, recv);
  sol.closest_distance = ca.distance;
  sol.recv_lambda = ca.lambda;
  sol.recv_event = sol.null_curve.event(ca.lambda);
  sol.u_recv = ca.receiver.u;
  sol.k_recv = received_wavevector(m, emit.x, sol.k_emit, sol.recv_event,
                                   sol.null_curve.tangent(ca.lambda));
  sol.delay = sol.recv_event.t - emit.x.t;
  const RayRadius extent = ray_radius(sol.null_curve, ca.lambda);
  sol.min_radius = extent.min_radius;
  // Endpoints sit on or above the occluder by construction; only an interior
  // turning point below its surface blocks the ray.
  sol.occluded = extent.turning_radius && *extent.turning_radius < opt.occlusion_radius;
  sol.redshift = gr_redshift(m, sol.emit_event, sol.u_emit, sol.k_emit, sol.recv_event, sol.u_recv, sol.k_recv);
  return sol;
}

}  // namespace relshift::greop
