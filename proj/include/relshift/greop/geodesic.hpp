#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "relshift/greop/schwarzschild.hpp"
#include "relshift/ode/dop853.hpp"
#include "relshift/orbits.hpp"

namespace relshift::greop {

using Segment = ode::DenseSegment<8>;

struct IntegrationControl {
  double rtol = 1e-12;
  double atol_factor = 1e-12;  // absolute tolerance as a fraction of each component's scale
  std::size_t max_steps = 2000000;
  std::optional<double> stop_time;  // stop once the coordinate time passes this value
};

/// Dense solution of the geodesic equation.
class GeodesicCurve {
 public:
  GeodesicKind kind = GeodesicKind::Timelike;
  std::vector<Segment> segments;
  double max_normalization_drift = 0.0;

  Parametrization param() const {
    return kind == GeodesicKind::Timelike ? Parametrization::ProperTime : Parametrization::Affine;
  }
  bool empty() const { return segments.empty(); }
  double lambda_begin() const { return segments.front().t0; }
  double lambda_end() const { return segments.back().t1; }
  double time_begin() const { return segments.front().r[0][0]; }
  double time_end() const { return segments.back().end()[0]; }

  std::size_t segment_index(double lambda) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), lambda,
                               [](double l, const Segment& s) { return l < s.t1; });
    if (it == segments.end()) return segments.size() - 1;
    return static_cast<std::size_t>(it - segments.begin());
  }

  GeodesicState state(double lambda) const { return segments[segment_index(lambda)](lambda); }
  Event event(double lambda) const { return event_of(state(lambda)); }
  FourVector tangent(double lambda) const { return tangent_of(state(lambda), param()); }

  /// Parameter at which the coordinate time equals t (t increases along the curve).
  double lambda_at_time(double t) const {
    auto it = std::lower_bound(segments.begin(), segments.end(), t,
                               [](const Segment& s, double tt) { return s.end()[0] < tt; });
    if (it == segments.end()) it = segments.end() - 1;
    const Segment& s = *it;
    const double ta = s.r[0][0], tb = s.end()[0];
    double lam = s.t0 + (t - ta) / (tb - ta) * (s.t1 - s.t0);
    for (int i = 0; i < 8; ++i) {
      const double dt = s.component(lam, 0) - t;
      const double step = dt / s.component(lam, 4);
      lam -= step;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lam)) break;
    }
    return lam;
  }
};

inline ode::State<8> component_scales(const Event& x, const FourVector& u, GeodesicKind kind, double c) {
  const double speed = kind == GeodesicKind::Null
                           ? c * std::abs(u[0])
                           : std::max({std::abs(u[1]), x.r * std::abs(u[2]), x.r * std::abs(u[3]), 1.0});
  return {1.0, x.r, 1.0, 1.0, std::abs(u[0]), speed, speed / x.r, speed / x.r};
}

inline double normalization_error(const Schwarzschild& m, const Event& x, const FourVector& u, GeodesicKind kind) {
  const double n = m.norm2(x, u);
  const double c2 = m.c() * m.c();
  if (kind == GeodesicKind::Timelike) return std::abs(n + c2) / c2;
  return std::abs(n) / (c2 * u[0] * u[0]);
}

/// Integrates a geodesic from (x0, u0) over the parameter interval [0, span].
inline GeodesicCurve integrate_geodesic(const Schwarzschild& m, const Event& x0, const FourVector& u0,
                                        GeodesicKind kind, double span, const IntegrationControl& ctl = {}) {
  m.check_exterior(x0.r);
  GeodesicCurve curve;
  curve.kind = kind;
  ode::Dop853Options<8> opt;
  opt.rtol = ctl.rtol;
  opt.max_steps = ctl.max_steps;
  opt.atol = component_scales(x0, u0, kind, m.c());
  for (double& a : opt.atol) a *= ctl.atol_factor;

  const auto rhs = [&m](double, const GeodesicState& y) { return geodesic_rhs(m, y); };
  const auto res = ode::dop853<8>(rhs, 0.0, pack(x0, u0), span, opt, [&](const Segment& seg) {
    curve.segments.push_back(seg);
    const GeodesicState y = seg.end();
    curve.max_normalization_drift = std::max(
        curve.max_normalization_drift, normalization_error(m, event_of(y), tangent_of(y, curve.param()), kind));
    return !(ctl.stop_time && y[0] >= *ctl.stop_time);
  });
  if (res.status == ode::Dop853Status::StepSizeTooSmall)
    throw NumericError("geodesic step size collapsed", res.t);
  if (res.status == ode::Dop853Status::TooManySteps) throw NumericError("geodesic step budget exhausted", res.t);
  return curve;
}

/// Kepler state at t0 lifted to a normalized four-velocity.
inline std::pair<Event, FourVector> timelike_from_kepler(const Schwarzschild& m, const KeplerOrbit& orbit,
                                                         double t0, const PhysConsts& k = {}) {
  const StateVector s = kepler_state(orbit, t0, k);
  const Event x = spherical(t0, s.r);
  return {x, four_velocity(m, x, s.v)};
}

/// A point on an observer worldline: event, four-velocity and the Cartesian view.
struct WorldlinePoint {
  Event x;
  FourVector u;
  Vec3 r;
  Vec3 v;
};

struct Worldline {
  std::function<WorldlinePoint(double)> at;
  double t_min = -std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();

  WorldlinePoint operator()(double t) const { return at(t); }
  bool covers(double t) const { return t >= t_min && t <= t_max; }
};

/// Worldline from a prescribed (not necessarily geodesic) coordinate trajectory.
inline Worldline trajectory_worldline(const Schwarzschild& m, Trajectory traj) {
  return {[m, traj = std::move(traj)](double t) {
    const StateVector s = traj(t);
    const Event x = spherical(t, s.r);
    return WorldlinePoint{x, four_velocity(m, x, s.v), s.r, s.v};
  }};
}

inline Worldline static_worldline(const Schwarzschild& m, const Vec3& position) {
  return trajectory_worldline(m, [position](double t) { return StateVector{t, position, {}, {}}; });
}

/// Free-falling worldline backed by an integrated timelike geodesic. The time
/// and azimuthal four-velocity components are rebuilt from the conserved energy
/// and angular momentum of the initial state, so their accuracy does not decay
/// with integration length.
inline Worldline geodesic_worldline(const Schwarzschild& m, std::shared_ptr<const GeodesicCurve> curve) {
  Worldline w;
  w.t_min = curve->time_begin();
  w.t_max = curve->time_end();
  const GeodesicState y0 = curve->segments.front().start();
  const Event x0 = event_of(y0);
  const FourVector u0 = tangent_of(y0, Parametrization::ProperTime);
  const double energy = m.energy(x0, u0);
  const double ang = m.angular_momentum(x0, u0);
  w.at = [m, curve, energy, ang](double t) {
    const double lam = curve->lambda_at_time(t);
    const GeodesicState y = curve->state(lam);
    Event x = event_of(y);
    x.t = t;
    FourVector u = tangent_of(y, Parametrization::ProperTime);
    const double s = std::sin(x.theta);
    u[0] = energy / m.lapse2(x.r);
    u[3] = ang / (x.r * x.r * s * s);
    return WorldlinePoint{x, u, cartesian(x), cartesian_velocity(x, u)};
  };
  return w;
}

/// Kepler-initialized geodesic worldline covering coordinate times [t0, t_end].
inline Worldline kepler_geodesic_worldline(const Schwarzschild& m, const KeplerOrbit& orbit, double t0,
                                           double t_end, const PhysConsts& k = {}, IntegrationControl ctl = {}) {
  const auto [x0, u0] = timelike_from_kepler(m, orbit, t0, k);
  ctl.stop_time = t_end;
  // Proper time runs slightly slower than coordinate time; the stop time ends the run.
  const double span = (t_end - t0) * 1.01 + 1.0;
  auto curve = std::make_shared<GeodesicCurve>(integrate_geodesic(m, x0, u0, GeodesicKind::Timelike, span, ctl));
  return geodesic_worldline(m, std::move(curve));
}

/// Linear interpolation through worldline samples (sorted by time).
inline Worldline sampled_worldline(std::vector<WorldlinePoint> samples) {
  Worldline w;
  w.t_min = samples.front().x.t;
  w.t_max = samples.back().x.t;
  auto data = std::make_shared<const std::vector<WorldlinePoint>>(std::move(samples));
  w.at = [data](double t) {
    const auto& s = *data;
    auto it = std::lower_bound(s.begin(), s.end(), t, [](const WorldlinePoint& p, double tt) { return p.x.t < tt; });
    if (it == s.begin()) it = s.begin() + 1;
    if (it == s.end()) it = s.end() - 1;
    const WorldlinePoint& a = *(it - 1);
    const WorldlinePoint& b = *it;
    const double f = (t - a.x.t) / (b.x.t - a.x.t);
    WorldlinePoint p;
    p.r = a.r + (b.r - a.r) * f;
    p.v = (b.r - a.r) / (b.x.t - a.x.t);
    p.x = spherical(t, p.r);
    for (std::size_t i = 0; i < 4; ++i) p.u[i] = a.u[i] + (b.u[i] - a.u[i]) * f;
    return p;
  };
  return w;
}

}  // namespace relshift::greop
