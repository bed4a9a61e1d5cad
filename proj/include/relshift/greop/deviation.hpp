#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "relshift/greop/eop.hpp"
#include "relshift/parallel.hpp"
#include "relshift/redshift.hpp"

namespace relshift::greop {

struct GrOptions {
  double threshold = 1e-3;  // meters; a 1 m miss moves z by up to about 1e-12 on LEO links
  optim::DeConfig de{};
  bool warm_start = true;
  std::size_t block_size = 32;
  std::uint64_t seed = 0;
  IntegrationControl orbit_control{};
  IntegrationControl ray_control{};
};

struct GrEpoch {
  double t_e = 0.0;
  double z_gr = std::numeric_limits<double>::quiet_NaN();
  double delay = 0.0;
  double closest_distance = std::numeric_limits<double>::infinity();
  double min_radius = 0.0;
  bool occluded = false;
  bool converged = false;
  std::size_t generations = 0;
  std::size_t evaluations = 0;
  std::array<double, 2> angles{};
  std::array<double, 2> flat_angles{};
  std::string error;

  bool ok() const { return error.empty(); }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t epoch_seed(std::uint64_t seed, std::size_t index) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
}

inline double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

/// Full GR treatment of a link: free-falling endpoints follow integrated
/// geodesics from their Kepler state at the span start, ground stations follow
/// their prescribed rotation, and each epoch solves the emitter-observer problem.
class GrEngine {
 public:
  GrEngine(const Link& link, double t_begin, double t_end, GrOptions opt = {})
      : metric_(link.consts), link_(link), opt_(std::move(opt)) {
    if (!(t_end >= t_begin)) throw DomainError("GR span must not be reversed");
    // Covers the light time of the last epoch.
    const double t_cover = t_end + 10.0;
    emitter_ = make_worldline(link.emitter, t_begin, t_cover);
    receiver_ = make_worldline(link.receiver, t_begin, t_cover);
  }

  const Schwarzschild& metric() const { return metric_; }
  const Worldline& emitter() const { return emitter_; }
  const Worldline& receiver() const { return receiver_; }
  const GrOptions& options() const { return opt_; }

  /// Solves one epoch. A previous solution narrows the search to the previous
  /// angles shifted by the change of the straight-line launch direction.
  GrEpoch solve(double t_e, std::uint64_t seed, const GrEpoch* previous = nullptr) const {
    GrEpoch out;
    out.t_e = t_e;
    try {
      if (!emitter_.covers(t_e)) throw DomainError("emission time outside the integrated span");
      const WorldlinePoint emit = emitter_(t_e);
      const Tetrad frame = make_tetrad(metric_, emit.x, emit.u);
      out.flat_angles = flat_launch_angles(metric_, frame, emit, receiver_);

      EopOptions eo;
      eo.threshold = opt_.threshold;
      eo.de = opt_.de;
      eo.de.seed = seed;
      eo.occlusion_radius = link_.occlusion_radius;
      eo.ray_control = opt_.ray_control;
      std::optional<EopSolution> sol;
      if (opt_.warm_start && previous && previous->ok() && previous->converged) {
        eo.warm_start = std::array<double, 2>{
            wrap_angle(previous->angles[0] + wrap_angle(out.flat_angles[0] - previous->flat_angles[0])),
            previous->angles[1] + (out.flat_angles[1] - previous->flat_angles[1])};
        sol = solve_eop(metric_, emit, receiver_, eo);
        if (!sol->converged) sol.reset();
      }
      if (!sol) {
        eo.warm_start.reset();
        sol = solve_eop(metric_, emit, receiver_, eo);
      }
      out.z_gr = sol->redshift;
      out.delay = sol->delay;
      out.closest_distance = sol->closest_distance;
      out.min_radius = sol->min_radius;
      out.occluded = sol->occluded;
      out.converged = sol->converged;
      out.generations = sol->iterations;
      out.evaluations = sol->evaluations;
      out.angles = sol->celestial_angles;
      if (!sol->converged) out.error = "closest approach above threshold";
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    return out;
  }

  /// Solves all epochs. Warm-start chains run inside fixed blocks, so the
  /// result does not depend on the worker count.
  std::vector<GrEpoch> sweep(const std::vector<double>& epochs, std::size_t workers = 1) const {
    std::vector<GrEpoch> out(epochs.size());
    parallel_blocks(epochs.size(), opt_.block_size, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
      const GrEpoch* prev = nullptr;
      for (std::size_t i = begin; i < end; ++i) {
        out[i] = solve(epochs[i], epoch_seed(opt_.seed, i), prev);
        prev = &out[i];
      }
    });
    return out;
  }

 private:
  Worldline make_worldline(const Endpoint& ep, double t_begin, double t_end) const {
    if (const auto* orbit = std::get_if<KeplerOrbit>(&ep))
      return kepler_geodesic_worldline(metric_, *orbit, t_begin, t_end, link_.consts, opt_.orbit_control);
    return trajectory_worldline(metric_, endpoint_trajectory(ep, link_.consts));
  }

  Schwarzschild metric_;
  Link link_;
  GrOptions opt_;
  Worldline emitter_;
  Worldline receiver_;
};

struct DeviationRecord {
  double t_e = 0.0;
  double z_gr = std::numeric_limits<double>::quiet_NaN();
  double z_approx = 0.0;
  double deviation = std::numeric_limits<double>::quiet_NaN();
  bool los = true;
  bool occluded = false;
  std::string error;
};

/// Distance from the occluder centre to the straight chord between emitter and receiver.
inline double chord_clearance(const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double s = std::clamp(-dot(a, d) / dot(d, d), 0.0, 1.0);
  return norm(a + d * s);
}

/// Extra epochs around the instants where the chord passes closest to the
/// centre inside every non-LOS gap of the sampled epochs. Offsets are
/// (j + 1/2) * step for j = -per_side .. per_side - 1.
inline std::vector<double> occluded_transit_epochs(const Link& link, const std::vector<double>& epochs,
                                                   double step = 0.5, int per_side = 3) {
  const PhysConsts& k = link.consts;
  const Trajectory ea = endpoint_trajectory(link.emitter, k);
  const Trajectory eb = endpoint_trajectory(link.receiver, k);
  auto clearance = [&](double t) { return chord_clearance(ea(t).r, eb(t).r); };
  auto los = [&](double t) { return line_of_sight(ea(t).r, eb(t).r, link.occlusion_radius); };

  std::vector<double> extra;
  std::size_t i = 0;
  while (i < epochs.size()) {
    if (los(epochs[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < epochs.size() && !los(epochs[j + 1])) ++j;
    const double lo = i > 0 ? epochs[i - 1] : epochs[i];
    const double hi = j + 1 < epochs.size() ? epochs[j + 1] : epochs[j];
    // Coarse scan, then golden-section refinement of the clearance minimum.
    const int n = std::max(8, static_cast<int>((hi - lo) / 5.0));
    double best_t = lo, best_c = clearance(lo);
    for (int q = 1; q <= n; ++q) {
      const double t = lo + (hi - lo) * q / n;
      if (const double c = clearance(t); c < best_c) best_c = c, best_t = t;
    }
    double a = std::max(lo, best_t - (hi - lo) / n), b = std::min(hi, best_t + (hi - lo) / n);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100 && b - a > 1e-6; ++it) {
      const double x1 = b - g * (b - a), x2 = a + g * (b - a);
      if (clearance(x1) < clearance(x2)) b = x2;
      else a = x1;
    }
    const double centre = 0.5 * (a + b);
    for (int q = -per_side; q < per_side; ++q) {
      const double t = centre + (q + 0.5) * step;
      if (t >= epochs.front() && t <= epochs.back() && !los(t)) extra.push_back(t);
    }
    i = j + 1;
  }
  return extra;
}

/// GR redshift against the analytic total at every epoch.
inline std::vector<DeviationRecord> deviation_analysis(const Link& link, const std::vector<double>& epochs,
                                                       const GrOptions& opt = {}, std::size_t workers = 1) {
  if (epochs.empty()) return {};
  const auto [lo, hi] = std::minmax_element(epochs.begin(), epochs.end());
  const GrEngine engine(link, *lo, *hi, opt);
  const std::vector<GrEpoch> gr = engine.sweep(epochs, workers);
  std::vector<DeviationRecord> out(epochs.size());
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const ShiftBreakdown b = shift_breakdown(link, epochs[i]);
    DeviationRecord& r = out[i];
    r.t_e = epochs[i];
    r.z_approx = b.z_total;
    r.los = b.los;
    r.z_gr = gr[i].z_gr;
    r.occluded = gr[i].occluded;
    r.error = gr[i].error;
    if (gr[i].ok()) r.deviation = r.z_gr - r.z_approx;
  }
  return out;
}

}  // namespace relshift::greop
