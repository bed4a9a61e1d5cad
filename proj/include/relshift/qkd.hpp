#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "relshift/core.hpp"
#include "relshift/redshift.hpp"

namespace relshift {

/// Gaussian signal: carrier omega0, width sigma, bandwidth sigma*sqrt(ln 4).
class SignalSpec {
 public:
  /// 1550 nm carrier.
  static constexpr double kTelecomCarrier = 2.0 * std::numbers::pi * 299792458.0 / 1550e-9;

  static SignalSpec from_ratio(double ratio_R, double eta0 = 0.4, double omega0 = kTelecomCarrier) {
    if (!(ratio_R > 0.0) || !(omega0 > 0.0)) throw DomainError("signal ratio and carrier must be positive");
    return SignalSpec(omega0, omega0 / ratio_R / std::sqrt(std::log(4.0)), eta0);
  }

  static SignalSpec from_width(double omega0, double sigma, double eta0 = 0.4) {
    if (!(sigma > 0.0) || !(omega0 > 0.0)) throw DomainError("signal width and carrier must be positive");
    return SignalSpec(omega0, sigma, eta0);
  }

  double omega0() const { return omega0_; }
  double sigma() const { return sigma_; }
  double delta_nu() const { return sigma_ * std::sqrt(std::log(4.0)); }
  double ratio_R() const { return omega0_ / delta_nu(); }
  double eta0() const { return eta0_; }

 private:
  SignalSpec(double omega0, double sigma, double eta0) : omega0_(omega0), sigma_(sigma), eta0_(eta0) {
    if (!(eta0 > 0.0 && eta0 <= 1.0)) throw DomainError("baseline transmissivity must lie in (0, 1]");
  }
  double omega0_;
  double sigma_;
  double eta0_;
};

inline double gaussian_overlap(double z, const SignalSpec& spec) {
  if (!(z > -1.0)) throw DomainError("redshift must exceed -1");
  const double q = z * (z + 2.0) + 2.0;
  const double w = spec.omega0() / spec.sigma();
  return std::sqrt(2.0 * (z + 1.0) / q) * std::exp(-w * w * z * z / (4.0 * q));
}

inline double gaussian_overlap_approx(double z, double ratio_R) {
  const double rz = ratio_R * z;
  return std::exp2(-rz * rz / 4.0);
}

inline double plob_bound(double eta) {
  if (!(eta >= 0.0) || !(eta < 1.0)) throw DomainError("transmissivity must lie in [0, 1)");
  return -std::log1p(-eta) / std::numbers::ln2;
}

inline double plob_small_z(double z, double ratio_R, double eta0) {
  const double rz = ratio_R * z;
  return plob_bound(eta0) - eta0 / (1.0 - eta0) * rz * rz / 4.0;
}

enum class CorrectionMode { Corrected, Uncorrected };

struct CapacitySample {
  double t_e = 0.0;
  std::optional<double> gamma;
  std::optional<double> eta;
  std::optional<double> plob_bits;
};

inline CapacitySample capacity_at(double t_e, double z, bool los, const SignalSpec& spec) {
  CapacitySample s;
  s.t_e = t_e;
  if (!los) return s;
  s.gamma = gaussian_overlap(z, spec);
  s.eta = spec.eta0() * *s.gamma;
  s.plob_bits = plob_bound(*s.eta);
  return s;
}

inline std::vector<CapacitySample> capacity_timeseries(const std::vector<ShiftBreakdown>& breakdowns,
                                                       const SignalSpec& spec, CorrectionMode mode) {
  std::vector<CapacitySample> out;
  out.reserve(breakdowns.size());
  for (const auto& b : breakdowns)
    out.push_back(capacity_at(b.t_e, mode == CorrectionMode::Corrected ? b.z_corr : b.z_total, b.los, spec));
  return out;
}

}  // namespace relshift
