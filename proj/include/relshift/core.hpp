#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace relshift {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an iterative method fails; carries the last residual.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

struct PhysConsts {
  double GM = 3.986004418e14;
  double c = 299792458.0;
  double R_E = 6378137.0;
  double omega_E = 2.0 * std::numbers::pi / 86400.0;

  double r_S() const { return 2.0 * GM / (c * c); }

  void validate() const {
    if (!(GM > 0.0) || !(c > 0.0) || !(R_E > 0.0) || !(omega_E > 0.0))
      throw DomainError("physical constants must be strictly positive");
  }

  bool operator==(const PhysConsts&) const = default;
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::hypot(a.x, a.y, a.z); }

/// Newtonian kinematic state of a link endpoint in the equatorial frame.
struct StateVector {
  double t = 0.0;
  Vec3 r;
  Vec3 v;
  std::optional<Vec3> a;
};

/// Solves M = E - ecc*sin(E) for E. Continuous in M across periods.
inline double solve_kepler(double mean_anomaly, double ecc) {
  if (!(ecc >= 0.0) || ecc >= 1.0)
    throw DomainError("eccentricity must lie in [0, 1)");
  if (!std::isfinite(mean_anomaly)) throw DomainError("mean anomaly must be finite");
  if (ecc == 0.0) return mean_anomaly;

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double turns = std::round(mean_anomaly / two_pi);
  const double m = mean_anomaly - turns * two_pi;

  // E - m = ecc*sin(E) keeps E inside [m - ecc, m + ecc].
  double lo = m - ecc, hi = m + ecc;
  double e = m + ecc * std::sin(m);
  double f = e - ecc * std::sin(e) - m;
  for (int it = 0; it < 200 && std::abs(f) > 1e-15; ++it) {
    if (f > 0.0) hi = e; else lo = e;
    double next = e - f / (1.0 - ecc * std::cos(e));
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool stalled = next == e;
    e = next;
    f = e - ecc * std::sin(e) - m;
    if (stalled) break;
  }
  if (!(std::abs(f) < 1e-13)) throw NumericError("Kepler solver did not converge", f);
  return e + turns * two_pi;
}

}  // namespace relshift
