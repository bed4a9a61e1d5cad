#pragma once

#include <array>
#include <cmath>

#include "relshift/greop/schwarzschild.hpp"

namespace relshift::greop {

/// Orthonormal frame of an observer: e[0] = u/c, e[1] radial, e[2] azimuthal, e[3] = e[1] x e[2].
struct Tetrad {
  Event x;
  std::array<FourVector, 4> e;
};

inline FourVector combine(const FourVector& a, double s, const FourVector& b) {
  FourVector r = a;
  for (std::size_t i = 0; i < 4; ++i) r[i] += s * b[i];
  return r;
}

inline Tetrad make_tetrad(const Schwarzschild& m, const Event& x, const FourVector& u) {
  Tetrad t;
  t.x = x;
  FourVector e0 = u;
  const double un = std::sqrt(-m.norm2(x, u));
  for (double& c : e0.v) c /= un;
  t.e[0] = e0;

  const std::array<FourVector, 3> seeds = {FourVector{{0.0, 1.0, 0.0, 0.0}, u.param},
                                           FourVector{{0.0, 0.0, 0.0, 1.0}, u.param},
                                           FourVector{{0.0, 0.0, -1.0, 0.0}, u.param}};
  for (std::size_t a = 1; a < 4; ++a) {
    FourVector w = seeds[a - 1];
    for (int pass = 0; pass < 2; ++pass) {
      w = combine(w, m.dot(x, w, t.e[0]), t.e[0]);
      for (std::size_t b = 1; b < a; ++b) w = combine(w, -m.dot(x, w, t.e[b]), t.e[b]);
    }
    const double n = std::sqrt(m.norm2(x, w));
    for (double& c : w.v) c /= n;
    t.e[a] = w;
  }
  return t;
}

/// Null wavevector launched at celestial angles (azimuth phi_c in the e1-e2
/// plane, elevation psi_c towards e3), scaled so that its time component is 1.
inline FourVector celestial_to_wavevector(const Tetrad& t, double phi_c, double psi_c) {
  const double n1 = std::cos(psi_c) * std::cos(phi_c);
  const double n2 = std::cos(psi_c) * std::sin(phi_c);
  const double n3 = std::sin(psi_c);
  FourVector k{{0.0, 0.0, 0.0, 0.0}, Parametrization::Affine};
  for (std::size_t i = 0; i < 4; ++i)
    k[i] = t.e[0][i] + n1 * t.e[1][i] + n2 * t.e[2][i] + n3 * t.e[3][i];
  const double kt = k[0];
  for (double& c : k.v) c /= kt;
  return k;
}

/// Inverse of celestial_to_wavevector: (phi_c, psi_c) of a future-directed null vector.
inline std::array<double, 2> wavevector_to_celestial(const Schwarzschild& m, const Tetrad& t, const FourVector& k) {
  const double omega = -m.dot(t.x, k, t.e[0]);
  const double n1 = m.dot(t.x, k, t.e[1]) / omega;
  const double n2 = m.dot(t.x, k, t.e[2]) / omega;
  const double n3 = m.dot(t.x, k, t.e[3]) / omega;
  return {std::atan2(n2, n1), std::asin(std::clamp(n3, -1.0, 1.0))};
}

/// Frequency ratio minus one between emitter A and receiver B.
inline double gr_redshift(const Schwarzschild& m, const Event& xA, const FourVector& uA, const FourVector& kA,
                          const Event& xB, const FourVector& uB, const FourVector& kB) {
  return m.dot(xA, uA, kA) / m.dot(xB, uB, kB) - 1.0;
}

}  // namespace relshift::greop
