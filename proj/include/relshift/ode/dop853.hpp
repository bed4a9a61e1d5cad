#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "relshift/ode/dop853_tableau.hpp"

namespace relshift::ode {

template <std::size_t N>
using State = std::array<double, N>;

/// Continuous extension of one accepted step, valid on [t0, t1].
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  std::array<State<N>, 8> r{};

  State<N> operator()(double t) const {
    const double s = (t - t0) / (t1 - t0);
    const double s1 = 1.0 - s;
    State<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      const double par = r[4][i] + s * (r[5][i] + s1 * (r[6][i] + s * r[7][i]));
      y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * par)));
    }
    return y;
  }

  double component(double t, std::size_t i) const {
    const double s = (t - t0) / (t1 - t0);
    const double s1 = 1.0 - s;
    const double par = r[4][i] + s * (r[5][i] + s1 * (r[6][i] + s * r[7][i]));
    return r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * par)));
  }

  State<N> start() const { return r[0]; }
  State<N> end() const {
    State<N> y;
    for (std::size_t i = 0; i < N; ++i) y[i] = r[0][i] + r[1][i];
    return y;
  }
};

template <std::size_t N>
struct Dop853Options {
  double rtol = 1e-12;
  State<N> atol = filled(1e-9);
  double h_initial = 0.0;  // 0 selects automatically
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 1000000;
  double safety = 0.9;
  double min_scale = 0.333;
  double max_scale = 6.0;

  static State<N> filled(double v) {
    State<N> s;
    s.fill(v);
    return s;
  }
};

enum class Dop853Status { Completed, Stopped, StepSizeTooSmall, TooManySteps };

template <std::size_t N>
struct Dop853Result {
  Dop853Status status = Dop853Status::Completed;
  double t = 0.0;
  State<N> y{};
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// Integrates y' = f(t, y) from t0 towards t_end. After each accepted step
/// on_step(segment) is invoked; returning false stops the integration.
template <std::size_t N, class Rhs, class Observer>
Dop853Result<N> dop853(Rhs&& f, double t0, State<N> y0, double t_end, const Dop853Options<N>& opt,
                       Observer&& on_step) {
  using namespace dop853_tableau;
  Dop853Result<N> res;
  res.t = t0;
  res.y = y0;
  if (t_end == t0) return res;
  const double dir = t_end > t0 ? 1.0 : -1.0;

  auto eval = [&](double t, const State<N>& y) {
    ++res.evaluations;
    return f(t, y);
  };
  auto scale_of = [&](std::size_t i, double a, double b) {
    return opt.atol[i] + opt.rtol * std::max(std::abs(a), std::abs(b));
  };

  double t = t0;
  State<N> y = y0;
  State<N> k1 = eval(t, y);

  double h = std::abs(opt.h_initial);
  if (h == 0.0) {
    // Initial step guess for an order-8 method.
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt.atol[i] + opt.rtol * std::abs(y[i]);
      dnf += (k1[i] / sk) * (k1[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, opt.h_max);
    State<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h * k1[i];
    const State<N> f1 = eval(t + dir * h, y1);
    double der2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = opt.atol[i] + opt.rtol * std::abs(y[i]);
      der2 += ((f1[i] - k1[i]) / sk) * ((f1[i] - k1[i]) / sk);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 8.0);
    h = std::min({100.0 * h, h1, opt.h_max});
  }

  State<N> k2, k3, k4, k5, k6, k7, k8, k9, k10, yw, ynew;
  double fac_old = 1e-4;
  bool last_rejected = false;
  constexpr double beta = 0.0;
  constexpr double expo1 = 1.0 / 8.0 - beta * 0.2;

  while (true) {
    if (res.accepted + res.rejected >= opt.max_steps) {
      res.status = Dop853Status::TooManySteps;
      break;
    }
    if (0.1 * h <= std::abs(t) * std::numeric_limits<double>::epsilon()) {
      res.status = Dop853Status::StepSizeTooSmall;
      break;
    }
    bool final_step = false;
    if ((t + dir * h - t_end) * dir >= 0.0) {
      h = std::abs(t_end - t);
      final_step = true;
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * a21 * k1[i];
    k2 = eval(t + c2 * hs, yw);
    for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = eval(t + c3 * hs, yw);
    for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * (a41 * k1[i] + a43 * k3[i]);
    k4 = eval(t + c4 * hs, yw);
    for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = eval(t + c5 * hs, yw);
    for (std::size_t i = 0; i < N; ++i) yw[i] = y[i] + hs * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = eval(t + c6 * hs, yw);
    for (std::size_t i = 0; i < N; ++i)
      yw[i] = y[i] + hs * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = eval(t + c7 * hs, yw);
    for (std::size_t i = 0; i < N; ++i)
      yw[i] = y[i] + hs * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
    k8 = eval(t + c8 * hs, yw);
    for (std::size_t i = 0; i < N; ++i)
      yw[i] = y[i] + hs * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i]);
    k9 = eval(t + c9 * hs, yw);
    for (std::size_t i = 0; i < N; ++i)
      yw[i] = y[i] + hs * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] +
                           a108 * k8[i] + a109 * k9[i]);
    k10 = eval(t + c10 * hs, yw);
    for (std::size_t i = 0; i < N; ++i)
      yw[i] = y[i] + hs * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] +
                           a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
    k2 = eval(t + c11 * hs, yw);
    for (std::size_t i = 0; i < N; ++i)
      yw[i] = y[i] + hs * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] +
                           a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] + a1211 * k2[i]);
    const double t_new = final_step ? t_end : t + hs;
    k3 = eval(t_new, yw);
    for (std::size_t i = 0; i < N; ++i) {
      k4[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] + b11 * k2[i] +
              b12 * k3[i];
      ynew[i] = y[i] + hs * k4[i];
    }

    double err3 = 0.0, err5 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = scale_of(i, y[i], ynew[i]);
      const double e3 = k4[i] - e31 * k1[i] - e32 * k9[i] - e33 * k3[i];
      const double e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] + e59 * k9[i] + e510 * k10[i] +
                        e511 * k2[i] + e512 * k3[i];
      err3 += (e3 / sk) * (e3 / sk);
      err5 += (e5 / sk) * (e5 / sk);
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    const double err = h * err5 * std::sqrt(1.0 / (static_cast<double>(N) * deno));
    if (!std::isfinite(err)) {
      ++res.rejected;
      h *= 0.1;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err, expo1);
    double fac = fac11 / std::pow(fac_old, beta);
    fac = std::max(1.0 / opt.max_scale, std::min(1.0 / opt.min_scale, fac / opt.safety));
    double h_new = h / fac;

    if (err <= 1.0) {
      fac_old = std::max(err, 1e-4);
      ++res.accepted;
      const State<N> knew = eval(t_new, ynew);

      DenseSegment<N> seg;
      seg.t0 = t;
      seg.t1 = t_new;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = hs * k1[i] - ydiff;
        seg.r[0][i] = y[i];
        seg.r[1][i] = ydiff;
        seg.r[2][i] = bspl;
        seg.r[3][i] = ydiff - hs * knew[i] - bspl;
        seg.r[4][i] = d41 * k1[i] + d46 * k6[i] + d47 * k7[i] + d48 * k8[i] + d49 * k9[i] + d410 * k10[i] +
                      d411 * k2[i] + d412 * k3[i];
        seg.r[5][i] = d51 * k1[i] + d56 * k6[i] + d57 * k7[i] + d58 * k8[i] + d59 * k9[i] + d510 * k10[i] +
                      d511 * k2[i] + d512 * k3[i];
        seg.r[6][i] = d61 * k1[i] + d66 * k6[i] + d67 * k7[i] + d68 * k8[i] + d69 * k9[i] + d610 * k10[i] +
                      d611 * k2[i] + d612 * k3[i];
        seg.r[7][i] = d71 * k1[i] + d76 * k6[i] + d77 * k7[i] + d78 * k8[i] + d79 * k9[i] + d710 * k10[i] +
                      d711 * k2[i] + d712 * k3[i];
      }
      for (std::size_t i = 0; i < N; ++i)
        yw[i] = y[i] + hs * (a141 * k1[i] + a147 * k7[i] + a148 * k8[i] + a149 * k9[i] + a1410 * k10[i] +
                             a1411 * k2[i] + a1412 * k3[i] + a1413 * knew[i]);
      const State<N> k14 = eval(t + c14 * hs, yw);
      for (std::size_t i = 0; i < N; ++i)
        yw[i] = y[i] + hs * (a151 * k1[i] + a156 * k6[i] + a157 * k7[i] + a158 * k8[i] + a1511 * k2[i] +
                             a1512 * k3[i] + a1513 * knew[i] + a1514 * k14[i]);
      const State<N> k15 = eval(t + c15 * hs, yw);
      for (std::size_t i = 0; i < N; ++i)
        yw[i] = y[i] + hs * (a161 * k1[i] + a166 * k6[i] + a167 * k7[i] + a168 * k8[i] + a169 * k9[i] +
                             a1613 * knew[i] + a1614 * k14[i] + a1615 * k15[i]);
      const State<N> k16 = eval(t + c16 * hs, yw);
      for (std::size_t i = 0; i < N; ++i) {
        seg.r[4][i] = hs * (seg.r[4][i] + d413 * knew[i] + d414 * k14[i] + d415 * k15[i] + d416 * k16[i]);
        seg.r[5][i] = hs * (seg.r[5][i] + d513 * knew[i] + d514 * k14[i] + d515 * k15[i] + d516 * k16[i]);
        seg.r[6][i] = hs * (seg.r[6][i] + d613 * knew[i] + d614 * k14[i] + d615 * k15[i] + d616 * k16[i]);
        seg.r[7][i] = hs * (seg.r[7][i] + d713 * knew[i] + d714 * k14[i] + d715 * k15[i] + d716 * k16[i]);
      }

      k1 = knew;
      y = ynew;
      t = t_new;
      res.t = t;
      res.y = y;
      if (!on_step(static_cast<const DenseSegment<N>&>(seg))) {
        res.status = Dop853Status::Stopped;
        break;
      }
      if (final_step) break;
      h_new = std::min(std::abs(h_new), opt.h_max);
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = h_new;
    } else {
      h_new = h / std::min(1.0 / opt.min_scale, fac11 / opt.safety);
      last_rejected = true;
      ++res.rejected;
      h = h_new;
    }
  }
  return res;
}

template <std::size_t N, class Rhs>
Dop853Result<N> dop853(Rhs&& f, double t0, State<N> y0, double t_end, const Dop853Options<N>& opt) {
  return dop853<N>(std::forward<Rhs>(f), t0, y0, t_end, opt, [](const DenseSegment<N>&) { return true; });
}

}  // namespace relshift::ode
