#pragma once

#include <complex>

#include "corona/grid.hpp"

namespace corona {

/**
 * dz-bar coefficient of the d-bar derivative of u on a polar grid,
 *
 *   du/dzbar = (e^{i theta} / 2) (du/dr + (i/r) du/dtheta).
 *
 * Second-order central differences in r and theta (theta periodic); the
 * first and last rings use the three-point one-sided stencil (two-point when
 * n_r == 2).
 */
inline ScalarField wirtinger_dbar_fd(const ScalarField& u) {
  const PolarGrid& g = u.grid();
  const int nr = g.n_r();
  const int nt = g.n_theta();
  const double inv2dr = 0.5 / g.dr();
  const double inv2dt = 0.5 / g.dtheta();
  const cplx I(0.0, 1.0);

  ScalarField out(g);
  for (int i = 0; i < nr; ++i) {
    const double r = g.radius(i);
    for (int k = 0; k < nt; ++k) {
      cplx du_dr;
      if (nr == 2) {
        du_dr = (u(1, k) - u(0, k)) / g.dr();
      } else if (i == 0) {
        du_dr = (-3.0 * u(0, k) + 4.0 * u(1, k) - u(2, k)) * inv2dr;
      } else if (i == nr - 1) {
        du_dr = (3.0 * u(i, k) - 4.0 * u(i - 1, k) + u(i - 2, k)) * inv2dr;
      } else {
        du_dr = (u(i + 1, k) - u(i - 1, k)) * inv2dr;
      }
      const int kp = k + 1 == nt ? 0 : k + 1;
      const int km = k == 0 ? nt - 1 : k - 1;
      const cplx du_dt = (u(i, kp) - u(i, km)) * inv2dt;
      out(i, k) = 0.5 * std::polar(1.0, g.angle(k)) * (du_dr + I / r * du_dt);
    }
  }
  return out;
}

}  // namespace corona
