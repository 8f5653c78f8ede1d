#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "corona/grid.hpp"
#include "corona/polynomial.hpp"

namespace corona::oracles {

class NotCoprime : public CoronaError {
 public:
  using CoronaError::CoronaError;
};

/// Self-verified witness of sum_j inputs[j] * cofactors[j] = 1.
struct PolyBezoutCertificate {
  std::vector<Polynomial> inputs;
  std::vector<Polynomial> cofactors;
  Polynomial residual_poly;  // sum_j inputs[j] cofactors[j] - 1

  double residual() const { return residual_poly.max_abs_coeff(); }
};

/// One cofactor per line in the function-spec syntax.
inline void write_certificate(std::ostream& os, const PolyBezoutCertificate& cert) {
  for (const auto& u : cert.cofactors) os << to_spec_string(u) << '\n';
}

namespace detail {

inline constexpr double kZeroRemainder = 1e-8;  // relative to the input scale
inline constexpr double kCertificateTol = 1e-10;

struct ExtendedGcd {
  Polynomial gcd, s, t;  // s a + t b = gcd
};

// Long division; the divisor must have a nonzero leading coefficient.
inline std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
  const int db = b.degree();
  const int da = a.degree();
  if (da < db) return {Polynomial::constant(0.0), a};
  const cplx lead = b.coeffs[db];
  std::vector<cplx> rem(a.coeffs.begin(), a.coeffs.begin() + da + 1);
  std::vector<cplx> quot(da - db + 1, 0.0);
  for (int d = da; d >= db; --d) {
    const cplx c = rem[d] / lead;
    quot[d - db] = c;
    for (int e = 0; e <= db; ++e) rem[d - db + e] -= c * b.coeffs[e];
    rem[d] = 0.0;
  }
  rem.resize(static_cast<std::size_t>(std::max(db, 1)));
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

inline ExtendedGcd extended_gcd(Polynomial a, Polynomial b, double scale) {
  const double zero = kZeroRemainder * scale;
  Polynomial s0 = Polynomial::constant(1.0), s1 = Polynomial::constant(0.0);
  Polynomial t0 = Polynomial::constant(0.0), t1 = Polynomial::constant(1.0);
  a.trim(1e-14 * scale);
  b.trim(1e-14 * scale);
  while (b.max_abs_coeff() >= zero) {
    // drop cancellation debris so the pivot is the true leading coefficient
    b.trim(1e-12 * scale);
    auto [q, r] = divmod(a, b);
    a = std::move(b);
    b = std::move(r);
    Polynomial s2 = s0 - q * s1;
    Polynomial t2 = t0 - q * t1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  a.trim(zero);
  return {std::move(a), std::move(s0), std::move(t0)};
}

inline PolyBezoutCertificate certify(std::vector<Polynomial> inputs, std::vector<Polynomial> cofactors) {
  Polynomial res = Polynomial::constant(-1.0);
  for (std::size_t j = 0; j < inputs.size(); ++j) res = res + inputs[j] * cofactors[j];
  PolyBezoutCertificate cert{std::move(inputs), std::move(cofactors), std::move(res)};
  if (!(cert.residual() <= kCertificateTol)) {
    throw CoronaError("Bezout certificate failed its symbolic self-check: residual coefficient " +
                      format_real(cert.residual()));
  }
  return cert;
}

inline double input_scale(const std::vector<Polynomial>& ps) {
  double s = 0.0;
  for (const auto& p : ps) s = std::max(s, p.max_abs_coeff());
  return s;
}

}  // namespace detail

/**
 * Cofactors (u, v) with u p + v q = 1 by the extended Euclidean algorithm in
 * complex floating point, pivoting on the leading coefficient of each divisor.
 * A remainder sequence that ends in a non-constant gcd, or a constant below
 * 1e-8 of the input scale, is reported as NotCoprime.
 */
inline PolyBezoutCertificate extended_euclid_bezout(const Polynomial& p, const Polynomial& q) {
  const double scale = detail::input_scale({p, q});
  if (scale == 0.0) throw NotCoprime("both polynomials are zero");
  auto e = detail::extended_gcd(p, q, scale);
  if (e.gcd.degree() != 0) {
    throw NotCoprime("common root: gcd has degree " + std::to_string(std::max(e.gcd.degree(), 0)) +
                     " (" + to_spec_string(e.gcd) + ")");
  }
  const cplx c = e.gcd.coeffs[0];
  Polynomial u = (1.0 / c) * e.s, v = (1.0 / c) * e.t;
  u.trim();
  v.trim();
  if (u.coeffs.empty()) u = Polynomial::constant(0.0);
  if (v.coeffs.empty()) v = Polynomial::constant(0.0);
  return detail::certify({p, q}, {std::move(u), std::move(v)});
}

/// Folds the extended gcd through the list, tracking cofactors of every input.
inline PolyBezoutCertificate multi_bezout(const std::vector<Polynomial>& ps) {
  if (ps.empty()) throw CoronaError("multi_bezout needs at least one polynomial");
  const double scale = detail::input_scale(ps);
  if (scale == 0.0) throw NotCoprime("all polynomials are zero");

  Polynomial running = ps[0];
  std::vector<Polynomial> cof(ps.size(), Polynomial::constant(0.0));
  cof[0] = Polynomial::constant(1.0);
  for (std::size_t k = 1; k < ps.size(); ++k) {
    auto e = detail::extended_gcd(running, ps[k], scale);
    for (std::size_t j = 0; j < k; ++j) cof[j] = e.s * cof[j];
    cof[k] = e.t;
    running = std::move(e.gcd);
  }
  running.trim(detail::kZeroRemainder * scale);
  if (running.degree() != 0) {
    throw NotCoprime("inputs share a common root: gcd " + to_spec_string(running));
  }
  const cplx c = running.coeffs[0];
  for (auto& u : cof) {
    u = (1.0 / c) * u;
    u.trim(1e-14 * scale);
    if (u.coeffs.empty()) u = Polynomial::constant(0.0);
  }
  return detail::certify(ps, std::move(cof));
}

/// Finite sum of c * z^a * conj(z)^b.
struct MixedPolynomial {
  struct Term {
    int a, b;
    cplx c;
  };
  std::vector<Term> terms;

  cplx operator()(cplx z) const {
    cplx s = 0.0;
    const cplx zb = std::conj(z);
    for (const auto& t : terms) s += t.c * std::pow(z, t.a) * std::pow(zb, t.b);
    return s;
  }
};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

/**
 * (1/pi) int_D v(w) / (z - w) dA(w) in polar coordinates centred at z:
 * w = z + rho e^{i phi} turns the kernel times area element into
 * -e^{-i phi} d rho d phi, so the integrand is as smooth as v. Each ray runs to
 * the unit circle. Trapezoid rule in phi (periodic) with 32 * 2^level points;
 * composite 8-point Gauss-Legendre in rho with 2^level panels per ray.
 */
template <class Fn>
cplx brute_force_transform(const Fn& v, cplx z, int level) {
  if (!(std::abs(z) < 1.0)) throw CoronaError("brute_force_transform needs |z| < 1");
  if (level < 0) throw CoronaError("refinement level must be nonnegative");
  std::vector<double> gx, gw;
  gauss_legendre(8, gx, gw);
  const int n_phi = 32 << level;
  const int panels = 1 << level;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  const double c = 1.0 - std::norm(z);

  cplx total = 0.0;
  for (int a = 0; a < n_phi; ++a) {
    const double phi = a * dphi;
    const cplx dir = std::polar(1.0, phi);
    const double proj = (std::conj(z) * dir).real();
    const double reach = -proj + std::sqrt(proj * proj + c);  // |z + reach dir| = 1
    const double h = reach / panels;
    cplx ray = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * h;
      for (int g = 0; g < 8; ++g) ray += gw[g] * v(z + (mid + 0.5 * h * gx[g]) * dir);
    }
    total += -std::conj(dir) * ray * (0.5 * h);
  }
  return total * dphi / std::numbers::pi;
}

}  // namespace corona::oracles
