#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

namespace corona {

using cplx = std::complex<double>;

/// Dense complex polynomial, coefficients constant-first.
struct Polynomial {
  std::vector<cplx> coeffs;

  Polynomial() = default;
  Polynomial(std::initializer_list<cplx> c) : coeffs(c) {}
  explicit Polynomial(std::vector<cplx> c) : coeffs(std::move(c)) {}

  static Polynomial constant(cplx c) { return Polynomial(std::vector<cplx>{c}); }

  /// Degree after dropping exact-zero leading coefficients; -1 for the zero polynomial.
  int degree() const {
    for (int d = static_cast<int>(coeffs.size()) - 1; d >= 0; --d)
      if (coeffs[d] != cplx(0.0)) return d;
    return -1;
  }

  cplx operator()(cplx z) const {
    cplx acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  cplx coeff(int d) const { return d < static_cast<int>(coeffs.size()) ? coeffs[d] : cplx(0.0); }

  double max_abs_coeff() const {
    double m = 0.0;
    for (auto c : coeffs) m = std::max(m, std::abs(c));
    return m;
  }

  /// Drops leading coefficients with magnitude <= tol.
  Polynomial& trim(double tol = 0.0) {
    while (!coeffs.empty() && std::abs(coeffs.back()) <= tol) coeffs.pop_back();
    return *this;
  }

  Polynomial derivative() const {
    std::vector<cplx> d;
    for (std::size_t n = 1; n < coeffs.size(); ++n) d.push_back(coeffs[n] * static_cast<double>(n));
    if (d.empty()) d.push_back(0.0);
    return Polynomial(std::move(d));
  }
};

inline Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<cplx> c(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = a.coeff(static_cast<int>(n)) + b.coeff(static_cast<int>(n));
  return Polynomial(std::move(c));
}

inline Polynomial operator*(cplx s, const Polynomial& a) {
  Polynomial out = a;
  for (auto& c : out.coeffs) c *= s;
  return out;
}

inline Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + cplx(-1.0) * b; }

inline Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.coeffs.empty() || b.coeffs.empty()) return Polynomial::constant(0.0);
  std::vector<cplx> c(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
  for (std::size_t p = 0; p < a.coeffs.size(); ++p)
    for (std::size_t q = 0; q < b.coeffs.size(); ++q) c[p + q] += a.coeffs[p] * b.coeffs[q];
  return Polynomial(std::move(c));
}

/// Formats a real with 17 significant digits (round-trips through strtod).
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Complex literal in the `a+bi` mini-syntax; purely real values print without the imaginary part.
inline std::string format_complex(cplx z) {
  if (z.imag() == 0.0) return format_real(z.real());
  std::string im = format_real(z.imag());
  if (im.front() != '-') im = "+" + im;
  return format_real(z.real()) + im + "i";
}

inline std::string to_spec_string(const Polynomial& p) {
  std::string s = "poly:";
  if (p.coeffs.empty()) return s + "0";
  for (std::size_t n = 0; n < p.coeffs.size(); ++n) {
    if (n) s += ",";
    s += format_complex(p.coeffs[n]);
  }
  return s;
}

}  // namespace corona
