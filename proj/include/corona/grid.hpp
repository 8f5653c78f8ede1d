#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace corona {

using cplx = std::complex<double>;

/// Raised for malformed inputs: bad grid sizes, mismatched grids, bad specs.
class CoronaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Midpoint polar grid on the unit disc.
 *
 * Node (i, k) sits at r_i = (i + 0.5)/n_r, theta_k = 2 pi k / n_theta and
 * carries the cell weight r_i dr dtheta. No node lies on r = 0 or r = 1.
 * The weights sum to pi up to rounding.
 */
class PolarGrid {
 public:
  PolarGrid() = default;
  PolarGrid(int n_r, int n_theta) : n_r_(n_r), n_theta_(n_theta) {
    if (n_r < 2 || n_theta < 4) {
      throw CoronaError("polar grid needs n_r >= 2 and n_theta >= 4, got (" + std::to_string(n_r) + ", " +
                        std::to_string(n_theta) + ")");
    }
  }

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  std::size_t size() const { return static_cast<std::size_t>(n_r_) * static_cast<std::size_t>(n_theta_); }

  double dr() const { return 1.0 / n_r_; }
  double dtheta() const { return 2.0 * std::numbers::pi / n_theta_; }
  double radius(int i) const { return (i + 0.5) / n_r_; }
  double angle(int k) const { return dtheta() * k; }
  double weight(int i) const { return radius(i) * dr() * dtheta(); }

  std::size_t index(int i, int k) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_theta_) + static_cast<std::size_t>(k);
  }
  cplx node(int i, int k) const { return std::polar(radius(i), angle(k)); }

  /// Weight sum in ring-major order.
  double total_weight() const {
    double s = 0.0;
    for (int i = 0; i < n_r_; ++i) s += weight(i) * n_theta_;
    return s;
  }

  friend bool operator==(const PolarGrid&, const PolarGrid&) = default;

 private:
  int n_r_ = 0;
  int n_theta_ = 0;
};

inline PolarGrid make_polar_grid(int n_r, int n_theta) { return PolarGrid(n_r, n_theta); }

/// Complex samples of a function at every node of a polar grid (i-major, k-minor).
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const PolarGrid& grid, cplx fill = 0.0) : grid_(grid), values_(grid.size(), fill) {}
  ScalarField(const PolarGrid& grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw CoronaError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                        std::to_string(grid_.size()));
    }
  }

  /// Samples fn(z) at every node.
  template <class Fn>
  static ScalarField sample(const PolarGrid& grid, Fn&& fn) {
    ScalarField out(grid);
    for (int i = 0; i < grid.n_r(); ++i)
      for (int k = 0; k < grid.n_theta(); ++k) out(i, k) = fn(grid.node(i, k));
    return out;
  }

  const PolarGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }

  cplx& operator()(int i, int k) { return values_[grid_.index(i, k)]; }
  const cplx& operator()(int i, int k) const { return values_[grid_.index(i, k)]; }
  cplx& operator[](std::size_t n) { return values_[n]; }
  const cplx& operator[](std::size_t n) const { return values_[n]; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
  }
  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](cplx v) { return v == cplx(0.0); });
  }

  ScalarField& operator+=(const ScalarField& o) {
    require_same_grid(o);
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] += o.values_[n];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    require_same_grid(o);
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] -= o.values_[n];
    return *this;
  }
  ScalarField& operator*=(const ScalarField& o) {
    require_same_grid(o);
    for (std::size_t n = 0; n < values_.size(); ++n) values_[n] *= o.values_[n];
    return *this;
  }
  ScalarField& operator*=(cplx a) {
    for (auto& v : values_) v *= a;
    return *this;
  }

  void require_same_grid(const ScalarField& o) const {
    if (!(grid_ == o.grid_)) throw CoronaError("grid mismatch between fields");
  }

 private:
  PolarGrid grid_;
  std::vector<cplx> values_;
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
inline ScalarField operator*(cplx s, ScalarField a) { return a *= s; }

/// Max |u| over nodes with r_i <= r_max.
inline double sup_norm(const ScalarField& u, double r_max = 1.0) {
  if (!(r_max > 0.0 && r_max <= 1.0)) throw CoronaError("sup_norm radius must lie in (0, 1]");
  const PolarGrid& g = u.grid();
  double m = 0.0;
  for (int i = 0; i < g.n_r() && g.radius(i) <= r_max; ++i)
    for (int k = 0; k < g.n_theta(); ++k) m = std::max(m, std::abs(u(i, k)));
  return m;
}

/// Midpoint rule over the disc, accumulated ring by ring.
inline cplx integrate(const ScalarField& u) {
  const PolarGrid& g = u.grid();
  cplx total = 0.0;
  for (int i = 0; i < g.n_r(); ++i) {
    cplx ring = 0.0;
    for (int k = 0; k < g.n_theta(); ++k) ring += u(i, k);
    total += ring * g.weight(i);
  }
  return total;
}

}  // namespace corona
