#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "corona/field_io.hpp"
#include "corona/grid.hpp"
#include "corona/wirtinger.hpp"

namespace corona {

/// Strictly increasing set of 1-based indices (at most 32), stored as a bitmask.
class MultiIndex {
 public:
  static constexpr int kMaxIndex = 32;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> entries) {
    int prev = 0;
    for (int e : entries) {
      if (e <= prev) throw CoronaError("multi-index entries must be strictly increasing and positive");
      add_checked(e);
      prev = e;
    }
  }
  static MultiIndex from_bits(std::uint32_t bits) {
    MultiIndex m;
    m.bits_ = bits;
    return m;
  }

  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  bool contains(int p) const { return p >= 1 && p <= kMaxIndex && (bits_ >> (p - 1)) & 1u; }
  int max() const { return bits_ == 0 ? 0 : kMaxIndex - std::countl_zero(bits_); }
  std::uint32_t bits() const { return bits_; }

  /// Number of entries strictly smaller than p; the parity of moving p into sorted position.
  int count_below(int p) const { return std::popcount(bits_ & ((std::uint32_t{1} << (p - 1)) - 1u)); }

  MultiIndex with(int p) const { return from_bits(bits_ | (std::uint32_t{1} << (p - 1))); }
  MultiIndex without(int p) const { return from_bits(bits_ & ~(std::uint32_t{1} << (p - 1))); }

  std::vector<int> entries() const {
    std::vector<int> out;
    for (int p = 1; p <= kMaxIndex; ++p)
      if (contains(p)) out.push_back(p);
    return out;
  }

  /// Entries joined by '-', e.g. "1-3"; empty string for the empty index.
  std::string to_string() const {
    std::string s;
    for (int e : entries()) s += (s.empty() ? "" : "-") + std::to_string(e);
    return s;
  }

  auto operator<=>(const MultiIndex& o) const { return entries() <=> o.entries(); }
  bool operator==(const MultiIndex& o) const { return bits_ == o.bits_; }

 private:
  void add_checked(int e) {
    if (e < 1 || e > kMaxIndex) throw CoronaError("multi-index entry out of range: " + std::to_string(e));
    bits_ |= std::uint32_t{1} << (e - 1);
  }
  std::uint32_t bits_ = 0;
};

/// All subsets of {1..upto} with exactly `size` entries, in lexicographic order.
inline std::vector<MultiIndex> multi_indices(int upto, int size) {
  std::vector<MultiIndex> out;
  if (size < 0 || size > upto) return out;
  for (std::uint32_t b = 0; b < (std::uint32_t{1} << upto); ++b)
    if (std::popcount(b) == size) out.push_back(MultiIndex::from_bits(b));
  std::sort(out.begin(), out.end());
  return out;
}

/**
 * Element of K_{j,l} = Lambda^j V (x) C^inf_{0,l}: a sparse map from
 * (J, L), |J| = j, |L| = l, to scalar fields on a common grid. Absent keys are
 * zero. Degrees outside 0..m / 0..n denote the zero element and hold nothing.
 */
class KoszulElement {
 public:
  struct Key {
    MultiIndex wedge;  // J, subset of {1..m}
    MultiIndex form;   // L, subset of {1..n}
    auto operator<=>(const Key&) const = default;
    bool operator==(const Key&) const = default;
  };
  using ComponentMap = std::map<Key, ScalarField>;

  KoszulElement(int m, int n, int j, int l, const PolarGrid& grid) : m_(m), n_(n), j_(j), l_(l), grid_(grid) {
    if (m < 1 || m > MultiIndex::kMaxIndex) throw CoronaError("Koszul element needs 1 <= m <= 32");
    if (n < 1 || n > MultiIndex::kMaxIndex) throw CoronaError("Koszul element needs 1 <= n <= 32");
  }

  /// The function u viewed as an element of K_{0,0}.
  static KoszulElement scalar(int m, int n, ScalarField u) {
    KoszulElement x(m, n, 0, 0, u.grid());
    x.set({}, {}, std::move(u));
    return x;
  }

  int m() const { return m_; }
  int n() const { return n_; }
  int j() const { return j_; }
  int l() const { return l_; }
  const PolarGrid& grid() const { return grid_; }

  /// True when the degree admits components at all.
  bool degree_nonempty() const { return j_ >= 0 && j_ <= m_ && l_ >= 0 && l_ <= n_; }

  const ComponentMap& components() const { return comps_; }
  std::size_t component_count() const { return comps_.size(); }

  void set(MultiIndex wedge, MultiIndex form, ScalarField u) {
    check_key(wedge, form);
    if (!(u.grid() == grid_)) throw CoronaError("component grid differs from element grid");
    comps_.insert_or_assign(Key{wedge, form}, std::move(u));
  }

  /// Adds s * u into component (J, L).
  void accumulate(MultiIndex wedge, MultiIndex form, cplx s, const ScalarField& u) {
    check_key(wedge, form);
    if (!(u.grid() == grid_)) throw CoronaError("component grid differs from element grid");
    auto it = comps_.find(Key{wedge, form});
    if (it == comps_.end()) {
      ScalarField v = u;
      if (s != cplx(1.0)) v *= s;
      comps_.emplace(Key{wedge, form}, std::move(v));
      return;
    }
    auto& dst = it->second.values();
    const auto& src = u.values();
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += s * src[n];
  }

  /// Component (J, L), or a zero field when absent.
  ScalarField get(MultiIndex wedge, MultiIndex form) const {
    auto it = comps_.find(Key{wedge, form});
    return it == comps_.end() ? ScalarField(grid_) : it->second;
  }

  bool is_zero() const {
    for (const auto& [k, u] : comps_)
      if (!u.is_zero()) return false;
    return true;
  }

  /// Max over components of the grid sup-norm restricted to r <= r_max.
  double sup_norm(double r_max = 1.0) const {
    double s = 0.0;
    for (const auto& [k, u] : comps_) s = std::max(s, corona::sup_norm(u, r_max));
    return s;
  }

  bool same_shape(const KoszulElement& o) const {
    return m_ == o.m_ && n_ == o.n_ && j_ == o.j_ && l_ == o.l_ && grid_ == o.grid_;
  }

 private:
  void check_key(MultiIndex wedge, MultiIndex form) const {
    if (!degree_nonempty()) throw CoronaError("element of degree outside the complex cannot hold components");
    if (wedge.size() != j_ || wedge.max() > m_) throw CoronaError("wedge index does not match degree j or m");
    if (form.size() != l_ || form.max() > n_) throw CoronaError("form index does not match degree l or n");
  }

  int m_, n_, j_, l_;
  PolarGrid grid_;
  ComponentMap comps_;
};

namespace detail {
inline void require_fields(const KoszulElement& x, const std::vector<ScalarField>& f, const char* what) {
  if (static_cast<int>(f.size()) != x.m()) {
    throw CoronaError(std::string(what) + ": expected " + std::to_string(x.m()) + " fields, got " +
                      std::to_string(f.size()));
  }
  for (const auto& u : f)
    if (!(u.grid() == x.grid())) throw CoronaError(std::string(what) + ": grid mismatch");
}
inline double parity(int count) { return count % 2 == 0 ? 1.0 : -1.0; }
}  // namespace detail

/**
 * Koszul differential K_{j,l} -> K_{j-1,l}:
 *   b(e_{i1} ^ ... ^ e_{it} (x) w) = sum_p (-1)^{p+1} e_{i1} ^ ..^ (e_{ip} omitted) ^ .. ^ e_{it} (x) f_{ip} w.
 * Pointwise products only.
 */
inline KoszulElement koszul_b(const KoszulElement& x, const std::vector<ScalarField>& f) {
  detail::require_fields(x, f, "koszul_b");
  KoszulElement out(x.m(), x.n(), x.j() - 1, x.l(), x.grid());
  for (const auto& [key, w] : x.components()) {
    const auto entries = key.wedge.entries();
    for (std::size_t pos = 0; pos < entries.size(); ++pos) {
      const int p = entries[pos];
      out.accumulate(key.wedge.without(p), key.form, detail::parity(static_cast<int>(pos)), f[p - 1] * w);
    }
  }
  return out;
}

/// Per-variable d/dzbar_k, k 1-based.
using PartialDbar = std::function<ScalarField(const ScalarField&, int)>;

/**
 * d-bar on K_{j,l} -> K_{j,l+1}, acting on the form part only:
 *   dbar(e_J (x) w dzbar_L) = sum_k e_J (x) (dw/dzbar_k) dzbar_k ^ dzbar_L,
 * with dzbar_k moved into sorted position at the cost of its permutation parity.
 */
inline KoszulElement koszul_dbar(const KoszulElement& x, const PartialDbar& partial) {
  KoszulElement out(x.m(), x.n(), x.j(), x.l() + 1, x.grid());
  if (!out.degree_nonempty()) return out;
  for (const auto& [key, w] : x.components()) {
    for (int k = 1; k <= x.n(); ++k) {
      if (key.form.contains(k)) continue;
      out.accumulate(key.wedge, key.form.with(k), detail::parity(key.form.count_below(k)), partial(w, k));
    }
  }
  return out;
}

/// d-bar for n = 1 using the polar finite-difference Wirtinger derivative.
inline KoszulElement koszul_dbar(const KoszulElement& x) {
  if (x.n() != 1) throw CoronaError("koszul_dbar: n >= 2 needs a per-variable derivative");
  return koszul_dbar(x, [](const ScalarField& w, int) { return wirtinger_dbar_fd(w); });
}

/// Homotopy eta(x) = sum_p e_p ^ g_p x, K_{j,l} -> K_{j+1,l}.
inline KoszulElement eta(const KoszulElement& x, const std::vector<ScalarField>& g) {
  detail::require_fields(x, g, "eta");
  KoszulElement out(x.m(), x.n(), x.j() + 1, x.l(), x.grid());
  if (!out.degree_nonempty()) return out;
  for (const auto& [key, w] : x.components()) {
    for (int p = 1; p <= x.m(); ++p) {
      if (key.wedge.contains(p)) continue;
      out.accumulate(key.wedge.with(p), key.form, detail::parity(key.wedge.count_below(p)), g[p - 1] * w);
    }
  }
  return out;
}

/// a*x + y componentwise.
inline KoszulElement kelem_axpy(cplx a, const KoszulElement& x, const KoszulElement& y) {
  if (!x.same_shape(y)) throw CoronaError("kelem_axpy: degree, size or grid mismatch");
  KoszulElement out = y;
  for (const auto& [key, w] : x.components()) out.accumulate(key.wedge, key.form, a, w);
  return out;
}

/// Writes J<..>_L<..>.csv per component plus manifest.txt into dir.
inline void dump_koszul(const std::filesystem::path& dir, const KoszulElement& x) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.txt", std::ios::binary);
  if (!manifest) throw CoronaError("cannot write manifest in " + dir.string());
  manifest << "m = " << x.m() << "\nn = " << x.n() << "\nj = " << x.j() << "\nl = " << x.l()
           << "\nn_r = " << x.grid().n_r() << "\nn_theta = " << x.grid().n_theta()
           << "\ncomponents = " << x.component_count() << '\n';
  for (const auto& [key, w] : x.components()) {
    const std::string name = "J" + key.wedge.to_string() + "_L" + key.form.to_string() + ".csv";
    write_field_csv((dir / name).string(), w);
    manifest << name << '\n';
  }
}

}  // namespace corona
