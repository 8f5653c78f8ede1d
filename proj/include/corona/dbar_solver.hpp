#pragma once

#include <fftw3.h>

#include <complex>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "corona/grid.hpp"
#include "corona/koszul.hpp"

namespace corona {

struct SolverStats {
  int components_solved = 0;
  double max_input_sup = 0.0;
  double max_output_sup = 0.0;
  int n_r = 0;
  int n_theta = 0;

  /// Measured ratio sup|u| / sup|v| over the solved components (0 when nothing was solved).
  double sup_ratio() const { return max_input_sup > 0.0 ? max_output_sup / max_input_sup : 0.0; }

  void merge(const SolverStats& o) {
    components_solved += o.components_solved;
    max_input_sup = std::max(max_input_sup, o.max_input_sup);
    max_output_sup = std::max(max_output_sup, o.max_output_sup);
    n_r = o.n_r;
    n_theta = o.n_theta;
  }
};

struct SolveResult {
  KoszulElement solution;
  SolverStats stats;
};

/**
 * A d-bar solver on some domain: given a bounded d-bar-closed element of
 * degree (j, l), l >= 1, return a bounded element of degree (j, l-1) whose
 * d-bar is the input. Implementations are immutable and deterministic.
 */
class DbarSolver {
 public:
  virtual ~DbarSolver() = default;
  virtual std::string name() const = 0;
  virtual SolveResult solve(const KoszulElement& omega) const = 0;
};

/// Raised when a solver is asked for a degree or dimension it does not cover.
class UnsupportedDegree : public CoronaError {
 public:
  using CoronaError::CoronaError;
};

enum class TransformMethod {
  /// O(P^2) double loop with pairwise summation over input cells, i-major then k-minor.
  Direct,
  /// Same quadrature sum, evaluated ring pair by ring pair as circular convolutions in theta.
  AngularFft,
};

namespace detail {

template <class It>
cplx pairwise_sum(It first, It last) {
  const auto n = last - first;
  if (n <= 8) {
    cplx s = 0.0;
    for (; first != last; ++first) s += *first;
    return s;
  }
  const It mid = first + n / 2;
  return pairwise_sum(first, mid) + pairwise_sum(mid, last);
}

inline ScalarField cauchy_direct(const ScalarField& v) {
  const PolarGrid& g = v.grid();
  ScalarField u(g);
  std::vector<cplx> terms(g.size());
  for (int i = 0; i < g.n_r(); ++i)
    for (int k = 0; k < g.n_theta(); ++k) {
      const cplx z = g.node(i, k);
      std::size_t n = 0;
      for (int p = 0; p < g.n_r(); ++p) {
        const double w = g.weight(p);
        for (int q = 0; q < g.n_theta(); ++q, ++n) {
          terms[n] = (p == i && q == k) ? cplx(0.0) : w * v(p, q) / (z - g.node(p, q));
        }
      }
      u(i, k) = pairwise_sum(terms.begin(), terms.end()) / std::numbers::pi;
    }
  return u;
}

// RAII holders for FFTW buffers and plans.
struct FftwBuffer {
  explicit FftwBuffer(int n) : ptr(fftw_alloc_complex(static_cast<std::size_t>(n))), size(n) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  std::span<cplx> view() { return {reinterpret_cast<cplx*>(ptr), static_cast<std::size_t>(size)}; }
  fftw_complex* ptr;
  int size;
};

struct FftwPlan {
  FftwPlan(int n, FftwBuffer& in, FftwBuffer& out, int sign)
      : plan(fftw_plan_dft_1d(n, in.ptr, out.ptr, sign, FFTW_ESTIMATE)) {
    if (!plan) throw CoronaError("FFTW plan creation failed");
  }
  ~FftwPlan() { fftw_destroy_plan(plan); }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  void run(FftwBuffer& in, FftwBuffer& out) const { fftw_execute_dft(plan, in.ptr, out.ptr); }
  fftw_plan plan;
};

/*
 * With z = r_i e^{i t_k}, w = r_p e^{i t_q}:
 *   1/(z - w) = e^{-i t_k} K_ip[q - k],   K_ip[d] = 1/(r_i - r_p e^{i d dt}),
 * so each output ring is e^{-i t_k}/pi times sum_p W_p (v_p correlated with K_ip).
 * The self cell is the d = 0 entry of K_ii and is zeroed.
 */
inline ScalarField cauchy_angular_fft(const ScalarField& v) {
  const PolarGrid& g = v.grid();
  const int nr = g.n_r();
  const int nt = g.n_theta();
  const double dt = g.dtheta();

  FftwBuffer in(nt), out(nt);
  const FftwPlan forward(nt, in, out, FFTW_FORWARD);
  const FftwPlan backward(nt, in, out, FFTW_BACKWARD);

  std::vector<std::complex<double>> vhat(static_cast<std::size_t>(nr) * nt);
  for (int p = 0; p < nr; ++p) {
    auto src = in.view();
    for (int q = 0; q < nt; ++q) src[q] = v(p, q) * g.weight(p);
    forward.run(in, out);
    std::copy(out.view().begin(), out.view().end(), vhat.begin() + static_cast<std::ptrdiff_t>(p) * nt);
  }

  // e^{-i d dt} for d = 0..nt-1
  std::vector<cplx> phase(nt);
  for (int d = 0; d < nt; ++d) phase[d] = std::polar(1.0, -dt * d);

  ScalarField u(g);
  std::vector<cplx> acc(nt);
  for (int i = 0; i < nr; ++i) {
    std::fill(acc.begin(), acc.end(), cplx(0.0));
    const double ri = g.radius(i);
    for (int p = 0; p < nr; ++p) {
      const double rp = g.radius(p);
      auto kern = in.view();
      // reversed kernel K'[d] = K_ip[-d] = 1/(r_i - r_p e^{-i d dt})
      for (int d = 0; d < nt; ++d) kern[d] = 1.0 / (ri - rp * phase[d]);
      if (p == i) kern[0] = 0.0;
      forward.run(in, out);
      const auto khat = out.view();
      const cplx* vh = vhat.data() + static_cast<std::ptrdiff_t>(p) * nt;
      for (int m = 0; m < nt; ++m) acc[m] += vh[m] * khat[m];
    }
    std::copy(acc.begin(), acc.end(), in.view().begin());
    backward.run(in, out);
    const auto c = out.view();
    for (int k = 0; k < nt; ++k) u(i, k) = std::polar(1.0, -g.angle(k)) * c[k] / (nt * std::numbers::pi);
  }
  return u;
}

}  // namespace detail

enum class SelfCell {
  /// Drop the singular cell.
  Skip,
  /// Singularity subtraction: v(z) zbar + (1/pi) sum_{w != z} (v(w) - v(z)) W / (z - w).
  /// Reproduces u = zbar for v = 1 to rounding.
  Subtract,
};

/**
 * Particular solution of du/dzbar = v on the unit disc,
 *   u(z) = (1/pi) int_D v(w) / (z - w) dA(w),
 * by the midpoint rule on v's grid with the cell containing z left out.
 * Both methods evaluate the same discrete sum; they differ only in rounding.
 */
inline ScalarField cauchy_pompeiu_transform(const ScalarField& v, TransformMethod method = TransformMethod::AngularFft,
                                            SelfCell self_cell = SelfCell::Skip) {
  auto transform = [method](const ScalarField& x) {
    return method == TransformMethod::Direct ? detail::cauchy_direct(x) : detail::cauchy_angular_fft(x);
  };
  ScalarField u = transform(v);
  if (self_cell == SelfCell::Subtract) {
    const PolarGrid& g = v.grid();
    const ScalarField of_one = transform(ScalarField(g, 1.0));
    for (int i = 0; i < g.n_r(); ++i)
      for (int k = 0; k < g.n_theta(); ++k) u(i, k) += v(i, k) * (std::conj(g.node(i, k)) - of_one(i, k));
  }
  return u;
}

/// Disc solver for (0,1)-forms in one variable, applied componentwise.
class CauchyPompeiuSolver final : public DbarSolver {
 public:
  explicit CauchyPompeiuSolver(TransformMethod method = TransformMethod::AngularFft, SelfCell self_cell = SelfCell::Skip)
      : method_(method), self_cell_(self_cell) {}

  std::string name() const override {
    std::string n = method_ == TransformMethod::Direct ? "cauchy-pompeiu-direct" : "cauchy-pompeiu-fft";
    return self_cell_ == SelfCell::Subtract ? n + "-subtracted" : n;
  }

  SolveResult solve(const KoszulElement& omega) const override {
    if (omega.n() != 1 || omega.l() != 1) {
      throw UnsupportedDegree("disc solver handles n = 1, l = 1 only; got n = " + std::to_string(omega.n()) +
                              ", l = " + std::to_string(omega.l()));
    }
    SolveResult res{KoszulElement(omega.m(), 1, omega.j(), 0, omega.grid()), {}};
    res.stats.n_r = omega.grid().n_r();
    res.stats.n_theta = omega.grid().n_theta();
    for (const auto& [key, v] : omega.components()) {
      ScalarField u = v.is_zero() ? ScalarField(v.grid()) : cauchy_pompeiu_transform(v, method_, self_cell_);
      res.stats.components_solved += 1;
      res.stats.max_input_sup = std::max(res.stats.max_input_sup, sup_norm(v));
      res.stats.max_output_sup = std::max(res.stats.max_output_sup, sup_norm(u));
      res.solution.set(key.wedge, MultiIndex{}, std::move(u));
    }
    return res;
  }

 private:
  TransformMethod method_;
  SelfCell self_cell_;
};

/// (0,1)-form solve with the shipped disc solver.
inline SolveResult solve_01(const KoszulElement& omega) { return CauchyPompeiuSolver().solve(omega); }

struct SolverDefect {
  double defect = 0.0;      // interior sup |dbar(omega') - omega|
  double output_sup = 0.0;  // sup |omega'| on the full grid
};

/// Audits omega' against d-bar omega' = omega with the finite-difference d-bar.
inline SolverDefect verify_solver(const KoszulElement& omega, const KoszulElement& omega_prime, double r_int) {
  if (omega_prime.j() != omega.j() || omega_prime.l() + 1 != omega.l() || omega_prime.m() != omega.m() ||
      omega_prime.n() != omega.n() || !(omega_prime.grid() == omega.grid())) {
    throw CoronaError("verify_solver: omega' must have degree (j, l-1) on omega's grid");
  }
  const KoszulElement diff = kelem_axpy(-1.0, omega, koszul_dbar(omega_prime));
  return {diff.sup_norm(r_int), omega_prime.sup_norm()};
}

}  // namespace corona
