#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "corona/dbar_solver.hpp"
#include "corona/function_spec.hpp"
#include "corona/grid.hpp"
#include "corona/koszul.hpp"
#include "corona/wirtinger.hpp"

namespace corona {

/// Corona data f_1..f_m sampled on a polar grid, with the level epsilon.
struct CoronaProblem {
  int m = 0;
  int n = 1;
  std::vector<FunctionSpec> specs;
  std::vector<ScalarField> f;
  double epsilon = 0.0;
  PolarGrid grid;
};

inline CoronaProblem make_problem(std::vector<FunctionSpec> specs, double epsilon, const PolarGrid& grid) {
  if (specs.empty()) throw CoronaError("corona problem needs at least one function");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw CoronaError("epsilon must be positive");
  CoronaProblem p;
  p.m = static_cast<int>(specs.size());
  p.epsilon = epsilon;
  p.grid = grid;
  for (const auto& s : specs) {
    ScalarField u = s.sample(grid);
    if (!u.all_finite()) throw CoronaError("function " + s.to_string() + " is not finite on the grid");
    p.f.push_back(std::move(u));
  }
  p.specs = std::move(specs);
  return p;
}

/// A hypothesis check outcome: the extreme value and where it was attained.
struct HypothesisCheck {
  bool pass = false;
  double value = 0.0;
  cplx point = 0.0;
};

/// Thrown when the data violate a hypothesis of the construction.
class HypothesisError : public CoronaError {
 public:
  HypothesisError(const std::string& what, HypothesisCheck check) : CoronaError(what), check_(check) {}
  const HypothesisCheck& check() const { return check_; }

 private:
  HypothesisCheck check_;
};

class SeparationTooTight : public CoronaError {
 public:
  using CoronaError::CoronaError;
};

/// Error raised inside solve_corona, tagged with the failing stage.
class StageError : public CoronaError {
 public:
  StageError(std::string stage, const std::string& what) : CoronaError(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

namespace detail {

// Visits every grid node and n_theta points of the closed boundary ring r = 1
// with the vector of |f_j| there.
template <class Visit>
void visit_samples(const CoronaProblem& p, Visit&& visit) {
  std::vector<double> mod(p.m);
  const PolarGrid& g = p.grid;
  for (int i = 0; i < g.n_r(); ++i)
    for (int k = 0; k < g.n_theta(); ++k) {
      for (int j = 0; j < p.m; ++j) mod[j] = std::abs(p.f[j](i, k));
      visit(g.node(i, k), mod);
    }
  for (int k = 0; k < g.n_theta(); ++k) {
    const cplx z = std::polar(1.0, g.angle(k));
    for (int j = 0; j < p.m; ++j) mod[j] = std::abs(p.specs[j](z));
    visit(z, mod);
  }
}

// Compass search on the analytic data from the best sample, kept inside the
// closed disc. Sampled minimisers of nonsmooth objectives are nearly tied on a
// ring grid, so the refined point is the one worth reporting.
template <class Objective>
void refine_minimum(const CoronaProblem& p, HypothesisCheck& c, Objective&& objective) {
  std::vector<double> mod(p.m);
  auto value_at = [&](cplx z) {
    for (int j = 0; j < p.m; ++j) mod[j] = std::abs(p.specs[j](z));
    return objective(mod);
  };
  double step = 2.0 * p.grid.dr();
  for (int iter = 0; iter < 400 && step > 1e-12; ++iter) {
    bool moved = false;
    for (int d = 0; d < 8; ++d) {
      const cplx z = c.point + std::polar(step, d * std::numbers::pi / 4.0);
      if (std::abs(z) > 1.0) continue;
      double v;
      try {
        v = value_at(z);
      } catch (const CoronaError&) {
        continue;
      }
      if (v < c.value) {
        c.value = v;
        c.point = z;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
}

}  // namespace detail

/// min of sum_j |f_j| over samples, refined locally; passes iff the minimum exceeds epsilon.
inline HypothesisCheck check_corona_condition(const CoronaProblem& p) {
  HypothesisCheck c{false, std::numeric_limits<double>::infinity(), 0.0};
  detail::visit_samples(p, [&](cplx z, const std::vector<double>& mod) {
    double s = 0.0;
    for (double a : mod) s += a;
    if (s < c.value) {
      c.value = s;
      c.point = z;
    }
  });
  detail::refine_minimum(p, c, [](const std::vector<double>& mod) {
    double s = 0.0;
    for (double a : mod) s += a;
    return s;
  });
  c.pass = c.value > p.epsilon;
  return c;
}

/**
 * Grid proxy for "the closed sublevel sets {|f_j| <= eps} have empty common
 * intersection": every sample must have some |f_j| >= eps (1 + margin).
 * value/point report the worst point, min of max_j |f_j| over samples, refined locally.
 */
inline HypothesisCheck check_separation(const CoronaProblem& p, double margin = 0.05) {
  HypothesisCheck c{false, std::numeric_limits<double>::infinity(), 0.0};
  detail::visit_samples(p, [&](cplx z, const std::vector<double>& mod) {
    const double mx = *std::max_element(mod.begin(), mod.end());
    if (mx < c.value) {
      c.value = mx;
      c.point = z;
    }
  });
  detail::refine_minimum(p, c, [](const std::vector<double>& mod) { return *std::max_element(mod.begin(), mod.end()); });
  c.pass = c.value >= p.epsilon * (1.0 + margin);
  return c;
}

/// C^2 smoothstep: 0 for t <= 0, 1 for t >= 1, 6t^5 - 15t^4 + 10t^3 between.
inline double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// chi_j = smoothstep((|f_j| - eps) / (sigma eps)) at one point.
inline std::vector<double> cutoffs_at(const std::vector<cplx>& f_values, double epsilon, double sigma) {
  std::vector<double> chi;
  chi.reserve(f_values.size());
  for (cplx v : f_values) chi.push_back(smoothstep((std::abs(v) - epsilon) / (sigma * epsilon)));
  return chi;
}

/// rho_j = chi_j / sum_k chi_k at one point; requires a positive sum.
inline std::vector<double> partition_at(const std::vector<cplx>& f_values, double epsilon, double sigma) {
  std::vector<double> chi = cutoffs_at(f_values, epsilon, sigma);
  double s = 0.0;
  for (double c : chi) s += c;
  if (!(s > 0.0)) throw SeparationTooTight("no cutoff is active at this point");
  for (double& c : chi) c /= s;
  return chi;
}

struct PartitionOfUnity {
  std::vector<ScalarField> rho;  // real-valued, stored as complex
  double epsilon = 0.0;
  double sigma = 0.0;
  double chi_min = 0.0;  // min over nodes of sum_j chi_j before normalisation
};

/// Normalised smoothstep cutoffs of |f_j| with transition band [eps, (1+sigma) eps].
inline PartitionOfUnity build_partition_of_unity(const CoronaProblem& p, double sigma = 0.5, double c_min = 0.1) {
  if (!(sigma > 0.0)) throw CoronaError("sigma must be positive");
  PartitionOfUnity pou;
  pou.epsilon = p.epsilon;
  pou.sigma = sigma;
  pou.rho.assign(p.m, ScalarField(p.grid));
  pou.chi_min = std::numeric_limits<double>::infinity();
  std::vector<cplx> vals(p.m);
  for (std::size_t n = 0; n < p.grid.size(); ++n) {
    for (int j = 0; j < p.m; ++j) vals[j] = p.f[j][n];
    std::vector<double> chi = cutoffs_at(vals, p.epsilon, sigma);
    double s = 0.0;
    for (double c : chi) s += c;
    pou.chi_min = std::min(pou.chi_min, s);
    if (s > 0.0)
      for (int j = 0; j < p.m; ++j) pou.rho[j][n] = chi[j] / s;
  }
  if (pou.chi_min < c_min) {
    throw SeparationTooTight("sum of cutoffs drops to " + format_real(pou.chi_min) + " < " + format_real(c_min) +
                             "; use a smaller sigma or a larger separation margin");
  }
  return pou;
}

struct SmoothSolution {
  std::vector<ScalarField> g;
  std::vector<double> g_bound_margin;       // ||rho_j||/eps - ||g_j||
  std::vector<double> dbar_g_bound_margin;  // ||dbar rho_j||/eps - ||dbar g_j||
};

/// g_j = rho_j / f_j on supp rho_j and 0 elsewhere, with both sup-norm bound margins.
inline SmoothSolution smooth_solution(const CoronaProblem& p, const PartitionOfUnity& pou) {
  SmoothSolution s;
  s.g.assign(p.m, ScalarField(p.grid));
  const double floor = p.epsilon * 1e-6;
  for (int j = 0; j < p.m; ++j) {
    for (std::size_t n = 0; n < p.grid.size(); ++n) {
      const double rho = pou.rho[j][n].real();
      if (rho == 0.0) continue;
      if (std::abs(p.f[j][n]) <= floor) {
        throw CoronaError("partition support meets a near-zero of f_" + std::to_string(j + 1));
      }
      s.g[j][n] = rho / p.f[j][n];
    }
    s.g_bound_margin.push_back(sup_norm(pou.rho[j]) / p.epsilon - sup_norm(s.g[j]));
    s.dbar_g_bound_margin.push_back(sup_norm(wirtinger_dbar_fd(pou.rho[j])) / p.epsilon -
                                    sup_norm(wirtinger_dbar_fd(s.g[j])));
  }
  return s;
}

struct CorrectionOptions {
  /// Allowed sup |b(x)| relative to max(1, sup |x|) below the entry level, where
  /// b-closedness holds only up to the finite-difference Leibniz defect (O(h)).
  double b_closed_tol = 0.1;
  /// Allowed sup |dbar x| relative to max(1, sup |x|) at the entry level.
  double dbar_closed_tol = 1e-6;
  /// Closedness checks are evaluated on r <= r_check.
  double r_check = 1.0;
  /// Per-variable d-bar for n >= 2; empty means the n = 1 polar finite difference.
  PartialDbar partial{};
};

namespace detail {
inline KoszulElement apply_dbar(const KoszulElement& x, const CorrectionOptions& opt) {
  return opt.partial ? koszul_dbar(x, opt.partial) : koszul_dbar(x);
}
}  // namespace detail

struct CorrectionResult {
  KoszulElement value;
  SolverStats stats;
  int depth = 0;
  int solver_calls = 0;
  double max_b_defect = 0.0;  // largest relative |b(x)| seen at any level
};

namespace detail {

inline CorrectionResult corona_correct_impl(const KoszulElement& x, const std::vector<ScalarField>& f,
                                            const std::vector<ScalarField>& g, const DbarSolver& solver,
                                            const CorrectionOptions& opt, double b_tol) {
  CorrectionResult res{KoszulElement(x.m(), x.n(), x.j() + 1, x.l(), x.grid()), {}, 1, 0, 0.0};
  if (x.is_zero()) return res;

  const double scale = std::max(1.0, x.sup_norm());
  const double b_defect = koszul_b(x, f).sup_norm(opt.r_check) / scale;
  res.max_b_defect = b_defect;
  if (b_defect > b_tol) {
    throw CoronaError("corona_correct: b(x) is not zero, relative sup " + format_real(b_defect));
  }

  res.value = eta(x, g);
  if (x.l() == x.n()) return res;

  const KoszulElement w = apply_dbar(res.value, opt);
  if (w.is_zero()) return res;

  // the inner level only inherits b-closedness up to the discrete Leibniz defect
  CorrectionResult inner = corona_correct_impl(w, f, g, solver, opt, std::max(b_tol, opt.b_closed_tol));
  res.depth += inner.depth;
  res.max_b_defect = std::max(res.max_b_defect, inner.max_b_defect);
  res.solver_calls = inner.solver_calls;
  res.stats = inner.stats;
  if (inner.value.is_zero()) return res;

  SolveResult z = solver.solve(inner.value);
  res.solver_calls += 1;
  res.stats.merge(z.stats);
  res.value = kelem_axpy(-1.0, koszul_b(z.solution, f), res.value);
  return res;
}

}  // namespace detail

/**
 * Correction by downward induction on the form degree. For x in K_{j,l} with
 * b x = 0 and dbar x = 0, returns x' in K_{j+1,l} with b x' = x and dbar x' ~ 0:
 *
 *   l = n:  x' = eta(x)
 *   else:   y  = corona_correct(dbar eta(x)),  z = solver(y),  x' = eta(x) - b z
 *
 * The identity b x' = x involves only pointwise algebra and holds to rounding
 * whenever sum_j f_j g_j = 1 on the grid.
 */
inline CorrectionResult corona_correct(const KoszulElement& x, const std::vector<ScalarField>& f,
                                       const std::vector<ScalarField>& g, const DbarSolver& solver,
                                       const CorrectionOptions& opt = {}) {
  if (static_cast<int>(f.size()) != x.m() || static_cast<int>(g.size()) != x.m()) {
    throw CoronaError("corona_correct: f and g must both have m entries");
  }
  if (x.l() < x.n() && !x.is_zero()) {
    const KoszulElement dx = detail::apply_dbar(x, opt);
    const double d = dx.sup_norm(opt.r_check) / std::max(1.0, x.sup_norm());
    if (d > opt.dbar_closed_tol) {
      throw CoronaError("corona_correct: dbar(x) is not zero, relative sup " + format_real(d));
    }
  }
  // b-closedness of the entry element is an exact condition
  return detail::corona_correct_impl(x, f, g, solver, opt, 1e-12);
}

/**
 * Measurements of a candidate solution plus the construction diagnostics.
 * All norms are grid sup-norms; "interior" means nodes with r <= r_int.
 */
struct SolveReport {
  int m = 0;
  int n_r = 0;
  int n_theta = 0;
  double epsilon = 0.0;
  double sigma = 0.0;
  double margin = 0.0;
  double r_int = 0.9;
  std::string solver;

  double residual_sup = 0.0;           // all nodes
  double residual_sup_interior = 0.0;  // r <= r_int
  std::vector<double> holo_defect;     // interior sup |dbar h_j|
  std::vector<double> holo_defect_full;
  std::vector<double> h_sup;

  double corona_min = 0.0;
  double separation_min = 0.0;
  double chi_min = 0.0;
  std::vector<double> g_sup;
  std::vector<double> g_bound_margin;
  std::vector<double> dbar_g_bound_margin;
  int recursion_depth = 0;
  int solver_calls = 0;
  double max_b_defect = 0.0;
  SolverStats solver_stats;

  double max_holo_defect() const {
    return holo_defect.empty() ? 0.0 : *std::max_element(holo_defect.begin(), holo_defect.end());
  }
};

/// residual, holomorphy defect and sup-norms of h; pure measurement.
inline SolveReport verify_solution(const CoronaProblem& p, const std::vector<ScalarField>& h, double r_int = 0.9) {
  if (static_cast<int>(h.size()) != p.m) {
    throw CoronaError("expected " + std::to_string(p.m) + " solution fields, got " + std::to_string(h.size()));
  }
  for (const auto& u : h)
    if (!(u.grid() == p.grid)) throw CoronaError("solution field grid does not match the problem grid");
  SolveReport r;
  r.m = p.m;
  r.n_r = p.grid.n_r();
  r.n_theta = p.grid.n_theta();
  r.epsilon = p.epsilon;
  r.r_int = r_int;
  ScalarField residual(p.grid, 1.0);
  for (int j = 0; j < p.m; ++j) residual -= p.f[j] * h[j];
  r.residual_sup = sup_norm(residual);
  r.residual_sup_interior = sup_norm(residual, r_int);
  for (const auto& u : h) {
    const ScalarField d = wirtinger_dbar_fd(u);
    r.holo_defect.push_back(sup_norm(d, r_int));
    r.holo_defect_full.push_back(sup_norm(d));
    r.h_sup.push_back(sup_norm(u));
  }
  return r;
}

struct PipelineConfig {
  double sigma = 0.5;
  double margin = 0.05;
  double c_min = 0.1;
  double r_int = 0.9;
  CorrectionOptions correction{};
};

struct CoronaSolution {
  std::vector<ScalarField> h;
  SolveReport report;
  PartitionOfUnity pou;
  std::vector<ScalarField> g;
};

/// Hypothesis checks, partition of unity, g = rho/f, Koszul correction of 1, verification.
inline CoronaSolution solve_corona(const CoronaProblem& p, const DbarSolver& solver, const PipelineConfig& cfg = {}) {
  const HypothesisCheck corona = check_corona_condition(p);
  if (!corona.pass) {
    throw HypothesisError("corona condition fails: sum |f_j| = " + format_real(corona.value) + " <= epsilon at z = " +
                              format_complex(corona.point),
                          corona);
  }
  const HypothesisCheck sep = check_separation(p, cfg.margin);
  if (!sep.pass) {
    throw HypothesisError("separation fails: max |f_j| = " + format_real(sep.value) + " < epsilon (1 + margin) at z = " +
                              format_complex(sep.point),
                          sep);
  }

  CoronaSolution out;
  try {
    out.pou = build_partition_of_unity(p, cfg.sigma, cfg.c_min);
  } catch (const CoronaError& e) {
    throw StageError("partition", e.what());
  }
  SmoothSolution smooth;
  try {
    smooth = smooth_solution(p, out.pou);
  } catch (const CoronaError& e) {
    throw StageError("smooth-solution", e.what());
  }

  CorrectionResult corr{KoszulElement(p.m, p.n, 1, 0, p.grid), {}, 0, 0, 0.0};
  try {
    const KoszulElement one = KoszulElement::scalar(p.m, p.n, ScalarField(p.grid, 1.0));
    corr = corona_correct(one, p.f, smooth.g, solver, cfg.correction);
  } catch (const CoronaError& e) {
    throw StageError("correction", e.what());
  }

  for (int j = 1; j <= p.m; ++j) out.h.push_back(corr.value.get(MultiIndex{j}, MultiIndex{}));

  out.report = verify_solution(p, out.h, cfg.r_int);
  out.report.sigma = cfg.sigma;
  out.report.margin = cfg.margin;
  out.report.solver = solver.name();
  out.report.corona_min = corona.value;
  out.report.separation_min = sep.value;
  out.report.chi_min = out.pou.chi_min;
  for (const auto& u : smooth.g) out.report.g_sup.push_back(sup_norm(u));
  out.report.g_bound_margin = smooth.g_bound_margin;
  out.report.dbar_g_bound_margin = smooth.dbar_g_bound_margin;
  out.report.recursion_depth = corr.depth;
  out.report.solver_calls = corr.solver_calls;
  out.report.max_b_defect = corr.max_b_defect;
  out.report.solver_stats = corr.stats;
  out.g = std::move(smooth.g);
  return out;
}

/// Flat `key = value` serialisation in a fixed key order; reals at 17 significant digits.
inline void write_report(std::ostream& os, const SolveReport& r) {
  auto kv = [&os](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto per_j = [&](const std::string& k, const std::vector<double>& xs) {
    for (std::size_t j = 0; j < xs.size(); ++j) kv(k + "_" + std::to_string(j + 1), format_real(xs[j]));
  };
  kv("norms", "grid sup-norms over polar midpoint nodes");
  kv("m", std::to_string(r.m));
  kv("n_r", std::to_string(r.n_r));
  kv("n_theta", std::to_string(r.n_theta));
  kv("epsilon", format_real(r.epsilon));
  kv("sigma", format_real(r.sigma));
  kv("margin", format_real(r.margin));
  kv("r_int", format_real(r.r_int));
  kv("solver", r.solver.empty() ? "none" : r.solver);
  kv("residual_sup", format_real(r.residual_sup));
  kv("residual_sup_interior", format_real(r.residual_sup_interior));
  kv("max_holo_defect", format_real(r.max_holo_defect()));
  per_j("holo_defect", r.holo_defect);
  per_j("holo_defect_full", r.holo_defect_full);
  per_j("h_sup", r.h_sup);
  kv("corona_min", format_real(r.corona_min));
  kv("separation_min", format_real(r.separation_min));
  kv("chi_min", format_real(r.chi_min));
  per_j("g_sup", r.g_sup);
  per_j("g_bound_margin", r.g_bound_margin);
  per_j("dbar_g_bound_margin", r.dbar_g_bound_margin);
  kv("recursion_depth", std::to_string(r.recursion_depth));
  kv("solver_calls", std::to_string(r.solver_calls));
  kv("max_b_defect", format_real(r.max_b_defect));
  kv("solver_components", std::to_string(r.solver_stats.components_solved));
  kv("solver_max_input_sup", format_real(r.solver_stats.max_input_sup));
  kv("solver_max_output_sup", format_real(r.solver_stats.max_output_sup));
  kv("solver_sup_ratio", format_real(r.solver_stats.sup_ratio()));
}

inline std::string report_string(const SolveReport& r) {
  std::ostringstream os;
  write_report(os, r);
  return os.str();
}

}  // namespace corona
