#pragma once

// Separability decision for bipartite Gaussian states.
//
// The state gamma_0 = [[A, C], [C^T, B]] is pushed through the nonlinear map
//
//   X_N     = C_N (B_N - iJ)^+ C_N^T
//   A_{N+1} = B_{N+1} = A_N - Re X_N
//   C_{N+1} = -Im X_N
//
// and after every application two tests are made:
//   A_N - iJ has a negative eigenvalue             -> entangled
//   L_N = A_N - ||C_N||_op * 1 satisfies L_N >= iJ -> separable
// An iterate that stops being a correlation matrix also proves entanglement.
// Separable inputs keep every iterate above gamma_A (+) gamma_A for the
// gamma_A of any valid decomposition, so ||A_N||_tr decreases monotonically.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gaussep/gaussian.hpp"
#include "gaussep/matlin.hpp"

namespace gaussep {

inline constexpr int kDefaultMaxIter = 200;

enum class VerdictKind { separable, entangled, undecided };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::separable: return "separable";
    case VerdictKind::entangled: return "entangled";
    case VerdictKind::undecided: return "undecided";
  }
  return "?";
}

enum class Termination {
  /// L_N >= iJ
  separable_bound,
  /// A_N - iJ not positive
  block_not_cm,
  /// gamma_N itself is no longer a correlation matrix
  iterate_not_cm,
  max_iterations,
};

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::separable_bound: return "separable_bound";
    case Termination::block_not_cm: return "block_not_cm";
    case Termination::iterate_not_cm: return "iterate_not_cm";
    case Termination::max_iterations: return "max_iterations";
  }
  return "?";
}

struct IterationStep {
  int index = 0;
  /// gamma_N. For index >= 1 the B block is an exact copy of A.
  BipartiteCM state;
  /// Re X_{N-1} = A_{N-1} - A_N, kept as computed by the map (empty for N = 0).
  RMat decrement;
  /// lambda_min(A_N - iJ)
  Real margin_A = 0.0;
  /// lambda_min(L_N - iJ)
  Real margin_L = 0.0;
  /// lambda_min(gamma_N - iJ)
  Real margin_state = 0.0;
  Real c_opnorm = 0.0;
  Real a_trnorm = 0.0;
};

struct IterationTrace {
  std::vector<IterationStep> steps;
  Termination reason = Termination::max_iterations;

  const IterationStep& initial() const { return steps.front(); }
  const IterationStep& last() const { return steps.back(); }
};

struct Verdict {
  VerdictKind kind = VerdictKind::undecided;
  int step = 0;
  /// The eigenvalue margin that decided the outcome (the last margin_L when
  /// undecided).
  Real margin = 0.0;
  /// True when |margin| lies inside the decision band.
  bool marginal = false;
  IterationTrace trace;

  Termination reason() const { return trace.reason; }

  /// ||C_N||_op for N = 1 ... step.
  std::vector<Real> c_opnorm_history() const {
    std::vector<Real> h;
    for (const auto& s : trace.steps) {
      if (s.index >= 1) h.push_back(s.c_opnorm);
    }
    return h;
  }
};

/// Margins and norms of one iterate.
inline IterationStep measure_step(int index, BipartiteCM state) {
  IterationStep s;
  s.index = index;
  const RMat j = symplectic_form(state.n);
  s.c_opnorm = operator_norm(state.C);
  s.a_trnorm = trace_norm(state.A);
  s.margin_A = lowest_eigenpair(HermitianMatrix::from_parts(state.A, -j)).value;
  const RMat l = state.A - s.c_opnorm * RMat::Identity(state.A.rows(), state.A.cols());
  s.margin_L = lowest_eigenpair(HermitianMatrix::from_parts(l, -j)).value;
  s.margin_state = lowest_eigenpair(minus_i_j(assemble(state))).value;
  s.state = std::move(state);
  return s;
}

struct TheoremChecks {
  bool entangled_fired = false;
  bool separable_fired = false;
  Real margin_A = 0.0;
  Real margin_L = 0.0;
  Real c_opnorm = 0.0;
};

/// Both termination tests on an iterate with index >= 1. The entanglement test
/// needs margin_A below -decision_margin. The separability test accepts
/// margin_L >= -decision_margin so that boundary product states (vacuum) are
/// recognised; L_N <= A_N keeps the two tests mutually exclusive.
inline TheoremChecks theorem_checks(const IterationStep& step, const ToleranceConfig& tol) {
  if (step.index < 1) {
    throw InputError("theorem_checks: the tests apply to iterates with N >= 1 only");
  }
  TheoremChecks t;
  t.margin_A = step.margin_A;
  t.margin_L = step.margin_L;
  t.c_opnorm = step.c_opnorm;
  t.entangled_fired = step.margin_A < -tol.decision_margin;
  t.separable_fired = !t.entangled_fired && step.margin_L >= -tol.decision_margin;
  return t;
}

namespace detail {

struct MapResult {
  BipartiteCM next;
  RMat decrement;
};

inline MapResult apply_map(const BipartiteCM& g, const ToleranceConfig& tol) {
  const RMat jb = symplectic_form(g.m);
  const HermitianMatrix b_minus_ij = HermitianMatrix::from_parts(g.B, -jb);
  const CMat inv = pseudoinverse(b_minus_ij, tol).matrix();
  const CMat c = g.C.cast<Complex>();
  const CMat x = c * inv * c.transpose();
  RMat re_x = (x.real() + x.real().transpose()) / 2.0;
  RMat a_next = g.A - re_x;
  a_next = ((a_next + a_next.transpose()) / 2.0).eval();
  RMat c_next = -x.imag();
  c_next = ((c_next - c_next.transpose()) / 2.0).eval();
  return {{g.n, g.n, a_next, a_next, std::move(c_next)}, std::move(re_x)};
}

}  // namespace detail

/// One application of the map. The input has to be a correlation matrix; the
/// map's "non-CM goes to zero" rule is handled by decide().
inline BipartiteCM map_step(const BipartiteCM& gamma_n, const ToleranceConfig& tol = {}) {
  const CmValidity v = validate_cm(gamma_n, tol);
  if (!v.valid) {
    std::ostringstream os;
    os << "map_step: input is not a correlation matrix (lambda_min(gamma - iJ) = " << v.margin
       << ")";
    throw InputError(os.str());
  }
  return detail::apply_map(gamma_n, tol).next;
}

inline Verdict decide(const BipartiteCM& gamma0, const ToleranceConfig& tol = {},
                      int max_iter = kDefaultMaxIter) {
  tol.validate();
  if (max_iter < 1) throw InputError("decide: max_iter must be at least 1");
  const CmValidity v0 = validate_cm(gamma0, tol);
  if (!v0.valid) {
    std::ostringstream os;
    os << "input is not a valid correlation matrix (lambda_min(gamma - iJ) = " << v0.margin
       << ")";
    throw InputError(os.str());
  }

  Verdict out;
  out.trace.steps.push_back(measure_step(0, gamma0));

  auto finish = [&](VerdictKind kind, Termination reason, Real margin) {
    out.kind = kind;
    out.trace.reason = reason;
    out.step = out.trace.last().index;
    out.margin = margin;
    out.marginal = std::abs(margin) <= tol.decision_margin;
    return out;
  };

  for (int n = 1; n <= max_iter; ++n) {
    detail::MapResult mapped = detail::apply_map(out.trace.last().state, tol);
    if (!mapped.next.A.allFinite() || !mapped.next.C.allFinite()) {
      std::ostringstream os;
      os << "non-finite iterate at step " << n;
      throw NumericalError(os.str(), n);
    }
    out.trace.steps.push_back(measure_step(n, std::move(mapped.next)));
    out.trace.steps.back().decrement = std::move(mapped.decrement);
    const IterationStep& cur = out.trace.last();
    const TheoremChecks t = theorem_checks(cur, tol);
    if (t.entangled_fired) {
      return finish(VerdictKind::entangled, Termination::block_not_cm, t.margin_A);
    }
    if (t.separable_fired) {
      return finish(VerdictKind::separable, Termination::separable_bound, t.margin_L);
    }
    if (cur.margin_state < -tol.decision_margin) {
      return finish(VerdictKind::entangled, Termination::iterate_not_cm, cur.margin_state);
    }
  }
  return finish(VerdictKind::undecided, Termination::max_iterations, out.trace.last().margin_L);
}

enum class RobustRoute {
  /// gamma + eps*1 entangled
  plus_entangled,
  /// gamma - eps*1 separable
  minus_separable,
  /// gamma - eps*1 is not a CM; the plain decision on gamma is reported
  plain_fallback,
  /// neither one-sided implication applied
  within_eps,
};

inline const char* to_string(RobustRoute r) {
  switch (r) {
    case RobustRoute::plus_entangled: return "plus_entangled";
    case RobustRoute::minus_separable: return "minus_separable";
    case RobustRoute::plain_fallback: return "plain_fallback";
    case RobustRoute::within_eps: return "within_eps";
  }
  return "?";
}

struct RobustVerdict {
  VerdictKind kind = VerdictKind::undecided;
  RobustRoute route = RobustRoute::within_eps;
  Real eps = 0.0;
  Verdict plus;
  std::optional<Verdict> minus;
  std::optional<Verdict> plain;

  /// The run whose outcome was reported.
  const Verdict& deciding() const {
    switch (route) {
      case RobustRoute::minus_separable: return *minus;
      case RobustRoute::plain_fallback: return *plain;
      default: return plus;
    }
  }
};

/// Decision with eps-slack on both sides. gamma + eps*1 entangled implies gamma
/// entangled, since added noise cannot create entanglement; gamma - eps*1
/// separable implies gamma separable, since gamma = (gamma - eps*1) + eps*1.
/// No other inference is drawn.
inline RobustVerdict decide_robust(const BipartiteCM& gamma0, const ToleranceConfig& tol,
                                   Real eps, int max_iter = kDefaultMaxIter) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("decide_robust: eps must be > 0");
  // Rejects non-states before anything is shifted.
  const CmValidity v0 = validate_cm(gamma0, tol);
  if (!v0.valid) {
    std::ostringstream os;
    os << "input is not a valid correlation matrix (lambda_min(gamma - iJ) = " << v0.margin
       << ")";
    throw InputError(os.str());
  }
  RobustVerdict out;
  out.eps = eps;
  out.plus = decide(shifted(gamma0, eps), tol, max_iter);
  if (out.plus.kind == VerdictKind::entangled) {
    out.kind = VerdictKind::entangled;
    out.route = RobustRoute::plus_entangled;
    return out;
  }
  const BipartiteCM lower = shifted(gamma0, -eps);
  if (validate_cm(lower, tol).valid) {
    out.minus = decide(lower, tol, max_iter);
    if (out.minus->kind == VerdictKind::separable) {
      out.kind = VerdictKind::separable;
      out.route = RobustRoute::minus_separable;
      return out;
    }
    out.kind = VerdictKind::undecided;
    out.route = RobustRoute::within_eps;
    return out;
  }
  out.plain = decide(gamma0, tol, max_iter);
  out.kind = out.plain->kind;
  out.route = RobustRoute::plain_fallback;
  return out;
}

namespace detail {

inline void require_psd_perturbation(const RMat& p, Eigen::Index dim, const ToleranceConfig& tol) {
  if (p.rows() != dim || p.cols() != dim) {
    std::ostringstream os;
    os << "perturbation must be " << dim << "x" << dim << ", got " << p.rows() << "x"
       << p.cols();
    throw InputError(os.str());
  }
  require_finite(p, "perturbation");
  const Real scale = std::max<Real>(1.0, p.cwiseAbs().maxCoeff());
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > tol.psd_tol * scale) {
    throw InputError("perturbation is not symmetric");
  }
  const PsdResult r = psd_check(p, tol);
  if (!r.is_psd) {
    std::ostringstream os;
    os << "perturbation is not positive semidefinite (lambda_min = " << r.lambda_min << ")";
    throw InputError(os.str());
  }
}

}  // namespace detail

struct SweepPoint {
  Real eps = 0.0;
  VerdictKind kind = VerdictKind::undecided;
  int steps = 0;
};

/// decide() on gamma + eps * perturbation for every eps of a strictly
/// increasing grid.
inline std::vector<SweepPoint> sweep(const BipartiteCM& gamma, const RMat& perturbation,
                                     const std::vector<Real>& eps_grid,
                                     const ToleranceConfig& tol = {},
                                     int max_iter = kDefaultMaxIter) {
  detail::require_psd_perturbation(perturbation, gamma.dim(), tol);
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!std::isfinite(eps_grid[k])) throw InputError("sweep: non-finite eps");
    if (k > 0 && !(eps_grid[k] > eps_grid[k - 1])) {
      throw InputError("sweep: eps grid must be strictly increasing");
    }
  }
  std::vector<SweepPoint> out;
  out.reserve(eps_grid.size());
  for (Real eps : eps_grid) {
    const Verdict v = decide(perturbed(gamma, perturbation, eps), tol, max_iter);
    out.push_back({eps, v.kind, v.step});
  }
  return out;
}

/// count points log-spaced over [lo, hi].
inline std::vector<Real> log_grid(Real lo, Real hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw InputError("log grid needs 0 < lo < hi and at least two points");
  }
  std::vector<Real> g(static_cast<std::size_t>(count));
  const Real a = std::log(lo);
  const Real b = std::log(hi);
  for (int k = 0; k < count; ++k) g[k] = std::exp(a + (b - a) * k / (count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

struct ThresholdOptions {
  Real eps_max = 1e3;
  Real width = 1e-12;
  Real initial_step = 1e-2;
  int max_iter = kDefaultMaxIter;
};

struct ThresholdResult {
  Real value = 0.0;
  /// Final bracket: lo never certified separable, hi certified separable.
  Real lo = 0.0;
  Real hi = 0.0;
  int evaluations = 0;
  /// Bisection midpoints where decide() came back undecided (counted as not
  /// separable).
  int undecided = 0;
};

/// Smallest eps for which gamma + eps * perturbation is separable, by
/// bisection on the decide() predicate.
inline ThresholdResult find_threshold(const BipartiteCM& gamma, const RMat& perturbation,
                                      const ToleranceConfig& tol = {},
                                      const ThresholdOptions& opts = {}) {
  detail::require_psd_perturbation(perturbation, gamma.dim(), tol);
  ThresholdResult out;
  auto separable_at = [&](Real eps) {
    ++out.evaluations;
    const Verdict v = decide(perturbed(gamma, perturbation, eps), tol, opts.max_iter);
    if (v.kind == VerdictKind::undecided) ++out.undecided;
    return v.kind == VerdictKind::separable;
  };

  if (separable_at(0.0)) return out;

  Real lo = 0.0;
  Real hi = opts.initial_step;
  while (!separable_at(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > opts.eps_max) {
      std::ostringstream os;
      os << "find_threshold: no separable point found up to eps = " << opts.eps_max;
      throw InputError(os.str());
    }
  }
  while (hi - lo > opts.width) {
    const Real mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    if (separable_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.lo = lo;
  out.hi = hi;
  out.value = lo + (hi - lo) / 2.0;
  return out;
}

}  // namespace gaussep
