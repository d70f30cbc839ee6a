#pragma once

// Separability certificates: local correlation matrices gamma_A, gamma_B and a
// PSD remainder P with gamma_0 = gamma_A (+) gamma_B + P.
//
// Reconstruction walks a separable trace backwards. At the terminating step
// gamma_N >= L_N (+) L_N. If gamma_{k+1} >= d (+) d then
//   gamma_k >= d (+) (B_k - C_k^T (A_k - d)^+ C_k),
// and for k >= 1 (where A_k = B_k, C_k = -C_k^T) the two local blocks can be
// swapped and averaged.

#include <array>
#include <sstream>
#include <vector>

#include "gaussep/engine.hpp"
#include "gaussep/gaussian.hpp"
#include "gaussep/matlin.hpp"

namespace gaussep {

struct BackwardStep {
  int index = 0;
  /// lambda_min(delta_k - iJ)
  Real delta_margin = 0.0;
  /// lambda_min(gamma_k - delta_k (+) delta_k), or for k = 0 the final
  /// lambda_min(gamma_0 - gamma_A (+) gamma_B)
  Real order_margin = 0.0;
  /// max ||C_k^T v|| over the numerical kernel of A_k - delta_{k+1}
  Real kernel_residual = 0.0;
};

struct SeparabilityCertificate {
  RMat gamma_A;
  RMat gamma_B;
  RMat P;
  std::vector<BackwardStep> backward;
};

struct CertificateCheck {
  bool valid = false;
  /// lambda_min(gamma_A - iJ), lambda_min(gamma_B - iJ), lambda_min(P)
  std::array<Real, 3> margins{};
};

inline CertificateCheck verify_certificate(const BipartiteCM& gamma0,
                                           const SeparabilityCertificate& cert,
                                           const ToleranceConfig& tol = {}) {
  if (cert.gamma_A.rows() != gamma0.A.rows() || cert.gamma_A.cols() != gamma0.A.cols() ||
      cert.gamma_B.rows() != gamma0.B.rows() || cert.gamma_B.cols() != gamma0.B.cols()) {
    throw InputError("verify_certificate: certificate blocks do not match the state");
  }
  const RMat g = assemble(gamma0);
  RMat local = RMat::Zero(g.rows(), g.cols());
  local.topLeftCorner(gamma0.A.rows(), gamma0.A.cols()) = cert.gamma_A;
  local.bottomRightCorner(gamma0.B.rows(), gamma0.B.cols()) = cert.gamma_B;

  const PsdResult a = psd_check(minus_i_j(cert.gamma_A), tol);
  const PsdResult b = psd_check(minus_i_j(cert.gamma_B), tol);
  // The remainder is recomputed from gamma_0, never taken from cert.P.
  const PsdResult p = psd_check(RMat(g - local), tol);
  return {a.is_psd && b.is_psd && p.is_psd, {a.lambda_min, b.lambda_min, p.lambda_min}};
}

namespace detail {

struct SchurStep {
  /// C^T G^+ C
  RMat correction;
  Real kernel_residual = 0.0;
  bool kernel_ok = false;
};

/// C^T G^+ C for the PSD gap G = A - d, with the kernel inclusion
/// ker(G) in ker(C^T) checked as a residual.
inline SchurStep backward_schur(const RMat& gap, const RMat& c, const ToleranceConfig& tol) {
  const Real gap_norm = operator_norm(gap);
  const Real scale = std::max<Real>({1.0, gap_norm, operator_norm(c)});
  const RealPinv pinv = real_pseudoinverse(gap, tol.pinv_rcond * gap_norm);
  SchurStep out;
  out.kernel_residual =
      pinv.kernel.cols() ? (c.transpose() * pinv.kernel).colwise().norm().maxCoeff() : 0.0;
  out.kernel_ok = out.kernel_residual <= std::sqrt(tol.psd_tol) * scale;
  const RMat corr = c.transpose() * pinv.inverse * c;
  out.correction = (corr + corr.transpose()) / 2.0;
  return out;
}

inline RMat direct_sum(const RMat& x, const RMat& y) {
  RMat out = RMat::Zero(x.rows() + y.rows(), x.cols() + y.cols());
  out.topLeftCorner(x.rows(), x.cols()) = x;
  out.bottomRightCorner(y.rows(), y.cols()) = y;
  return out;
}

inline RMat block(const RMat& a, const RMat& c, const RMat& b) {
  return assemble(BipartiteCM{0, 0, a, b, c});
}

}  // namespace detail

/// Rebuilds (gamma_A, gamma_B, P) from a trace that ended with a separable
/// verdict. Throws NumericalError, carrying the step index, if a kernel
/// inclusion or an intermediate CM test fails; retrying via decide_robust with
/// a larger eps usually helps.
///
/// The recursion is carried on the gaps H_k = A_k - delta_k and
/// G_k = A_k - delta_{k+1} = (A_k - A_{k+1}) + H_{k+1}, which are sums of PSD
/// terms. Forming them by subtraction would cancel catastrophically once the
/// correlations C_k become small.
inline SeparabilityCertificate reconstruct(const Verdict& verdict,
                                           const ToleranceConfig& tol = {}) {
  if (verdict.kind != VerdictKind::separable) {
    throw InputError("reconstruct: the verdict is not separable");
  }
  const auto& steps = verdict.trace.steps;
  const int last = verdict.step;
  if (last < 1 || static_cast<int>(steps.size()) != last + 1) {
    throw InputError("reconstruct: trace does not hold every iterate up to the verdict");
  }

  auto fail = [](const std::string& what, int k) {
    std::ostringstream os;
    os << "certificate reconstruction failed at step " << k << ": " << what;
    throw NumericalError(os.str(), k);
  };
  auto cm_margin = [&](const RMat& x) { return psd_check(minus_i_j(x), tol); };

  SeparabilityCertificate cert;
  const IterationStep& top = steps[last];
  const Eigen::Index dim = top.state.A.rows();
  // delta_N = L_N
  RMat h = top.c_opnorm * RMat::Identity(dim, dim);
  {
    BackwardStep bs;
    bs.index = last;
    bs.delta_margin = cm_margin(RMat(top.state.A - h)).lambda_min;
    bs.order_margin = psd_check(detail::block(h, top.state.C, h), tol).lambda_min;
    cert.backward.push_back(bs);
  }

  for (int k = last - 1; k >= 1; --k) {
    const BipartiteCM& g = steps[k].state;
    const RMat gap = steps[k + 1].decrement + h;
    const detail::SchurStep s = detail::backward_schur(gap, g.C, tol);
    if (!s.kernel_ok) fail("kernel of A_k - delta is not contained in ker(C_k^T)", k);
    // delta_k = (delta_{k+1} + A_k - S_k) / 2
    h = (gap + s.correction) / 2.0;

    BackwardStep bs;
    bs.index = k;
    bs.kernel_residual = s.kernel_residual;
    const PsdResult dm = cm_margin(RMat(g.A - h));
    bs.delta_margin = dm.lambda_min;
    bs.order_margin = psd_check(detail::block(h, g.C, h), tol).lambda_min;
    cert.backward.push_back(bs);
    if (!dm.is_psd) fail("averaged local matrix is not a correlation matrix", k);
  }

  // Final step. The tight choice gamma_A = A_0 - G_0 leaves P with a zero
  // Schur complement, exactly on the PSD boundary. If round-off pushes P or
  // gamma_B below zero, half of gamma_A's CM margin is moved into the gap and
  // half of the resulting gamma_B margin into P.
  const BipartiteCM& g0 = steps[0].state;
  const RMat base_gap = steps[1].decrement + h;
  const Eigen::Index da = base_gap.rows();
  const Eigen::Index db = g0.B.rows();

  auto finish_with = [&](Real tau_a, bool relax_b) {
    const RMat gap = base_gap + tau_a * RMat::Identity(da, da);
    const detail::SchurStep s = detail::backward_schur(gap, g0.C, tol);
    if (!s.kernel_ok) fail("kernel of A_0 - gamma_A is not contained in ker(C_0^T)", 0);
    RMat gamma_b = g0.B - s.correction;
    const Real tau_b =
        relax_b ? std::max<Real>(0.0, cm_margin(gamma_b).lambda_min / 2.0) : 0.0;
    gamma_b -= tau_b * RMat::Identity(db, db);
    cert.gamma_A = g0.A - gap;
    cert.gamma_B = gamma_b;
    cert.P = detail::block(gap, g0.C, RMat(s.correction + tau_b * RMat::Identity(db, db)));
    return s.kernel_residual;
  };

  Real residual = finish_with(0.0, false);
  if (std::min(psd_check(cert.P, tol).lambda_min, cm_margin(cert.gamma_B).lambda_min) < 0.0) {
    const Real tau_a = std::max<Real>(0.0, cm_margin(RMat(g0.A - base_gap)).lambda_min / 2.0);
    residual = finish_with(tau_a, true);
  }

  BackwardStep bs;
  bs.index = 0;
  bs.kernel_residual = residual;
  const PsdResult bm = cm_margin(cert.gamma_B);
  bs.delta_margin = bm.lambda_min;
  bs.order_margin = psd_check(cert.P, tol).lambda_min;
  cert.backward.push_back(bs);
  if (!bm.is_psd) fail("gamma_B is not a correlation matrix", 0);
  return cert;
}

/// The failing eigenvector behind an entangled verdict: lowest eigenpair of
/// A_N - iJ, or of gamma_N - iJ when the whole iterate stopped being a CM.
struct EntanglementWitness {
  int step = 0;
  Real lambda_min = 0.0;
  CVec eigenvector;
};

inline EntanglementWitness entanglement_witness(const Verdict& verdict) {
  if (verdict.kind != VerdictKind::entangled) {
    throw InputError("entanglement_witness: the verdict is not entangled");
  }
  const IterationStep& s = verdict.trace.last();
  const LowestEigenpair e =
      verdict.reason() == Termination::iterate_not_cm
          ? lowest_eigenpair(minus_i_j(assemble(s.state)))
          : lowest_eigenpair(HermitianMatrix::from_parts(s.state.A, -symplectic_form(s.state.n)));
  return {s.index, e.value, e.vector};
}

}  // namespace gaussep
