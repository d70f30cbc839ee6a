#pragma once

// Tolerance-aware dense matrix primitives: PSD tests, pseudoinverses, norms,
// and the two block-matrix positivity reductions the separability map relies
// on (Schur complement with kernel condition, and the real/complex
// equivalence for [[A, C], [C^T, A]] with antisymmetric C).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "gaussep/errors.hpp"

namespace gaussep {

using Real = double;
using Complex = std::complex<double>;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

struct ToleranceConfig {
  /// Relative eigenvalue slack for positivity, scaled by max(1, ||M||_op).
  Real psd_tol = 1e-9;
  /// Relative singular-value cutoff (against sigma_max) for pseudoinverses.
  Real pinv_rcond = 1e-12;
  /// Absolute band around zero inside which a separability test is not
  /// allowed to report entanglement.
  Real decision_margin = 1e-10;

  void validate() const {
    auto bad = [](Real v) { return !(v > 0.0 && v < 1e-2); };
    if (bad(psd_tol) || bad(pinv_rcond) || bad(decision_margin)) {
      throw InputError("tolerances must lie in (0, 1e-2)");
    }
  }
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw InputError(std::string(what) + ": non-finite entries");
  }
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x"
       << m.cols();
    throw InputError(os.str());
  }
}

/// Complex Hermitian matrix. The stored entries are exactly Hermitian: the
/// input is replaced by (M + M^H) / 2 on construction.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const CMat& m) {
    require_square(m, "HermitianMatrix");
    require_finite(m, "HermitianMatrix");
    data_ = (m + m.adjoint()) / 2.0;
    for (Eigen::Index k = 0; k < data_.rows(); ++k) {
      data_(k, k) = Complex(data_(k, k).real(), 0.0);
    }
  }

  explicit HermitianMatrix(const RMat& m) : HermitianMatrix(CMat(m.cast<Complex>())) {}

  /// real_part + i * imag_part, with real_part symmetric and imag_part
  /// antisymmetric up to the symmetrization above.
  static HermitianMatrix from_parts(const RMat& real_part, const RMat& imag_part) {
    CMat m(real_part.rows(), real_part.cols());
    m.real() = real_part;
    m.imag() = imag_part;
    return HermitianMatrix(m);
  }

  Eigen::Index dim() const { return data_.rows(); }
  const CMat& matrix() const { return data_; }

 private:
  CMat data_;
};

/// Largest singular value.
template <typename Derived>
Real operator_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m.eval());
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

/// Sum of singular values.
template <typename Derived>
Real trace_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m.eval());
  return svd.singularValues().sum();
}

inline Real operator_norm(const HermitianMatrix& m) {
  if (m.dim() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(m.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct PsdResult {
  bool is_psd = false;
  Real lambda_min = 0.0;
};

/// Smallest eigenvalue and the tolerance-aware verdict
/// lambda_min >= -psd_tol * max(1, ||M||_op).
inline PsdResult psd_check(const HermitianMatrix& m, const ToleranceConfig& tol) {
  if (m.dim() == 0) return {true, 0.0};
  Eigen::SelfAdjointEigenSolver<CMat> es(m.matrix(), Eigen::EigenvaluesOnly);
  const RVec& ev = es.eigenvalues();
  const Real lmin = ev(0);
  const Real scale = std::max<Real>(1.0, ev.cwiseAbs().maxCoeff());
  return {lmin >= -tol.psd_tol * scale, lmin};
}

inline PsdResult psd_check(const RMat& m, const ToleranceConfig& tol) {
  return psd_check(HermitianMatrix(m), tol);
}

/// Smallest eigenvalue together with a unit eigenvector for it.
struct LowestEigenpair {
  Real value = 0.0;
  CVec vector;
};

inline LowestEigenpair lowest_eigenpair(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m.matrix());
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

/// Moore-Penrose pseudoinverse of a Hermitian matrix via its
/// eigendecomposition. Eigenvalues with |lambda| <= pinv_rcond * max|lambda|
/// are treated as zero.
inline HermitianMatrix pseudoinverse(const HermitianMatrix& m, const ToleranceConfig& tol) {
  if (m.dim() == 0) return m;
  Eigen::SelfAdjointEigenSolver<CMat> es(m.matrix());
  const RVec& ev = es.eigenvalues();
  const Real cutoff = tol.pinv_rcond * ev.cwiseAbs().maxCoeff();
  RVec inv = RVec::Zero(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k)) > cutoff) inv(k) = 1.0 / ev(k);
  }
  const CMat& v = es.eigenvectors();
  return HermitianMatrix(CMat(v * inv.asDiagonal() * v.adjoint()));
}

/// Real symmetric pseudoinverse with an explicit absolute cutoff. Also
/// returns an orthonormal basis of the discarded (numerical kernel) space.
struct RealPinv {
  RMat inverse;
  RMat kernel;
};

inline RealPinv real_pseudoinverse(const RMat& m, Real abs_cutoff) {
  Eigen::SelfAdjointEigenSolver<RMat> es((m + m.transpose()) / 2.0);
  const RVec& ev = es.eigenvalues();
  const RMat& v = es.eigenvectors();
  RVec inv = RVec::Zero(ev.size());
  Eigen::Index kept_kernel = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k)) > abs_cutoff) {
      inv(k) = 1.0 / ev(k);
    } else {
      ++kept_kernel;
    }
  }
  RMat kernel(m.rows(), kept_kernel);
  for (Eigen::Index k = 0, j = 0; k < ev.size(); ++k) {
    if (std::abs(ev(k)) <= abs_cutoff) kernel.col(j++) = v.col(k);
  }
  return {v * inv.asDiagonal() * v.transpose(), kernel};
}

struct SchurResult {
  bool is_psd = false;
  bool kernel_ok = false;
  /// lambda_min of A - C B^+ C^T
  Real schur_lambda_min = 0.0;
  /// max ||C v|| over the numerical kernel of B
  Real kernel_residual = 0.0;
};

/// Positivity of M = [[A, C], [C^T, B]] through B >= 0, ker(B) in ker(C), and
/// A - C B^+ C^T >= 0.
inline SchurResult schur_psd(const RMat& a, const RMat& b, const RMat& c,
                             const ToleranceConfig& tol) {
  require_square(a, "schur_psd: A");
  require_square(b, "schur_psd: B");
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    std::ostringstream os;
    os << "schur_psd: C must be " << a.rows() << "x" << b.rows() << ", got "
       << c.rows() << "x" << c.cols();
    throw InputError(os.str());
  }
  require_finite(a, "schur_psd: A");
  require_finite(b, "schur_psd: B");
  require_finite(c, "schur_psd: C");

  const Real scale = std::max<Real>({1.0, operator_norm(a), operator_norm(b), operator_norm(c)});
  SchurResult out;

  const PsdResult b_psd = psd_check(b, tol);
  const Real b_norm = b.size() ? operator_norm(b) : 0.0;
  const RealPinv pinv = real_pseudoinverse(b, tol.pinv_rcond * std::max<Real>(b_norm, 1e-300));

  out.kernel_residual = pinv.kernel.cols() ? (c * pinv.kernel).colwise().norm().maxCoeff() : 0.0;
  // A kernel component of size r in C lowers lambda_min(M) by roughly r^2/||A||,
  // so the admissible residual is the square root of the eigenvalue slack.
  out.kernel_ok = out.kernel_residual <= std::sqrt(tol.psd_tol) * scale;

  const RMat schur = a - c * pinv.inverse * c.transpose();
  const PsdResult s = psd_check(schur, tol);
  out.schur_lambda_min = s.lambda_min;
  out.is_psd = b_psd.is_psd && out.kernel_ok && s.is_psd;
  return out;
}

/// Positivity of the real block matrix [[A, C], [C^T, A]] for symmetric A and
/// antisymmetric C, decided on the half-size Hermitian matrix A + iC.
inline PsdResult hermitian_reduce_psd(const RMat& a, const RMat& c, const ToleranceConfig& tol) {
  require_square(a, "hermitian_reduce_psd: A");
  require_square(c, "hermitian_reduce_psd: C");
  if (a.rows() != c.rows()) throw InputError("hermitian_reduce_psd: A and C differ in size");
  require_finite(a, "hermitian_reduce_psd: A");
  require_finite(c, "hermitian_reduce_psd: C");
  const Real scale = std::max<Real>({1.0, a.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff()});
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol.psd_tol * scale) {
    throw InputError("hermitian_reduce_psd: A is not symmetric");
  }
  if ((c + c.transpose()).cwiseAbs().maxCoeff() > tol.psd_tol * scale) {
    throw InputError("hermitian_reduce_psd: C is not antisymmetric");
  }
  return psd_check(HermitianMatrix::from_parts(a, c), tol);
}

}  // namespace gaussep
