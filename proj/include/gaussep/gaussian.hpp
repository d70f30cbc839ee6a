#pragma once

// Correlation-matrix model for bosonic Gaussian states. Quadratures are
// interleaved per mode, (x1, p1, x2, p2, ...), and the vacuum has gamma = 1.

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>

#include "gaussep/matlin.hpp"

namespace gaussep {

/// J_n = J_1 (+) ... (+) J_1 with J_1 = [[0, -1], [1, 0]].
struct SymplecticForm {
  int n_modes = 0;
  RMat matrix;

  static SymplecticForm make(int n) {
    if (n < 1) throw InputError("symplectic form needs at least one mode");
    RMat j = RMat::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
      j(2 * k, 2 * k + 1) = -1.0;
      j(2 * k + 1, 2 * k) = 1.0;
    }
    return {n, std::move(j)};
  }
};

inline RMat symplectic_form(int n) { return SymplecticForm::make(n).matrix; }

/// gamma - iJ as a Hermitian matrix.
inline HermitianMatrix minus_i_j(const RMat& gamma) {
  const int n = static_cast<int>(gamma.rows() / 2);
  return HermitianMatrix::from_parts(gamma, -symplectic_form(n));
}

namespace detail {

inline int modes_of(const RMat& gamma, const char* what) {
  require_square(gamma, what);
  if (gamma.rows() == 0 || gamma.rows() % 2 != 0) {
    std::ostringstream os;
    os << what << ": dimension " << gamma.rows() << " is not a positive even number";
    throw InputError(os.str());
  }
  return static_cast<int>(gamma.rows() / 2);
}

inline RMat ingest_symmetric(const RMat& gamma, const ToleranceConfig& tol, const char* what) {
  require_finite(gamma, what);
  const Real scale = std::max<Real>(1.0, gamma.cwiseAbs().maxCoeff());
  const Real asym = (gamma - gamma.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol.psd_tol * scale) {
    std::ostringstream os;
    os << what << ": matrix is not symmetric (max |g_jk - g_kj| = " << asym << ")";
    throw InputError(os.str());
  }
  return (gamma + gamma.transpose()) / 2.0;
}

}  // namespace detail

/// A real symmetric 2n x 2n matrix meant to describe an n-mode state.
/// Construction checks shape and symmetry; physical validity is a separate
/// question answered by validate_cm.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(const RMat& gamma, const ToleranceConfig& tol = {})
      : n_modes_(detail::modes_of(gamma, "covariance matrix")),
        gamma_(detail::ingest_symmetric(gamma, tol, "covariance matrix")) {}

  int n_modes() const { return n_modes_; }
  const RMat& gamma() const { return gamma_; }

 private:
  int n_modes_;
  RMat gamma_;
};

struct CmValidity {
  bool valid = false;
  /// lambda_min(gamma - iJ)
  Real margin = 0.0;
};

inline CmValidity validate_cm(const CovarianceMatrix& cm, const ToleranceConfig& tol = {}) {
  const PsdResult r = psd_check(minus_i_j(cm.gamma()), tol);
  return {r.is_psd, r.lambda_min};
}

/// gamma = [[A, C], [C^T, B]] with n modes on side A and m on side B.
struct BipartiteCM {
  int n = 0;
  int m = 0;
  RMat A;
  RMat B;
  RMat C;

  /// Checks shapes, finiteness and symmetry of the diagonal blocks; the
  /// diagonal blocks are symmetrized.
  static BipartiteCM make(RMat a, RMat b, RMat c, const ToleranceConfig& tol = {}) {
    const int n = detail::modes_of(a, "block A");
    const int m = detail::modes_of(b, "block B");
    if (c.rows() != a.rows() || c.cols() != b.rows()) {
      std::ostringstream os;
      os << "block C must be " << a.rows() << "x" << b.rows() << ", got " << c.rows()
         << "x" << c.cols();
      throw InputError(os.str());
    }
    require_finite(c, "block C");
    return {n, m, detail::ingest_symmetric(a, tol, "block A"),
            detail::ingest_symmetric(b, tol, "block B"), std::move(c)};
  }

  Eigen::Index dim() const { return 2 * (n + m); }
};

inline RMat assemble(const BipartiteCM& bip) {
  const Eigen::Index da = bip.A.rows();
  const Eigen::Index db = bip.B.rows();
  RMat g(da + db, da + db);
  g.topLeftCorner(da, da) = bip.A;
  g.topRightCorner(da, db) = bip.C;
  g.bottomLeftCorner(db, da) = bip.C.transpose();
  g.bottomRightCorner(db, db) = bip.B;
  return g;
}

inline CmValidity validate_cm(const BipartiteCM& bip, const ToleranceConfig& tol = {}) {
  const PsdResult r = psd_check(minus_i_j(assemble(bip)), tol);
  return {r.is_psd, r.lambda_min};
}

struct SplitResult {
  BipartiteCM blocks;
  CmValidity a_validity;
  CmValidity b_validity;
};

inline SplitResult split(const RMat& gamma, int n, int m, const ToleranceConfig& tol = {}) {
  if (n < 1 || m < 1) throw InputError("split: both sides need at least one mode");
  const CovarianceMatrix cm(gamma, tol);
  if (cm.n_modes() != n + m) {
    std::ostringstream os;
    os << "split: gamma has " << cm.n_modes() << " modes but n + m = " << n + m;
    throw InputError(os.str());
  }
  const RMat& g = cm.gamma();
  BipartiteCM bip{n, m, g.topLeftCorner(2 * n, 2 * n), g.bottomRightCorner(2 * m, 2 * m),
                  g.topRightCorner(2 * n, 2 * m)};
  const CmValidity av = validate_cm(CovarianceMatrix(bip.A, tol), tol);
  const CmValidity bv = validate_cm(CovarianceMatrix(bip.B, tol), tol);
  return {std::move(bip), av, bv};
}

/// Block-diagonal (product) state A (+) B.
inline BipartiteCM product(const RMat& a, const RMat& b, const ToleranceConfig& tol = {}) {
  return BipartiteCM::make(a, b, RMat::Zero(a.rows(), b.rows()), tol);
}

inline BipartiteCM vacuum(int n, int m) {
  return product(RMat::Identity(2 * n, 2 * n), RMat::Identity(2 * m, 2 * m));
}

/// Two-mode squeezed vacuum, one mode per side.
inline BipartiteCM tmss(Real r) {
  if (!std::isfinite(r)) throw InputError("tmss: squeeze parameter must be finite");
  const Real ch = std::cosh(2.0 * r);
  const Real sh = std::sinh(2.0 * r);
  RMat c = RMat::Zero(2, 2);
  c(0, 0) = sh;
  c(1, 1) = -sh;
  return {1, 1, ch * RMat::Identity(2, 2), ch * RMat::Identity(2, 2), c};
}

/// Adds s * perturbation to the assembled correlation matrix.
inline BipartiteCM perturbed(const BipartiteCM& bip, const RMat& perturbation, Real s) {
  const RMat g = assemble(bip) + s * perturbation;
  const Eigen::Index da = bip.A.rows();
  const Eigen::Index db = bip.B.rows();
  return {bip.n, bip.m, g.topLeftCorner(da, da), g.bottomRightCorner(db, db),
          g.topRightCorner(da, db)};
}

inline BipartiteCM shifted(const BipartiteCM& bip, Real s) {
  return perturbed(bip, RMat::Identity(bip.dim(), bip.dim()), s);
}

/// Flips the sign of every B-side momentum: gamma -> L gamma L with
/// L = 1 (+) diag(1, -1, 1, -1, ...).
inline BipartiteCM partial_transpose(const BipartiteCM& bip) {
  RVec flip = RVec::Ones(2 * bip.m);
  for (int k = 0; k < bip.m; ++k) flip(2 * k + 1) = -1.0;
  BipartiteCM out = bip;
  out.B = flip.asDiagonal() * bip.B * flip.asDiagonal();
  out.C = bip.C * flip.asDiagonal();
  return out;
}

enum class Purity { pure, mixed };

namespace detail {

/// Symmetric matrix with N(0, sigma^2) entries.
inline RMat random_symmetric(Eigen::Index dim, Real sigma, std::mt19937_64& rng) {
  std::normal_distribution<Real> nd(0.0, sigma);
  RMat h(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index k = j; k < dim; ++k) {
      h(j, k) = nd(rng);
      h(k, j) = h(j, k);
    }
  }
  return h;
}

inline RMat random_gaussian(Eigen::Index rows, Eigen::Index cols, Real sigma,
                            std::mt19937_64& rng) {
  std::normal_distribution<Real> nd(0.0, sigma);
  RMat r(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index k = 0; k < cols; ++k) r(j, k) = nd(rng);
  }
  return r;
}

}  // namespace detail

/// Product of three factors exp(J H) with random symmetric H. The entry scale
/// 1/sqrt(2n) keeps ||H||_op of order one independent of the mode count.
inline RMat random_symplectic(int n_modes, std::mt19937_64& rng) {
  const Eigen::Index dim = 2 * n_modes;
  const RMat j = symplectic_form(n_modes);
  const Real sigma = 1.0 / std::sqrt(static_cast<Real>(dim));
  RMat s = RMat::Identity(dim, dim);
  for (int f = 0; f < 3; ++f) {
    const RMat h = detail::random_symmetric(dim, sigma, rng);
    const RMat jh = j * h;
    s = s * RMat(jh.exp());
  }
  return s;
}

/// Random n-mode correlation matrix: S S^T for pure states, plus R R^T noise
/// with an entry scale drawn log-uniformly from [noise_lo, noise_hi] for mixed
/// ones.
inline RMat random_single_cm(int n_modes, Purity purity, std::mt19937_64& rng,
                             Real noise_lo = 0.05, Real noise_hi = 1.5) {
  const RMat s = random_symplectic(n_modes, rng);
  RMat g = s * s.transpose();
  if (purity == Purity::mixed) {
    std::uniform_real_distribution<Real> ud(std::log(noise_lo), std::log(noise_hi));
    const Real scale = std::exp(ud(rng));
    const RMat r = detail::random_gaussian(g.rows(), g.cols(), scale, rng);
    g += r * r.transpose();
  }
  return (g + g.transpose()) / 2.0;
}

inline BipartiteCM random_cm(int n, int m, Purity purity, std::uint64_t seed) {
  if (n < 1 || m < 1) throw InputError("random_cm: both sides need at least one mode");
  std::mt19937_64 rng(seed);
  return split(random_single_cm(n + m, purity, rng), n, m).blocks;
}

/// gamma_A (+) gamma_B + R R^T with random mixed local CMs, so that the
/// decomposition is known by construction. R has random rank.
struct SeparableFixture {
  BipartiteCM gamma;
  RMat gamma_A;
  RMat gamma_B;
};

inline SeparableFixture random_separable(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw InputError("random_separable: both sides need at least one mode");
  std::mt19937_64 rng(seed);
  // Nearly pure local blocks plus strong low-rank classical correlations put
  // many fixtures close to the boundary of the separable set.
  RMat ga = random_single_cm(n, Purity::mixed, rng, 1e-3, 5e-2);
  RMat gb = random_single_cm(m, Purity::mixed, rng, 1e-3, 5e-2);
  std::uniform_real_distribution<Real> ud(std::log(1.0), std::log(5.0));
  const Real scale = std::exp(ud(rng));
  const Eigen::Index dim = 2 * (n + m);
  std::uniform_int_distribution<Eigen::Index> rank(1, dim);
  const RMat r = detail::random_gaussian(dim, rank(rng), scale, rng);
  RMat g = RMat::Zero(dim, dim);
  g.topLeftCorner(2 * n, 2 * n) = ga;
  g.bottomRightCorner(2 * m, 2 * m) = gb;
  g += r * r.transpose();
  g = ((g + g.transpose()) / 2.0).eval();
  return {split(g, n, m).blocks, std::move(ga), std::move(gb)};
}

}  // namespace gaussep
