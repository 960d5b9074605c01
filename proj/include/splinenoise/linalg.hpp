#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "splinenoise/errors.hpp"
#include "splinenoise/types.hpp"

namespace splinenoise {

/// Numerical rank cutoff for pseudoinverse truncation. A singular value
/// sigma_k is treated as zero when sigma_k <= rel_tol * max(rows, cols) *
/// sigma_max.
struct RankTolerance {
  double rel_tol = 1e-12;

  static RankTolerance relative(double r) { return RankTolerance{r}; }

  template <typename Scalar>
  Scalar cutoff(Eigen::Index rows, Eigen::Index cols, Scalar sigma_max) const {
    return static_cast<Scalar>(rel_tol) *
           static_cast<Scalar>(std::max(rows, cols)) * sigma_max;
  }
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (!a.allFinite()) {
    throw DecompositionError(std::string(what) + ": non-finite input");
  }
}

template <typename Scalar>
Eigen::Index truncated_rank(const VectorX<Scalar>& singular_values,
                            Eigen::Index rows, Eigen::Index cols,
                            RankTolerance tol) {
  if (!(tol.rel_tol > 0)) {
    throw std::invalid_argument("RankTolerance: rel_tol must be positive");
  }
  if (singular_values.size() == 0) return 0;
  const Scalar cut = tol.cutoff(rows, cols, singular_values(0));
  Eigen::Index r = 0;
  while (r < singular_values.size() && singular_values(r) > cut) ++r;
  return r;
}

}  // namespace detail

/// Moore-Penrose pseudoinverse through a singular value decomposition,
/// inverting singular values above the rank cutoff and zeroing the rest.
template <typename Derived>
MatrixX<typename Derived::Scalar> pinv(const Eigen::MatrixBase<Derived>& a,
                                       RankTolerance tol = {}) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(a, "pinv");
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(
      a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorX<Scalar>& sv = svd.singularValues();
  const Eigen::Index r = detail::truncated_rank(sv, a.rows(), a.cols(), tol);
  MatrixX<Scalar> result = MatrixX<Scalar>::Zero(a.cols(), a.rows());
  if (r > 0) {
    result = svd.matrixV().leftCols(r) *
             sv.head(r).cwiseInverse().asDiagonal() *
             svd.matrixU().leftCols(r).transpose();
  }
  return result;
}

/// Orthogonal projector onto the null space of A, i.e. P_A = I - A^+ A.
/// Assembled from the trailing right singular vectors so that a full
/// column rank input yields an exactly zero matrix.
template <typename Derived>
MatrixX<typename Derived::Scalar> null_projector(
    const Eigen::MatrixBase<Derived>& a, RankTolerance tol = {}) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(a, "null_projector");
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(a, Eigen::ComputeFullV);
  const Eigen::Index r =
      detail::truncated_rank(svd.singularValues(), a.rows(), a.cols(), tol);
  const Eigen::Index nullity = a.cols() - r;
  if (nullity == 0) return MatrixX<Scalar>::Zero(a.cols(), a.cols());
  MatrixX<Scalar> vn = svd.matrixV().rightCols(nullity);
  return vn * vn.transpose();
}

/// Symmetric positive semidefinite square root. Eigenvalues inside the
/// tolerance band below zero are clamped to zero; anything further below
/// raises NotPsdError.
template <typename Derived>
MatrixX<typename Derived::Scalar> sqrt_psd(
    const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(s, "sqrt_psd");
  if (s.rows() != s.cols()) {
    throw std::invalid_argument("sqrt_psd: matrix must be square");
  }
  const Scalar scale = std::max(Scalar(1), s.cwiseAbs().maxCoeff());
  if (((s - s.transpose()).cwiseAbs().maxCoeff()) > Scalar(1e-10) * scale) {
    throw std::invalid_argument("sqrt_psd: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(s);
  if (eig.info() != Eigen::Success) {
    throw DecompositionError("sqrt_psd: eigendecomposition failed");
  }
  VectorX<Scalar> ev = eig.eigenvalues();
  const Scalar spectral = ev.cwiseAbs().maxCoeff();
  const Scalar band = Scalar(1e-10) * spectral;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -band) {
      throw NotPsdError("sqrt_psd: eigenvalue below tolerance");
    }
    ev(i) = std::max(ev(i), Scalar(0));
  }
  return eig.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

/// ML-weighted pseudoinverse of B,
///   B^+_ML = (I - (L P_MB)^+ L) (M B)^+ M,
/// the limit of the penalized estimator as the smoothing parameter goes
/// to zero when N(MB) and N(L) intersect trivially.
template <typename DB, typename DM, typename DL>
MatrixX<typename DB::Scalar> weighted_pinv(const Eigen::MatrixBase<DB>& b,
                                           const Eigen::MatrixBase<DM>& m,
                                           const Eigen::MatrixBase<DL>& l,
                                           RankTolerance tol = {}) {
  using Scalar = typename DB::Scalar;
  if (m.cols() != b.rows()) {
    throw std::invalid_argument("weighted_pinv: M must have n columns");
  }
  if (l.cols() != b.cols()) {
    throw std::invalid_argument("weighted_pinv: L must have d columns");
  }
  const MatrixX<Scalar> mb = m * b;
  const MatrixX<Scalar> p_mb = null_projector(mb, tol);
  const MatrixX<Scalar> correction =
      MatrixX<Scalar>::Identity(b.cols(), b.cols()) -
      pinv((l * p_mb).eval(), tol) * l;
  return correction * pinv(mb, tol) * m;
}

/// Limit of the hat matrix as the smoothing parameter goes to infinity,
///   C_MBL = (M B P_L)^+ M.
template <typename DB, typename DM, typename DL>
MatrixX<typename DB::Scalar> lambda_inf_limit(const Eigen::MatrixBase<DB>& b,
                                              const Eigen::MatrixBase<DM>& m,
                                              const Eigen::MatrixBase<DL>& l,
                                              RankTolerance tol = {}) {
  using Scalar = typename DB::Scalar;
  if (m.cols() != b.rows()) {
    throw std::invalid_argument("lambda_inf_limit: M must have n columns");
  }
  if (l.cols() != b.cols()) {
    throw std::invalid_argument("lambda_inf_limit: L must have d columns");
  }
  const MatrixX<Scalar> p_l = null_projector(l, tol);
  return pinv((m * b * p_l).eval(), tol) * m;
}

}  // namespace splinenoise
