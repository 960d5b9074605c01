#pragma once

#include <cmath>
#include <utility>

#include "splinenoise/bspline.hpp"
#include "splinenoise/errors.hpp"
#include "splinenoise/types.hpp"

namespace splinenoise {

/// Diagonal weight matrix M defining the residual quasi-norm
/// ||x||_M^2 = x^T M^T M x.
template <typename Scalar = double>
struct WeightMatrix {
  VectorX<Scalar> diag;

  explicit WeightMatrix(VectorX<Scalar> d) : diag(std::move(d)) {
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      if (!(diag(i) > Scalar(0)) || !std::isfinite(diag(i))) {
        throw std::invalid_argument(
            "WeightMatrix: diagonal must be positive and finite");
      }
    }
  }

  static WeightMatrix identity(Eigen::Index n) {
    return WeightMatrix(VectorX<Scalar>::Ones(n));
  }

  MatrixX<Scalar> dense() const { return diag.asDiagonal(); }
};

/// The linear estimator map y -> beta_hat for a fixed smoothing parameter:
/// H = (B^T M^T M B + lambda L^T L)^{-1} B^T M^T M.
template <typename Scalar = double>
struct HatMatrix {
  Scalar lambda;
  MatrixX<Scalar> H;  // d x n
};

template <typename Scalar = double>
struct FitResult {
  VectorX<Scalar> beta_hat;
  VectorX<Scalar> fitted;    // B beta_hat
  VectorX<Scalar> residual;  // y - fitted, the noise estimator
};

namespace detail {

// Penalized weighted least squares in stacked form: the normal equation
// (B^T M^2 B + lambda L^T L) beta = B^T M^2 y is solved as the least
// squares problem || [M B; sqrt(lambda) L] beta - [M y; 0] ||.  The
// stacked operator has the square root of the normal matrix's condition
// number, which keeps the extreme ends of the lambda range accurate.
template <typename Scalar>
class PenalizedSystem {
 public:
  template <typename DB, typename DL>
  PenalizedSystem(const Eigen::MatrixBase<DB>& b,
                  const WeightMatrix<Scalar>& m,
                  const Eigen::MatrixBase<DL>& l, Scalar lambda) {
    if (!(lambda > Scalar(0)) || !std::isfinite(lambda)) {
      throw std::invalid_argument("lambda must be positive and finite");
    }
    if (m.diag.size() != b.rows()) {
      throw std::invalid_argument("weight size must match row count of B");
    }
    if (l.cols() != b.cols()) {
      throw std::invalid_argument("penalty column count must match B");
    }
    MatrixX<Scalar> g(b.rows() + l.rows(), b.cols());
    g.topRows(b.rows()) = m.diag.asDiagonal() * b;
    g.bottomRows(l.rows()) = std::sqrt(lambda) * l;
    svd_.compute(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd_.singularValues();
    // Singular exactly when N(MB) and N(L) intersect; the stacked operator
    // is then rank deficient for every lambda.
    if (sv.size() == 0 || !(sv(sv.size() - 1) > kSingularRatio * sv(0))) {
      throw SingularSystemError(
          "penalized system is numerically singular (N(MB) and N(L) "
          "intersect)");
    }
  }

  // Minimizer for stacked right-hand side columns.
  MatrixX<Scalar> solve_stacked(const MatrixX<Scalar>& rhs) const {
    return svd_.matrixV() *
           (svd_.singularValues().cwiseInverse().asDiagonal() *
            (svd_.matrixU().transpose() * rhs));
  }

  static constexpr Scalar kSingularRatio = Scalar(1e-9);

 private:
  Eigen::JacobiSVD<MatrixX<Scalar>> svd_;
};

}  // namespace detail

/// Hat matrix of the penalized weighted least-squares problem
///   min ||y - B beta||_M^2 + lambda ||L beta||^2.
/// Requires N(MB) and N(L) to intersect trivially.
template <typename DB, typename DL>
HatMatrix<typename DB::Scalar> hat_matrix(
    const Eigen::MatrixBase<DB>& b,
    const WeightMatrix<typename DB::Scalar>& m,
    const Eigen::MatrixBase<DL>& l, typename DB::Scalar lambda) {
  using Scalar = typename DB::Scalar;
  detail::PenalizedSystem<Scalar> sys(b, m, l, lambda);
  MatrixX<Scalar> rhs = MatrixX<Scalar>::Zero(b.rows() + l.rows(), b.rows());
  rhs.topRows(b.rows()) = m.dense();
  return HatMatrix<Scalar>{lambda, sys.solve_stacked(rhs)};
}

/// Direct penalized fit; computes beta_hat without forming the full hat
/// matrix.
template <typename DY, typename DB, typename DL>
FitResult<typename DB::Scalar> fit(const Eigen::MatrixBase<DY>& y,
                                   const Eigen::MatrixBase<DB>& b,
                                   const WeightMatrix<typename DB::Scalar>& m,
                                   const Eigen::MatrixBase<DL>& l,
                                   typename DB::Scalar lambda) {
  using Scalar = typename DB::Scalar;
  if (y.size() != b.rows() || y.cols() != 1) {
    throw std::invalid_argument("fit: y must be a vector matching B's rows");
  }
  detail::PenalizedSystem<Scalar> sys(b, m, l, lambda);
  MatrixX<Scalar> rhs = MatrixX<Scalar>::Zero(b.rows() + l.rows(), 1);
  rhs.topRows(b.rows()) = (m.diag.array() * y.array()).matrix();
  FitResult<Scalar> out;
  out.beta_hat = sys.solve_stacked(rhs).col(0);
  out.fitted = b * out.beta_hat;
  out.residual = y - out.fitted;
  return out;
}

/// Smoothing fit with data placed exactly at the knots kappa_0..kappa_{K+1}
/// and M = I; returns (s''(a), s''(b)) of the fitted spline. Both vanish
/// for every y and lambda: the minimizer is the natural cubic spline.
template <typename Scalar, typename DY>
std::pair<Scalar, Scalar> natural_spline_check(const KnotVector<Scalar>& kv,
                                               const Eigen::MatrixBase<DY>& y,
                                               Scalar lambda) {
  const std::vector<Scalar> sites = kv.knots_with_endpoints();
  if (y.size() != static_cast<Eigen::Index>(sites.size())) {
    throw std::invalid_argument(
        "natural_spline_check: y must have K+2 entries");
  }
  VectorX<Scalar> xs(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    xs(static_cast<Eigen::Index>(i)) = sites[i];
  }
  const MatrixX<Scalar> b = design_matrix(kv, xs);
  const PenaltyOperator<Scalar> pen = penalty_operator(kv);
  const FitResult<Scalar> res =
      fit(y, b, WeightMatrix<Scalar>::identity(xs.size()), pen.L, lambda);
  const SplineFunction<Scalar> s(kv, res.beta_hat);
  return {eval_spline(s, kv.a(), 2), eval_spline(s, kv.b(), 2)};
}

}  // namespace splinenoise
