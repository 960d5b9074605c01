#include <doctest.h>

#include <cmath>
#include <random>

#include "splinenoise/bspline.hpp"
#include "splinenoise/checks.hpp"
#include "splinenoise/errors.hpp"
#include "splinenoise/estimator.hpp"
#include "splinenoise/linalg.hpp"

using namespace splinenoise;

namespace {

struct SplineProblem {
  KnotVector<double> kv;
  MatrixXd b;
  PenaltyOperator<double> pen;
};

SplineProblem spline_problem(int n) {
  KnotVector<double> kv = make_uniform_knots(0.0, 1.0, 4);
  const Dataset<double> data = Dataset<double>::uniform(0.0, 1.0, n);
  MatrixXd b = design_matrix(kv, data.xs);
  PenaltyOperator<double> pen = penalty_operator(kv);
  return {std::move(kv), std::move(b), std::move(pen)};
}

VectorXd random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("weight matrix validation") {
  CHECK_NOTHROW(WeightMatrix<double>::identity(4));
  VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(WeightMatrix<double>{bad}, std::invalid_argument);
  bad << 1.0, -2.0;
  CHECK_THROWS_AS(WeightMatrix<double>{bad}, std::invalid_argument);
}

TEST_CASE("identity design gives plain shrinkage") {
  const int d = 5;
  const MatrixXd eye = MatrixXd::Identity(d, d);
  const double lambda = 0.7;
  const HatMatrix<double> h =
      hat_matrix(eye, WeightMatrix<double>::identity(d), eye, lambda);
  CHECK((h.H - eye / (1.0 + lambda)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("Tikhonov special case matches the ridge formula") {
  const SplineProblem p = spline_problem(10);
  const int d = static_cast<int>(p.b.cols());
  for (double lambda : {0.1, 1.0, 7.3}) {
    const HatMatrix<double> h = hat_matrix(
        p.b, WeightMatrix<double>::identity(10), MatrixXd::Identity(d, d),
        lambda);
    const MatrixXd direct =
        (p.b.transpose() * p.b + lambda * MatrixXd::Identity(d, d))
            .ldlt()
            .solve(MatrixXd(p.b.transpose()));
    CHECK((h.H - direct).norm() / direct.norm() <= 1e-10);
  }
}

TEST_CASE("fit satisfies the normal equation") {
  const SplineProblem p = spline_problem(10);
  std::mt19937_64 rng(41);
  VectorXd mdiag(10);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (int i = 0; i < 10; ++i) mdiag(i) = u(rng);
  const WeightMatrix<double> m(mdiag);

  for (int t = 0; t < 100; ++t) {
    const VectorXd y = random_vector(rng, 10);
    const double lambda = std::pow(10.0, -2.0 + 4.0 * (t % 10) / 9.0);
    const FitResult<double> f = fit(y, p.b, m, p.pen.L, lambda);

    CHECK((f.fitted + f.residual - y).cwiseAbs().maxCoeff() <=
          1e-14 * y.cwiseAbs().maxCoeff());

    const MatrixXd m2 = (mdiag.array() * mdiag.array()).matrix().asDiagonal();
    const VectorXd lhs =
        (p.b.transpose() * m2 * p.b + lambda * p.pen.L.transpose() * p.pen.L) *
        f.beta_hat;
    const VectorXd rhs = p.b.transpose() * m2 * y;
    CHECK((lhs - rhs).norm() <= 1e-9 * rhs.norm());

    // equivalent form: B^T M^2 residual = lambda L^T L beta
    const VectorXd left = p.b.transpose() * m2 * f.residual;
    const VectorXd right = lambda * p.pen.L.transpose() * (p.pen.L * f.beta_hat);
    CHECK((left - right).norm() <= 1e-9 * (1.0 + right.norm()));
  }
}

TEST_CASE("an affine spline is a fixed point for every lambda") {
  const SplineProblem p = spline_problem(10);
  const VectorXd grev = greville_abscissae(p.kv);
  const VectorXd beta0 = 1.5 * grev - 0.5 * VectorXd::Ones(8);
  const VectorXd y = p.b * beta0;
  for (double lambda : {0.01, 1.0, 100.0, 1e6}) {
    const FitResult<double> f =
        fit(y, p.b, WeightMatrix<double>::identity(10), p.pen.L, lambda);
    CHECK(f.residual.cwiseAbs().maxCoeff() <= 1e-11);
    CHECK((f.beta_hat - beta0).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("in-span data is reproduced as lambda -> 0 when n <= d") {
  const SplineProblem p = spline_problem(6);
  std::mt19937_64 rng(43);
  const VectorXd beta0 = random_vector(rng, 8);
  const VectorXd y = p.b * beta0;
  const FitResult<double> f =
      fit(y, p.b, WeightMatrix<double>::identity(6), p.pen.L, 1e-10);
  CHECK(f.residual.cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("fit is linear in the data") {
  const SplineProblem p = spline_problem(10);
  std::mt19937_64 rng(47);
  const WeightMatrix<double> m = WeightMatrix<double>::identity(10);
  for (int t = 0; t < 10; ++t) {
    const VectorXd y1 = random_vector(rng, 10);
    const VectorXd y2 = random_vector(rng, 10);
    const double alpha = 2.5;
    const FitResult<double> f1 = fit(y1, p.b, m, p.pen.L, 1.0);
    const FitResult<double> f2 = fit(y2, p.b, m, p.pen.L, 1.0);
    const FitResult<double> fc =
        fit((alpha * y1 + y2).eval(), p.b, m, p.pen.L, 1.0);
    CHECK((fc.beta_hat - alpha * f1.beta_hat - f2.beta_hat).cwiseAbs()
              .maxCoeff() <= 1e-10);
    CHECK((fc.residual - alpha * f1.residual - f2.residual).cwiseAbs()
              .maxCoeff() <= 1e-10);
  }
}

TEST_CASE("first-order optimality of the fitted coefficients") {
  const SplineProblem p = spline_problem(10);
  std::mt19937_64 rng(53);
  const VectorXd y = random_vector(rng, 10);
  const double lambda = 1.0;
  const WeightMatrix<double> m = WeightMatrix<double>::identity(10);
  const FitResult<double> f = fit(y, p.b, m, p.pen.L, lambda);

  const auto objective = [&](const VectorXd& beta) {
    return (y - p.b * beta).squaredNorm() +
           lambda * (p.pen.L * beta).squaredNorm();
  };
  const double at_min = objective(f.beta_hat);
  for (int t = 0; t < 100; ++t) {
    VectorXd dir = random_vector(rng, 8);
    dir.normalize();
    CHECK(objective(f.beta_hat + 1e-4 * dir) >= at_min - 1e-12);
  }
}

TEST_CASE("penalty norm decreases along the regularization path") {
  const SplineProblem p = spline_problem(10);
  std::mt19937_64 rng(59);
  const WeightMatrix<double> m = WeightMatrix<double>::identity(10);
  for (int t = 0; t < 10; ++t) {
    const VectorXd y = random_vector(rng, 10);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      const FitResult<double> f = fit(y, p.b, m, p.pen.L, lambda);
      const double pen_norm = (p.pen.L * f.beta_hat).norm();
      CHECK(pen_norm <= prev + 1e-12);
      prev = pen_norm;
    }
  }
}

TEST_CASE("hat matrix converges to both limit operators") {
  CheckResult low = check_weighted_pinv_limit();
  INFO(low.detail, " observed=", low.observed);
  CHECK(low.passed);
  CheckResult high = check_lambda_inf_limit();
  INFO(high.detail, " observed=", high.observed);
  CHECK(high.passed);
}

TEST_CASE("natural spline boundary conditions at the knots") {
  const KnotVector<double> kv = make_uniform_knots(0.0, 1.0, 4);

  const VectorXd constant = VectorXd::Constant(6, 3.25);
  const auto [ca, cb] = natural_spline_check(kv, constant, 1.0);
  CHECK(std::abs(ca) <= 1e-10);
  CHECK(std::abs(cb) <= 1e-10);

  std::mt19937_64 rng(61);
  for (double lambda : {1.0, 10.0}) {
    for (int t = 0; t < 5; ++t) {
      const VectorXd y = random_vector(rng, 6);
      const auto [d2a, d2b] = natural_spline_check(kv, y, lambda);
      const double scale = y.cwiseAbs().maxCoeff();
      CHECK(std::abs(d2a) <= 1e-7 * scale);
      CHECK(std::abs(d2b) <= 1e-7 * scale);
    }
  }

  CHECK_THROWS_AS(natural_spline_check(kv, VectorXd::Ones(5), 1.0),
                  std::invalid_argument);
}

TEST_CASE("singular penalized systems are reported") {
  // N(B) and N(L) share the second coordinate direction
  MatrixXd b(1, 2);
  b << 1.0, 0.0;
  MatrixXd l(1, 2);
  l << 1.0, 0.0;
  CHECK_THROWS_AS(
      hat_matrix(b, WeightMatrix<double>::identity(1), l, 1.0),
      SingularSystemError);

  CHECK_THROWS_AS(
      hat_matrix(b, WeightMatrix<double>::identity(1), MatrixXd::Identity(2, 2),
                 0.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      hat_matrix(b, WeightMatrix<double>::identity(1), MatrixXd::Identity(2, 2),
                 -1.0),
      std::invalid_argument);
}

}  // TEST_SUITE
