#include <doctest.h>

#include <cmath>
#include <random>

#include "splinenoise/bspline.hpp"
#include "splinenoise/checks.hpp"

using namespace splinenoise;

namespace {

KnotVector<double> unit_knots(int K = 4) { return make_uniform_knots(0.0, 1.0, K); }

}  // namespace

TEST_SUITE("bspline") {

TEST_CASE("uniform knot construction") {
  const KnotVector<double> kv = unit_knots();
  CHECK(kv.num_interior() == 4);
  CHECK(kv.num_basis() == 8);
  REQUIRE(kv.interior().size() == 4);
  CHECK(kv.interior()[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(kv.interior()[1] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(kv.interior()[2] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(kv.interior()[3] == doctest::Approx(0.8).epsilon(1e-15));

  const KnotVector<double> single = make_uniform_knots(0.0, 1.0, 1);
  CHECK(single.interior()[0] == doctest::Approx(0.5));

  const KnotVector<double> shifted = make_uniform_knots(2.0, 4.0, 3);
  CHECK(shifted.interior()[0] == doctest::Approx(2.5));
  CHECK(shifted.interior()[1] == doctest::Approx(3.0));
  CHECK(shifted.interior()[2] == doctest::Approx(3.5));

  // clamped extended sequence: 4-fold endpoint multiplicity, K+8 knots
  const auto& t = kv.extended();
  REQUIRE(t.size() == 12);
  for (int i = 0; i < 4; ++i) {
    CHECK(t[i] == 0.0);
    CHECK(t[8 + i] == 1.0);
  }
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i - 1] <= t[i]);

  CHECK_THROWS_AS(make_uniform_knots(1.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_uniform_knots(2.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_uniform_knots(0.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(KnotVector<double>(0.0, 1.0, {0.4, 0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(KnotVector<double>(0.0, 1.0, {0.4, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("dataset validation") {
  const Dataset<double> d = Dataset<double>::uniform(0.0, 1.0, 10);
  REQUIRE(d.xs.size() == 10);
  CHECK(d.xs(0) == 0.0);
  CHECK(d.xs(9) == 1.0);
  for (int i = 1; i < 10; ++i) {
    CHECK(d.xs(i) - d.xs(i - 1) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  }
  VectorXd bad(3);
  bad << 0.0, 0.5, 0.5;
  CHECK_THROWS_AS(Dataset<double>(bad, VectorXd()), std::invalid_argument);
}

TEST_CASE("clamped basis interpolates the endpoints") {
  const KnotVector<double> kv = unit_knots();
  CHECK(eval_basis(kv, -3, 4, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (int j = -2; j <= 4; ++j) CHECK(eval_basis(kv, j, 4, 0.0) == 0.0);
  CHECK(eval_basis(kv, 4, 4, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (int j = -3; j <= 3; ++j) CHECK(eval_basis(kv, j, 4, 1.0) == 0.0);
}

TEST_CASE("partition of unity, non-negativity, local support") {
  const KnotVector<double> kv = unit_knots();
  for (int k = 0; k < 1000; ++k) {
    const double x = static_cast<double>(k) / 999.0;
    double sum = 0.0;
    for (int j = -3; j <= 4; ++j) {
      const double v = eval_basis(kv, j, 4, x);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      const int jj = j + kIndexOffset;
      if (x < kv.extended_knot(jj) || x > kv.extended_knot(jj + 4)) {
        CHECK(v == 0.0);
      }
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("interior cardinal basis value at its central knot is 2/3") {
  // basis index 1 has uniform knots 0.2..1.0 with center 0.6
  const KnotVector<double> kv = unit_knots();
  CHECK(eval_basis(kv, 1, 4, 0.6) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // its neighbors at that knot carry 1/6 each
  CHECK(eval_basis(kv, 0, 4, 0.6) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(eval_basis(kv, 2, 4, 0.6) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("evaluation outside the domain is rejected") {
  const KnotVector<double> kv = unit_knots();
  CHECK_THROWS_AS(eval_basis(kv, 0, 4, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(eval_basis(kv, 0, 4, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(eval_basis(kv, 5, 4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(eval_basis(kv, -4, 4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(eval_basis(kv, -2, 2, 0.5), std::invalid_argument);
  VectorXd xs(1);
  xs << 1.5;
  CHECK_THROWS_AS(design_matrix(unit_knots(), xs), std::invalid_argument);
}

TEST_CASE("design matrix shape, row sums and sparsity") {
  const KnotVector<double> kv = unit_knots();
  const Dataset<double> data6 = Dataset<double>::uniform(0.0, 1.0, 6);
  const MatrixXd b6 = design_matrix(kv, data6.xs);
  REQUIRE(b6.rows() == 6);
  REQUIRE(b6.cols() == 8);
  for (int i = 0; i < 6; ++i) {
    CHECK(b6.row(i).sum() == doctest::Approx(1.0).epsilon(1e-13));
  }

  const Dataset<double> data10 = Dataset<double>::uniform(0.0, 1.0, 10);
  const MatrixXd b10 = design_matrix(kv, data10.xs);
  for (int i = 0; i < 10; ++i) {
    int nonzeros = 0;
    for (int c = 0; c < 8; ++c) {
      if (b10(i, c) != 0.0) ++nonzeros;
      CHECK(b10(i, c) >= 0.0);
      CHECK(b10(i, c) <= 1.0);
    }
    CHECK(nonzeros <= 4);
  }
}

TEST_CASE("design matrix at the knot sites") {
  const KnotVector<double> kv = unit_knots();
  const std::vector<double> sites = kv.knots_with_endpoints();
  VectorXd xs(static_cast<Eigen::Index>(sites.size()));
  for (std::size_t i = 0; i < sites.size(); ++i) xs(i) = sites[i];
  const MatrixXd b = design_matrix(kv, xs);
  REQUIRE(b.rows() == 6);
  REQUIRE(b.cols() == 8);
  CHECK(b(0, 0) == doctest::Approx(1.0));
  CHECK(b.row(0).tail(7).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b(5, 7) == doctest::Approx(1.0));
  CHECK(b.row(5).head(7).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("second-difference operator annihilates affine coefficients") {
  const KnotVector<double> kv = unit_knots();
  const MatrixXd d2 = delta2_matrix(kv);
  REQUIRE(d2.rows() == 6);
  REQUIRE(d2.cols() == 8);

  CHECK((d2 * VectorXd::Ones(8)).cwiseAbs().maxCoeff() <= 1e-13);

  // Greville coefficients represent x exactly; their second difference is 0
  const VectorXd grev = greville_abscissae(kv);
  CHECK((d2 * grev).cwiseAbs().maxCoeff() <= 1e-13);

  // and 3x - 2 as a generic affine function
  const VectorXd affine = 3.0 * grev - 2.0 * VectorXd::Ones(8);
  CHECK((d2 * affine).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("greville coefficients reproduce affine functions on the grid") {
  const KnotVector<double> kv = unit_knots();
  const Dataset<double> data = Dataset<double>::uniform(0.0, 1.0, 17);
  const MatrixXd b = design_matrix(kv, data.xs);
  const VectorXd grev = greville_abscissae(kv);
  const VectorXd values = b * (2.5 * grev + 0.75 * VectorXd::Ones(8));
  for (int i = 0; i < 17; ++i) {
    CHECK(values(i) ==
          doctest::Approx(2.5 * data.xs(i) + 0.75).epsilon(1e-13));
  }
}

TEST_CASE("delta2 matches a finite-difference second derivative") {
  const KnotVector<double> kv = unit_knots();
  const MatrixXd d2 = delta2_matrix(kv);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd beta(8);
  for (int i = 0; i < 8; ++i) beta(i) = gauss(rng);
  const VectorXd beta2 = d2 * beta;
  const SplineFunction<double> s(kv, beta);

  const double h = 1e-5;
  std::uniform_real_distribution<double> xdist(0.05, 0.95);
  for (int t = 0; t < 25; ++t) {
    const double x = xdist(rng);
    // value of sum_j (Delta2 beta)_j S_{j,2} at x
    double lhs = 0.0;
    for (int j = -1; j <= 4; ++j) {
      lhs += beta2(j + 1) * eval_basis(kv, j, 2, x);
    }
    const double fd =
        (eval_spline(s, x + h) - 2.0 * eval_spline(s, x) +
         eval_spline(s, x - h)) /
        (h * h);
    CHECK(lhs == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("order-2 gram matrix has the closed-form entries") {
  const KnotVector<double> kv = unit_knots();
  const MatrixXd r = gram_matrix_order2(kv);
  REQUIRE(r.rows() == 6);
  REQUIRE(r.cols() == 6);
  const double h = 0.2;
  // boundary half-hat
  CHECK(r(0, 0) == doctest::Approx(h / 3.0).epsilon(1e-14));
  CHECK(r(5, 5) == doctest::Approx(h / 3.0).epsilon(1e-14));
  // interior hats
  for (int i = 1; i <= 4; ++i) {
    CHECK(r(i, i) == doctest::Approx(2.0 * h / 3.0).epsilon(1e-14));
  }
  // neighbors overlap on one interval
  for (int i = 0; i < 5; ++i) {
    CHECK(r(i, i + 1) == doctest::Approx(h / 6.0).epsilon(1e-14));
    CHECK(r(i + 1, i) == doctest::Approx(h / 6.0).epsilon(1e-14));
  }
  // disjoint supports vanish exactly
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (std::abs(i - j) >= 2) CHECK(r(i, j) == 0.0);
    }
  }
  CHECK((r - r.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(r);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-14);
}

TEST_CASE("penalty operator realizes the exact curvature energy") {
  const KnotVector<double> kv = unit_knots();
  const PenaltyOperator<double> pen = penalty_operator(kv);
  REQUIRE(pen.L.rows() == 6);
  REQUIRE(pen.L.cols() == 8);

  CHECK((pen.L * VectorXd::Ones(8)).squaredNorm() <= 1e-20);

  VectorXd bump = VectorXd::Zero(8);
  bump(6) = 1.0;  // basis index 3: a single basis function is not affine
  CHECK((pen.L * bump).squaredNorm() > 1.0);

  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    VectorXd beta(8);
    for (int i = 0; i < 8; ++i) beta(i) = gauss(rng);
    const double algebraic = (pen.L * beta).squaredNorm();
    const double quad =
        curvature_energy_by_quadrature(SplineFunction<double>(kv, beta));
    worst = std::max(worst, std::abs(algebraic - quad) / quad);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("penalty exactness holds on non-uniform knots too") {
  const KnotVector<double> kv(0.0, 2.0, {0.3, 0.35, 1.1, 1.9});
  const PenaltyOperator<double> pen = penalty_operator(kv);
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    VectorXd beta(kv.num_basis());
    for (int i = 0; i < beta.size(); ++i) beta(i) = gauss(rng);
    const double algebraic = (pen.L * beta).squaredNorm();
    const double quad =
        curvature_energy_by_quadrature(SplineFunction<double>(kv, beta));
    CHECK(std::abs(algebraic - quad) / quad <= 1e-10);
  }
}

TEST_CASE("spline evaluation and derivatives") {
  const KnotVector<double> kv = unit_knots();
  const SplineFunction<double> constant(kv, VectorXd::Ones(8));
  for (double x : {0.0, 0.13, 0.5, 0.99, 1.0}) {
    CHECK(constant(x, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(constant(x, 1)) <= 1e-12);
    CHECK(std::abs(constant(x, 2)) <= 1e-11);
  }

  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd beta(8);
  for (int i = 0; i < 8; ++i) beta(i) = gauss(rng);
  const SplineFunction<double> s(kv, beta);
  const MatrixXd d2 = delta2_matrix(kv);
  const VectorXd beta2 = d2 * beta;

  std::uniform_real_distribution<double> xdist(0.01, 0.99);
  for (int t = 0; t < 25; ++t) {
    const double x = xdist(rng);
    // consistency of the two derivative routes
    double via_delta2 = 0.0;
    for (int j = -1; j <= 4; ++j) {
      via_delta2 += beta2(j + 1) * eval_basis(kv, j, 2, x);
    }
    CHECK(s(x, 2) == doctest::Approx(via_delta2).epsilon(1e-11));

    const double h = 1e-6;
    const double fd1 = (s(x + h) - s(x - h)) / (2.0 * h);
    CHECK(s(x, 1) == doctest::Approx(fd1).epsilon(1e-7));
  }

  CHECK_THROWS_AS(eval_spline(s, -0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(eval_spline(s, 0.5, 3), std::invalid_argument);
  CHECK_THROWS_AS(SplineFunction<double>(kv, VectorXd::Ones(5)),
                  std::invalid_argument);
}

TEST_CASE("basis evaluation works for float scalars") {
  const KnotVector<float> kv = make_uniform_knots(0.0f, 1.0f, 4);
  for (int k = 0; k < 50; ++k) {
    const float x = static_cast<float>(k) / 49.0f;
    float sum = 0.0f;
    for (int j = -3; j <= 4; ++j) sum += eval_basis(kv, j, 4, x);
    CHECK(std::abs(sum - 1.0f) <= 1e-5f);
  }
}

}  // TEST_SUITE
