#include "splinenoise/checks.hpp"

#include <cmath>
#include <random>

#include "splinenoise/estimator.hpp"
#include "splinenoise/linalg.hpp"

namespace splinenoise {

namespace {

constexpr double kTiny = 1e-300;

double frob(const MatrixXd& m) { return m.norm(); }

MatrixXd random_matrix(std::mt19937_64& rng, int kind) {
  std::uniform_int_distribution<int> dim(1, 30);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int rows = dim(rng);
  const int cols = dim(rng);
  MatrixXd a(rows, cols);
  switch (kind % 4) {
    case 0: {  // dense full rank (almost surely)
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = gauss(rng);
      break;
    }
    case 1: {  // exact low rank product
      std::uniform_int_distribution<int> rdist(0, std::min(rows, cols));
      const int r = rdist(rng);
      if (r == 0) {
        a.setZero();
      } else {
        MatrixXd g1(rows, r), g2(r, cols);
        for (int i = 0; i < rows; ++i)
          for (int j = 0; j < r; ++j) g1(i, j) = gauss(rng);
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < cols; ++j) g2(i, j) = gauss(rng);
        a = g1 * g2;
      }
      break;
    }
    case 2: {  // zero matrix
      a.setZero();
      break;
    }
    default: {  // badly scaled dense
      std::uniform_int_distribution<int> exp10(-8, 8);
      const double scale = std::pow(10.0, exp10(rng));
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = scale * gauss(rng);
      break;
    }
  }
  return a;
}

struct LimitProblem {
  MatrixXd design;
  WeightMatrix<double> weights;
  MatrixXd penalty_l;
};

// The K=4, n=10 spline problem with oracle weights for sigma = 0.5.
LimitProblem limit_problem() {
  const KnotVector<double> kv = make_uniform_knots(0.0, 1.0, 4);
  const Dataset<double> data = Dataset<double>::uniform(0.0, 1.0, 10);
  VectorXd diag = VectorXd::Constant(10, 2.0);
  diag(0) = 1.0;
  return LimitProblem{design_matrix(kv, data.xs),
                      WeightMatrix<double>(diag), penalty_operator(kv).L};
}

}  // namespace

CheckResult check_penrose_conditions(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < count; ++t) {
    const MatrixXd a = random_matrix(rng, t);
    const MatrixXd p = pinv(a);
    const MatrixXd ap = a * p;
    const MatrixXd pa = p * a;
    const double r1 = frob(ap * a - a) / std::max(frob(a), kTiny);
    const double r2 = frob(pa * p - p) / std::max(frob(p), kTiny);
    const double r3 = frob(ap.transpose() - ap) / (1.0 + frob(ap));
    const double r4 = frob(pa.transpose() - pa) / (1.0 + frob(pa));
    worst = std::max({worst, r1, r2, r3, r4});
  }
  CheckResult res;
  res.name = "penrose_conditions";
  res.observed = worst;
  res.threshold = 1e-9;
  res.passed = worst <= res.threshold;
  res.detail = "worst relative Penrose residual over " +
               std::to_string(count) + " random matrices";
  return res;
}

double curvature_energy_by_quadrature(const SplineFunction<double>& s) {
  // 5-point Gauss-Legendre on [-1, 1]
  static const double nodes[5] = {-0.906179845938663993, -0.538469310105683091,
                                  0.0, 0.538469310105683091,
                                  0.906179845938663993};
  static const double weights[5] = {0.236926885056189088, 0.478628670499366468,
                                    128.0 / 225.0, 0.478628670499366468,
                                    0.236926885056189088};
  const std::vector<double> knots = s.knots.knots_with_endpoints();
  double total = 0.0;
  for (std::size_t seg = 0; seg + 1 < knots.size(); ++seg) {
    const double mid = 0.5 * (knots[seg] + knots[seg + 1]);
    const double half = 0.5 * (knots[seg + 1] - knots[seg]);
    for (int g = 0; g < 5; ++g) {
      const double x = mid + half * nodes[g];
      const double d2 = eval_spline(s, x, 2);
      total += half * weights[g] * d2 * d2;
    }
  }
  return total;
}

CheckResult check_penalty_quadrature(const KnotVector<double>& kv,
                                     const MatrixXd& penalty_l,
                                     std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = kv.num_basis();
  double worst = 0.0;
  for (int t = 0; t < count; ++t) {
    VectorXd beta(d);
    for (int i = 0; i < d; ++i) beta(i) = gauss(rng);
    const double algebraic = (penalty_l * beta).squaredNorm();
    const double quadrature =
        curvature_energy_by_quadrature(SplineFunction<double>(kv, beta));
    worst = std::max(worst, std::abs(algebraic - quadrature) /
                                std::max(quadrature, kTiny));
  }
  CheckResult res;
  res.name = "penalty_quadrature_equivalence";
  res.observed = worst;
  res.threshold = 1e-10;
  res.passed = worst <= res.threshold;
  res.detail = "worst relative gap between ||L beta||^2 and quadrature of "
               "|s''|^2 over " + std::to_string(count) + " coefficient draws";
  return res;
}

CheckResult check_weighted_pinv_limit() {
  const LimitProblem prob = limit_problem();
  const MatrixXd target = weighted_pinv(prob.design, prob.weights.dense(),
                                        prob.penalty_l);
  const double scale = frob(target);
  double last = 0.0;
  bool decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const HatMatrix<double> h =
        hat_matrix(prob.design, prob.weights, prob.penalty_l, lambda);
    last = frob(h.H - target) / scale;
    if (!(last < prev)) decreasing = false;
    prev = last;
  }
  CheckResult res;
  res.name = "weighted_pinv_limit";
  res.observed = last;
  res.threshold = 1e-3;
  res.passed = decreasing && last <= res.threshold;
  res.detail = decreasing
                   ? "relative gap ||H(1e-8) - B+_ML|| / ||B+_ML||, "
                     "decreasing over the lambda ladder"
                   : "gap sequence failed to decrease over the lambda ladder";
  return res;
}

CheckResult check_lambda_inf_limit() {
  const LimitProblem prob = limit_problem();
  const MatrixXd target = lambda_inf_limit(prob.design, prob.weights.dense(),
                                           prob.penalty_l);
  const double scale = 1.0 + frob(target);
  double last = 0.0;
  bool decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {1e2, 1e4, 1e6, 1e8}) {
    const HatMatrix<double> h =
        hat_matrix(prob.design, prob.weights, prob.penalty_l, lambda);
    last = frob(h.H - target) / scale;
    if (!(last < prev)) decreasing = false;
    prev = last;
  }
  CheckResult res;
  res.name = "lambda_inf_limit";
  res.observed = last;
  res.threshold = 1e-4;
  res.passed = decreasing && last <= res.threshold;
  res.detail = decreasing
                   ? "gap ||H(1e8) - C_MBL|| / (1 + ||C_MBL||), decreasing "
                     "over the lambda ladder"
                   : "gap sequence failed to decrease over the lambda ladder";
  return res;
}

CheckResult check_natural_spline_boundary(std::uint64_t seed) {
  const KnotVector<double> kv = make_uniform_knots(0.0, 1.0, 4);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (double lambda : {0.1, 1.0, 10.0}) {
    for (int t = 0; t < 20; ++t) {
      VectorXd y(kv.num_interior() + 2);
      for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = gauss(rng);
      const auto [d2a, d2b] = natural_spline_check(kv, y, lambda);
      const double scale = y.cwiseAbs().maxCoeff();
      worst = std::max({worst, std::abs(d2a) / scale, std::abs(d2b) / scale});
    }
  }
  CheckResult res;
  res.name = "natural_spline_boundary";
  res.observed = worst;
  res.threshold = 1e-7;
  res.passed = worst <= res.threshold;
  res.detail = "worst |s''(endpoint)| / max|y| over 20 draws x 3 lambdas";
  return res;
}

CheckResult check_tikhonov_identity(std::uint64_t seed) {
  const KnotVector<double> kv = make_uniform_knots(0.0, 1.0, 4);
  const Dataset<double> data = Dataset<double>::uniform(0.0, 1.0, 10);
  const MatrixXd b = design_matrix(kv, data.xs);
  const int d = static_cast<int>(b.cols());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lam_dist(0.05, 5.0);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const double lambda = lam_dist(rng);
    const HatMatrix<double> h =
        hat_matrix(b, WeightMatrix<double>::identity(b.rows()),
                   MatrixXd::Identity(d, d), lambda);
    const MatrixXd direct =
        (b.transpose() * b + lambda * MatrixXd::Identity(d, d))
            .ldlt()
            .solve(b.transpose());
    worst = std::max(worst, frob(h.H - direct) / frob(direct));
  }
  CheckResult res;
  res.name = "tikhonov_identity";
  res.observed = worst;
  res.threshold = 1e-10;
  res.passed = worst <= res.threshold;
  res.detail = "H(lambda, I, I) against the ridge formula";
  return res;
}

std::vector<CheckResult> run_oracle_battery(std::uint64_t seed) {
  const KnotVector<double> kv = make_uniform_knots(0.0, 1.0, 4);
  const PenaltyOperator<double> pen = penalty_operator(kv);
  std::vector<CheckResult> out;
  out.push_back(check_penrose_conditions(seed));
  out.push_back(check_penalty_quadrature(kv, pen.L, seed + 1));
  out.push_back(check_weighted_pinv_limit());
  out.push_back(check_lambda_inf_limit());
  out.push_back(check_natural_spline_boundary(seed + 2));
  out.push_back(check_tikhonov_identity(seed + 3));
  return out;
}

}  // namespace splinenoise
