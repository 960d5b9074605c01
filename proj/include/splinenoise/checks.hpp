#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splinenoise/bspline.hpp"
#include "splinenoise/types.hpp"

namespace splinenoise {

/// Outcome of one diagnostic check: the worst observed discrepancy and the
/// threshold it was held against.
struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Four Penrose conditions on a battery of random matrices (shapes up to
/// 30x30, including rank-deficient, zero and badly scaled cases).
CheckResult check_penrose_conditions(std::uint64_t seed, int count = 100);

/// ||L beta||^2 against composite 5-point Gauss quadrature of |s''|^2 on
/// each knot interval, for random coefficient vectors. The penalty
/// operator to test is passed in so a deliberately perturbed one can be
/// shown to fail.
CheckResult check_penalty_quadrature(const KnotVector<double>& kv,
                                     const MatrixXd& penalty_l,
                                     std::uint64_t seed, int count = 100);

/// Hat matrix converges to the ML-weighted pseudoinverse as lambda -> 0+
/// (decreasing gaps over a lambda ladder).
CheckResult check_weighted_pinv_limit();

/// Hat matrix converges to (M B P_L)^+ M as lambda -> infinity.
CheckResult check_lambda_inf_limit();

/// Second derivative of the smoothing fit vanishes at both endpoints when
/// the data sit at the knots.
CheckResult check_natural_spline_boundary(std::uint64_t seed);

/// H(lambda, I, I) equals the ridge formula (B^T B + lambda I)^{-1} B^T.
CheckResult check_tikhonov_identity(std::uint64_t seed);

/// The full battery, in a fixed order.
std::vector<CheckResult> run_oracle_battery(std::uint64_t seed = 20250810);

/// Composite 5-point Gauss-Legendre quadrature of |s''|^2 over [a, b],
/// one panel per knot interval. This is the independent integration route
/// used against the algebraic penalty ||L beta||^2.
double curvature_energy_by_quadrature(const SplineFunction<double>& s);

}  // namespace splinenoise
