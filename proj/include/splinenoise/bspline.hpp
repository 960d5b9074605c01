#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "splinenoise/linalg.hpp"
#include "splinenoise/types.hpp"

namespace splinenoise {

// Basis indexing convention, used everywhere in this library:
// the cubic space over knots kappa_0 < ... < kappa_{K+1} has d = K+4 basis
// functions S_{j,4} indexed j = -3..K. An order-k function S_{j,k} is valid
// for j = 1-k..K. Index j is stored at array/column position j + 3, which
// is also its position in the clamped extended knot sequence
//   t_0 = .. = t_3 = a,  t_{4+i} = kappa_{i+1},  t_{K+4} = .. = t_{K+7} = b.
inline constexpr int kIndexOffset = 3;
inline constexpr int kCubicOrder = 4;

/// Clamped knot sequence for the cubic spline space on [a, b] with K
/// strictly increasing interior knots.
template <typename Scalar = double>
class KnotVector {
 public:
  KnotVector(Scalar a, Scalar b, std::vector<Scalar> interior)
      : a_(a), b_(b), interior_(std::move(interior)) {
    if (!(a < b)) {
      throw std::invalid_argument("KnotVector: requires a < b");
    }
    if (interior_.empty()) {
      throw std::invalid_argument("KnotVector: requires K >= 1");
    }
    Scalar prev = a_;
    for (Scalar k : interior_) {
      if (!(prev < k) || !(k < b_)) {
        throw std::invalid_argument(
            "KnotVector: interior knots must be strictly increasing inside "
            "(a, b)");
      }
      prev = k;
    }
    const int K = num_interior();
    extended_.resize(K + 8);
    for (int i = 0; i < 4; ++i) extended_[i] = a_;
    for (int i = 0; i < K; ++i) extended_[4 + i] = interior_[i];
    for (int i = 0; i < 4; ++i) extended_[K + 4 + i] = b_;
  }

  Scalar a() const { return a_; }
  Scalar b() const { return b_; }
  int num_interior() const { return static_cast<int>(interior_.size()); }

  /// Number of basis functions of the given order: K + order.
  int num_basis(int order = kCubicOrder) const {
    return num_interior() + order;
  }

  const std::vector<Scalar>& interior() const { return interior_; }
  const std::vector<Scalar>& extended() const { return extended_; }
  Scalar extended_knot(int i) const { return extended_[i]; }

  /// Full knot list kappa_0..kappa_{K+1} including the endpoints.
  std::vector<Scalar> knots_with_endpoints() const {
    std::vector<Scalar> out;
    out.reserve(num_interior() + 2);
    out.push_back(a_);
    out.insert(out.end(), interior_.begin(), interior_.end());
    out.push_back(b_);
    return out;
  }

  bool contains(Scalar x) const { return x >= a_ && x <= b_; }

 private:
  Scalar a_;
  Scalar b_;
  std::vector<Scalar> interior_;
  std::vector<Scalar> extended_;
};

/// K uniformly spaced interior knots: kappa_{i+1} - kappa_i = (b-a)/(K+1).
template <typename Scalar = double>
KnotVector<Scalar> make_uniform_knots(Scalar a, Scalar b, int num_interior) {
  if (!(a < b)) {
    throw std::invalid_argument("make_uniform_knots: requires a < b");
  }
  if (num_interior < 1) {
    throw std::invalid_argument("make_uniform_knots: requires K >= 1");
  }
  const Scalar h = (b - a) / static_cast<Scalar>(num_interior + 1);
  std::vector<Scalar> interior(num_interior);
  for (int i = 0; i < num_interior; ++i) {
    interior[i] = a + h * static_cast<Scalar>(i + 1);
  }
  return KnotVector<Scalar>(a, b, std::move(interior));
}

/// Observations (x_i, y_i) with strictly increasing abscissae in [a, b].
template <typename Scalar = double>
struct Dataset {
  VectorX<Scalar> xs;
  VectorX<Scalar> ys;

  Dataset(VectorX<Scalar> xs_in, VectorX<Scalar> ys_in)
      : xs(std::move(xs_in)), ys(std::move(ys_in)) {
    if (ys.size() != 0 && ys.size() != xs.size()) {
      throw std::invalid_argument("Dataset: xs and ys sizes differ");
    }
    for (Eigen::Index i = 1; i < xs.size(); ++i) {
      if (!(xs(i - 1) < xs(i))) {
        throw std::invalid_argument("Dataset: xs must be strictly increasing");
      }
    }
  }

  /// n abscissae with x_{i+1} - x_i = (b-a)/(n-1), ys left empty.
  static Dataset uniform(Scalar a, Scalar b, int n) {
    if (n < 2) throw std::invalid_argument("Dataset: requires n >= 2");
    VectorX<Scalar> xs(n);
    for (int i = 0; i < n; ++i) {
      xs(i) = a + (b - a) * static_cast<Scalar>(i) / static_cast<Scalar>(n - 1);
    }
    xs(n - 1) = b;
    return Dataset(std::move(xs), VectorX<Scalar>());
  }
};

namespace detail {

// Order-1 indicator on the extended sequence. Half-open [t_i, t_{i+1}),
// except at x = b where the limit from the left is used so that the basis
// still sums to one at the right endpoint.
template <typename Scalar>
bool interval_indicator(const KnotVector<Scalar>& kv, int i, Scalar x) {
  const auto& t = kv.extended();
  if (x < kv.b()) return t[i] <= x && x < t[i + 1];
  return t[i] < kv.b() && t[i + 1] >= kv.b();
}

// S_{jj,k}(x) for extended index jj via the Cox-de Boor triangle.
// Valid extended indices for order k are 4-k .. K+3; anything outside is
// a degenerate (identically zero) function.
template <typename Scalar>
Scalar basis_ext(const KnotVector<Scalar>& kv, int jj, int k, Scalar x) {
  const auto& t = kv.extended();
  const int m = static_cast<int>(t.size());
  if (jj < 0 || jj + k >= m) return Scalar(0);
  std::array<Scalar, 4> n{};
  for (int r = 0; r < k; ++r) {
    n[r] = interval_indicator(kv, jj + r, x) ? Scalar(1) : Scalar(0);
  }
  for (int ord = 2; ord <= k; ++ord) {
    for (int r = 0; r + ord <= k; ++r) {
      const int i = jj + r;
      Scalar acc = Scalar(0);
      const Scalar dl = t[i + ord - 1] - t[i];
      if (dl > Scalar(0)) acc += (x - t[i]) / dl * n[r];
      const Scalar dr = t[i + ord] - t[i + 1];
      if (dr > Scalar(0)) acc += (t[i + ord] - x) / dr * n[r + 1];
      n[r] = acc;
    }
  }
  return n[0];
}

// Derivative of a single basis function by the one-step differentiation
// formula, applied recursively. Zero-length spans contribute nothing
// (de Boor's 0/0 -> 0 convention at coincident knots).
template <typename Scalar>
Scalar basis_ext_derivative(const KnotVector<Scalar>& kv, int jj, int k,
                            Scalar x, int deriv) {
  if (deriv == 0) return basis_ext(kv, jj, k, x);
  if (k <= 1) return Scalar(0);
  const auto& t = kv.extended();
  const int m = static_cast<int>(t.size());
  if (jj < 0 || jj + k >= m) return Scalar(0);
  Scalar acc = Scalar(0);
  const Scalar dl = t[jj + k - 1] - t[jj];
  if (dl > Scalar(0)) {
    acc += basis_ext_derivative(kv, jj, k - 1, x, deriv - 1) / dl;
  }
  const Scalar dr = t[jj + k] - t[jj + 1];
  if (dr > Scalar(0)) {
    acc -= basis_ext_derivative(kv, jj + 1, k - 1, x, deriv - 1) / dr;
  }
  return static_cast<Scalar>(k - 1) * acc;
}

template <typename Scalar>
void require_in_domain(const KnotVector<Scalar>& kv, Scalar x) {
  if (!kv.contains(x)) {
    throw std::invalid_argument("evaluation point outside [a, b]");
  }
}

template <typename Scalar>
void require_valid_index(const KnotVector<Scalar>& kv, int j, int order) {
  if (order < 1 || order > kCubicOrder) {
    throw std::invalid_argument("basis order must be in 1..4");
  }
  if (j < 1 - order || j > kv.num_interior()) {
    throw std::invalid_argument("basis index out of range for this order");
  }
}

}  // namespace detail

/// Value of S_{j,order}(x) for the basis index convention above.
template <typename Scalar>
Scalar eval_basis(const KnotVector<Scalar>& kv, int j, int order, Scalar x) {
  detail::require_valid_index(kv, j, order);
  detail::require_in_domain(kv, x);
  return detail::basis_ext(kv, j + kIndexOffset, order, x);
}

/// deriv-th derivative of S_{j,order} at x (deriv in 0..2, one-sided at
/// the endpoints).
template <typename Scalar>
Scalar eval_basis_derivative(const KnotVector<Scalar>& kv, int j, int order,
                             Scalar x, int deriv) {
  detail::require_valid_index(kv, j, order);
  detail::require_in_domain(kv, x);
  if (deriv < 0 || deriv > 2) {
    throw std::invalid_argument("derivative order must be in 0..2");
  }
  return detail::basis_ext_derivative(kv, j + kIndexOffset, order, x, deriv);
}

/// n x (K+4) matrix of cubic basis values at the given abscissae; row i is
/// the vector (S_{-3,4}(x_i), ..., S_{K,4}(x_i)).
template <typename Scalar, typename Derived>
MatrixX<Scalar> design_matrix(const KnotVector<Scalar>& kv,
                              const Eigen::MatrixBase<Derived>& xs) {
  const int d = kv.num_basis();
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(xs.size(), d);
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const Scalar x = xs(i);
    detail::require_in_domain(kv, x);
    for (int jj = 0; jj < d; ++jj) {
      // local support: S_{jj,4} lives on [t_jj, t_{jj+4}]
      if (x < kv.extended_knot(jj) || x > kv.extended_knot(jj + 4)) continue;
      out(i, jj) = detail::basis_ext(kv, jj, kCubicOrder, x);
    }
  }
  return out;
}

/// Greville abscissae of the cubic basis; coefficients sampled from an
/// affine function at these sites reproduce that function exactly.
template <typename Scalar>
VectorX<Scalar> greville_abscissae(const KnotVector<Scalar>& kv) {
  const int d = kv.num_basis();
  VectorX<Scalar> g(d);
  for (int jj = 0; jj < d; ++jj) {
    g(jj) = (kv.extended_knot(jj + 1) + kv.extended_knot(jj + 2) +
             kv.extended_knot(jj + 3)) /
            Scalar(3);
  }
  return g;
}

namespace detail {

// One differentiation step for coefficient vectors: maps order-k
// coefficients (extended indices 4-k..K+3) to order-(k-1) coefficients
// (extended indices 4-(k-1)..K+3), with entries (k-1)/(t_{i+k-1} - t_i).
template <typename Scalar>
MatrixX<Scalar> coefficient_diff_step(const KnotVector<Scalar>& kv, int k) {
  const auto& t = kv.extended();
  const int K = kv.num_interior();
  const int lo_in = 4 - k;
  const int lo_out = 4 - (k - 1);
  MatrixX<Scalar> d = MatrixX<Scalar>::Zero(K + k - 1, K + k);
  for (int r = 0; r < K + k - 1; ++r) {
    const int i = lo_out + r;
    const Scalar span = t[i + k - 1] - t[i];
    if (span > Scalar(0)) {
      const Scalar w = static_cast<Scalar>(k - 1) / span;
      d(r, i - lo_in) = w;
      d(r, i - 1 - lo_in) = -w;
    }
  }
  return d;
}

}  // namespace detail

/// Weighted second-difference operator: for any coefficient vector beta,
/// the second derivative of sum_j beta_j S_{j,4} equals
/// sum_j (Delta2 beta)_j S_{j,2} on the open knot intervals.
template <typename Scalar>
MatrixX<Scalar> delta2_matrix(const KnotVector<Scalar>& kv) {
  return detail::coefficient_diff_step(kv, 3) *
         detail::coefficient_diff_step(kv, 4);
}

/// Gram matrix R_ij = int_a^b S_{j,2} S_{i,2} of the order-2 basis,
/// assembled with 2-point Gauss-Legendre quadrature per knot interval
/// (exact: the integrand is piecewise quadratic).
template <typename Scalar>
MatrixX<Scalar> gram_matrix_order2(const KnotVector<Scalar>& kv) {
  const int K = kv.num_interior();
  const int n2 = K + 2;
  MatrixX<Scalar> r = MatrixX<Scalar>::Zero(n2, n2);
  const std::vector<Scalar> knots = kv.knots_with_endpoints();
  const Scalar node = Scalar(1) / std::sqrt(Scalar(3));
  VectorX<Scalar> phi(n2);
  for (int seg = 0; seg <= K; ++seg) {
    const Scalar lo = knots[seg];
    const Scalar hi = knots[seg + 1];
    const Scalar mid = (lo + hi) / Scalar(2);
    const Scalar half = (hi - lo) / Scalar(2);
    for (int g = 0; g < 2; ++g) {
      const Scalar x = mid + (g == 0 ? -half : half) * node;
      for (int r2 = 0; r2 < n2; ++r2) {
        phi(r2) = detail::basis_ext(kv, 2 + r2, 2, x);
      }
      r.template selfadjointView<Eigen::Lower>().rankUpdate(phi, half);
    }
  }
  r = r.template selfadjointView<Eigen::Lower>();
  return r;
}

/// The triple (Delta2, R, L) with L = R^{1/2} Delta2, realizing the exact
/// curvature penalty ||L beta||^2 = int_a^b |s''(x)|^2 dx.
template <typename Scalar = double>
struct PenaltyOperator {
  MatrixX<Scalar> delta2;  // (K+2) x (K+4)
  MatrixX<Scalar> gram;    // (K+2) x (K+2)
  MatrixX<Scalar> L;       // (K+2) x (K+4)
};

template <typename Scalar>
PenaltyOperator<Scalar> penalty_operator(const KnotVector<Scalar>& kv) {
  PenaltyOperator<Scalar> p;
  p.delta2 = delta2_matrix(kv);
  p.gram = gram_matrix_order2(kv);
  p.L = sqrt_psd(p.gram) * p.delta2;
  return p;
}

/// A cubic spline given by its coefficients in the clamped basis.
template <typename Scalar = double>
struct SplineFunction {
  KnotVector<Scalar> knots;
  VectorX<Scalar> coeffs;

  SplineFunction(KnotVector<Scalar> kv, VectorX<Scalar> beta)
      : knots(std::move(kv)), coeffs(std::move(beta)) {
    if (coeffs.size() != knots.num_basis()) {
      throw std::invalid_argument(
          "SplineFunction: coefficient count must be K+4");
    }
  }

  Scalar operator()(Scalar x, int deriv = 0) const;
};

/// deriv-th derivative (0..2) of the spline at x, one-sided at endpoints.
template <typename Scalar>
Scalar eval_spline(const SplineFunction<Scalar>& f, Scalar x, int deriv = 0) {
  detail::require_in_domain(f.knots, x);
  if (deriv < 0 || deriv > 2) {
    throw std::invalid_argument("derivative order must be in 0..2");
  }
  const int d = f.knots.num_basis();
  Scalar acc = Scalar(0);
  for (int jj = 0; jj < d; ++jj) {
    if (x < f.knots.extended_knot(jj) || x > f.knots.extended_knot(jj + 4)) {
      continue;
    }
    if (f.coeffs(jj) == Scalar(0)) continue;
    acc += f.coeffs(jj) *
           detail::basis_ext_derivative(f.knots, jj, kCubicOrder, x, deriv);
  }
  return acc;
}

template <typename Scalar>
Scalar SplineFunction<Scalar>::operator()(Scalar x, int deriv) const {
  return eval_spline(*this, x, deriv);
}

}  // namespace splinenoise
