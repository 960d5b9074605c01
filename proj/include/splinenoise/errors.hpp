#pragma once

#include <stdexcept>

namespace splinenoise {

/// Regularized normal matrix is numerically singular (the null spaces of
/// M*B and L intersect, so the penalized fit has no unique minimizer).
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input to the symmetric square root has an eigenvalue below the
/// negative tolerance band.
struct NotPsdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix factorization received non-finite input.
struct DecompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Oracle weights requested for a degenerate noise model (sigma = 0).
struct DegenerateWeightError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Detection is undefined on an identically-zero residual.
struct AllZeroResidualError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// More than the tolerated fraction of Monte Carlo trials failed.
struct ExcessiveTrialFailuresError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace splinenoise
