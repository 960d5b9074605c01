#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "splinenoise/bspline.hpp"
#include "splinenoise/estimator.hpp"
#include "splinenoise/types.hpp"

namespace splinenoise {

enum class WeightMode { kIdentity, kOracle };

std::string to_string(WeightMode mode);
WeightMode weight_mode_from_string(const std::string& name);

/// Gaussian noise with one dominant component: e_I ~ N(0,1) and
/// e_i ~ N(0, sigma^2) for i != I, independently. strong_index is 1-based.
struct NoiseModel {
  int n = 0;
  int strong_index = 1;
  double sigma = 0.0;

  void validate() const;
};

/// The true signal is the j-th element of the cubic basis (-3 <= j <= K),
/// i.e. the coefficient vector is the unit vector delta_j.
struct SignalSpec {
  int j = 0;

  VectorXd coefficients(int num_interior) const;
};

/// Result of locating the dominant residual entry. index is 1-based; sign
/// is +1 or -1; zero_sign_flag marks the exact-zero case where +1 was
/// reported by convention.
struct DetectionOutcome {
  int index = 0;
  int sign = 0;
  bool zero_sign_flag = false;
};

struct ExperimentConfig {
  int K = 4;
  int j = 3;
  int strong_index = 1;  // 1-based position of the strong noise
  int n = 10;
  double a = 0.0;
  double b = 1.0;
  std::vector<double> lambda_grid;
  std::vector<double> sigma_grid;
  int trials = 100;
  std::uint64_t seed = 0;
  WeightMode weight_mode = WeightMode::kOracle;

  void validate() const;
};

/// One reproducible Gaussian substream per (seed, sigma_index, trial_index).
/// The engine is mt19937_64 seeded through splitmix64 mixing; normal
/// deviates come from the Box-Muller transform on 53-bit uniforms, so the
/// stream depends only on the three integers above.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t sigma_index,
              std::uint64_t trial_index);

  double next_normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Draws one noise realization from the model.
VectorXd sample_noise(const NoiseModel& model, NoiseStream& stream);

/// Weight matrix for the fit: identity, or the oracle choice C^{-1/2}
/// (1 at the strong position, 1/sigma elsewhere).
WeightMatrix<double> weight_matrix(const NoiseModel& model, WeightMode mode);

/// Position and sign of the dominant residual entry. Ties break to the
/// lowest index; an exact zero at the detected position reports sign +1
/// with the flag set.
DetectionOutcome detect(const VectorXd& residual);

/// Fits y = B delta_j + e at every lambda in the grid and detects on each
/// residual. Estimator errors propagate to the caller.
std::vector<DetectionOutcome> run_trial(const ExperimentConfig& config,
                                        const MatrixXd& design,
                                        const PenaltyOperator<double>& penalty,
                                        double sigma, const VectorXd& e);

/// One estimated probability curve, tagged with what it measures and which
/// axis it varies over.
struct ProbabilityCurve {
  enum class Kind { p1, p2, p3, p4 };
  enum class Axis { lambda, sigma };

  Kind kind;
  Axis axis;
  // Grid value of the frozen axis (sigma for lambda-curves, lambda for
  // sigma-curves); unused for p3/p4 which have no frozen axis.
  double fixed_value = 0.0;
  int fixed_index = -1;
  std::vector<std::pair<double, double>> points;
  ExperimentConfig config;
};

std::string to_string(ProbabilityCurve::Kind kind);

/// Monte Carlo estimates over the full (sigma, lambda) grid.
/// p1/p2 are indexed (sigma_index, lambda_index); p3/p4 by sigma_index.
struct MonteCarloResult {
  ExperimentConfig config;
  MatrixXd p1;
  MatrixXd p2;
  VectorXd p3;
  VectorXd p4;
  std::vector<long> failed_trials_per_sigma;

  long total_failed_trials() const;

  ProbabilityCurve lambda_curve(ProbabilityCurve::Kind kind,
                                int sigma_index) const;
  ProbabilityCurve sigma_curve(ProbabilityCurve::Kind kind,
                               int lambda_index) const;
  ProbabilityCurve path_curve(ProbabilityCurve::Kind kind) const;
};

/// Runs the full experiment. Trials are independent with per-(sigma,trial)
/// substreams and preallocated aggregation slots, so the result is
/// identical for any thread count. Throws ExcessiveTrialFailuresError when
/// more than 1% of all trials fail.
MonteCarloResult monte_carlo(const ExperimentConfig& config, int threads = 1);

}  // namespace splinenoise
