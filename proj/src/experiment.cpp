#include "splinenoise/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>

#include "splinenoise/errors.hpp"

namespace splinenoise {

std::string to_string(WeightMode mode) {
  return mode == WeightMode::kIdentity ? "identity" : "oracle";
}

WeightMode weight_mode_from_string(const std::string& name) {
  if (name == "identity") return WeightMode::kIdentity;
  if (name == "oracle") return WeightMode::kOracle;
  throw std::invalid_argument("weight_mode must be 'identity' or 'oracle'");
}

void NoiseModel::validate() const {
  if (n < 1) throw std::invalid_argument("NoiseModel: n must be positive");
  if (strong_index < 1 || strong_index > n) {
    throw std::invalid_argument("NoiseModel: strong index must be in 1..n");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("NoiseModel: sigma must be >= 0 and finite");
  }
}

VectorXd SignalSpec::coefficients(int num_interior) const {
  if (j < -kIndexOffset || j > num_interior) {
    throw std::invalid_argument("SignalSpec: index must be in -3..K");
  }
  VectorXd delta = VectorXd::Zero(num_interior + kCubicOrder);
  delta(j + kIndexOffset) = 1.0;
  return delta;
}

void ExperimentConfig::validate() const {
  if (K < 1) throw std::invalid_argument("config: K must be >= 1");
  if (j < -kIndexOffset || j > K) {
    throw std::invalid_argument("config: j must be in -3..K");
  }
  if (n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (strong_index < 1 || strong_index > n) {
    throw std::invalid_argument("config: I must be in 1..n");
  }
  if (!(a < b)) throw std::invalid_argument("config: requires a < b");
  if (lambda_grid.empty()) {
    throw std::invalid_argument("config: lambda grid must be non-empty");
  }
  if (sigma_grid.empty()) {
    throw std::invalid_argument("config: sigma grid must be non-empty");
  }
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    if (!(lambda_grid[k] > 0.0) || !std::isfinite(lambda_grid[k])) {
      throw std::invalid_argument("config: lambda values must be positive");
    }
    if (k > 0 && !(lambda_grid[k - 1] < lambda_grid[k])) {
      throw std::invalid_argument("config: lambda grid must be increasing");
    }
  }
  for (std::size_t k = 0; k < sigma_grid.size(); ++k) {
    if (!(sigma_grid[k] >= 0.0) || !std::isfinite(sigma_grid[k])) {
      throw std::invalid_argument("config: sigma values must be >= 0");
    }
    if (k > 0 && !(sigma_grid[k - 1] < sigma_grid[k])) {
      throw std::invalid_argument("config: sigma grid must be increasing");
    }
  }
  if (weight_mode == WeightMode::kOracle &&
      !(sigma_grid.front() > 0.0)) {
    throw std::invalid_argument(
        "config: oracle weights require every sigma to be positive");
  }
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t sigma_index,
                             std::uint64_t trial_index) {
  std::uint64_t s = splitmix64(seed ^ (0x9E3779B97F4A7C15ull * (sigma_index + 1)));
  return splitmix64(s ^ (0xD1B54A32D192ED03ull * (trial_index + 1)));
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t sigma_index,
                         std::uint64_t trial_index)
    : engine_(substream_seed(seed, sigma_index, trial_index)) {}

double NoiseStream::next_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // 53-bit uniforms; u1 in (0, 1] keeps the logarithm finite.
  const double u1 =
      static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

VectorXd sample_noise(const NoiseModel& model, NoiseStream& stream) {
  model.validate();
  VectorXd e(model.n);
  for (int i = 0; i < model.n; ++i) {
    const double sd = (i + 1 == model.strong_index) ? 1.0 : model.sigma;
    e(i) = sd * stream.next_normal();
  }
  return e;
}

WeightMatrix<double> weight_matrix(const NoiseModel& model, WeightMode mode) {
  model.validate();
  if (mode == WeightMode::kIdentity) {
    return WeightMatrix<double>::identity(model.n);
  }
  if (!(model.sigma > 0.0)) {
    throw DegenerateWeightError(
        "oracle weights undefined for sigma = 0 (singular covariance)");
  }
  VectorXd diag = VectorXd::Constant(model.n, 1.0 / model.sigma);
  diag(model.strong_index - 1) = 1.0;
  return WeightMatrix<double>(std::move(diag));
}

DetectionOutcome detect(const VectorXd& residual) {
  if (residual.size() == 0 || !residual.allFinite()) {
    throw std::invalid_argument("detect: residual must be finite, non-empty");
  }
  if ((residual.array() == 0.0).all()) {
    throw AllZeroResidualError("detect: all-zero residual, detection undefined");
  }
  Eigen::Index best = 0;
  double best_abs = std::abs(residual(0));
  for (Eigen::Index i = 1; i < residual.size(); ++i) {
    const double v = std::abs(residual(i));
    if (v > best_abs) {  // strict: ties break to the lowest index
      best_abs = v;
      best = i;
    }
  }
  DetectionOutcome out;
  out.index = static_cast<int>(best) + 1;
  const double r = residual(best);
  if (r > 0.0) {
    out.sign = 1;
  } else if (r < 0.0) {
    out.sign = -1;
  } else {
    out.sign = 1;
    out.zero_sign_flag = true;
  }
  return out;
}

std::vector<DetectionOutcome> run_trial(const ExperimentConfig& config,
                                        const MatrixXd& design,
                                        const PenaltyOperator<double>& penalty,
                                        double sigma, const VectorXd& e) {
  config.validate();
  if (design.rows() != config.n || e.size() != config.n) {
    throw std::invalid_argument("run_trial: dimension mismatch");
  }
  const NoiseModel model{config.n, config.strong_index, sigma};
  const WeightMatrix<double> m = weight_matrix(model, config.weight_mode);
  const VectorXd y =
      design * SignalSpec{config.j}.coefficients(config.K) + e;
  std::vector<DetectionOutcome> out;
  out.reserve(config.lambda_grid.size());
  for (double lambda : config.lambda_grid) {
    const FitResult<double> f = fit(y, design, m, penalty.L, lambda);
    out.push_back(detect(f.residual));
  }
  return out;
}

namespace {

int sign_of(double x) { return x < 0.0 ? -1 : 1; }

// Per-sigma slice of the Monte Carlo accumulation. Everything here is
// deterministic given (config, sigma_index), independent of scheduling.
struct SigmaSlice {
  VectorXd p1;
  VectorXd p2;
  double p3 = 0.0;
  double p4 = 0.0;
  long failed_trials = 0;
};

SigmaSlice run_sigma(const ExperimentConfig& config, const MatrixXd& design,
                     const MatrixXd& penalty_l, int sigma_index) {
  const int num_lambda = static_cast<int>(config.lambda_grid.size());
  const double sigma = config.sigma_grid[sigma_index];
  const NoiseModel model{config.n, config.strong_index, sigma};
  const WeightMatrix<double> m = weight_matrix(model, config.weight_mode);

  // Residual-maker matrices I - B H(lambda), one per lambda, shared by all
  // trials at this sigma. A lambda whose system cannot be factored makes
  // every trial at this sigma fail.
  std::vector<MatrixXd> residual_makers;
  residual_makers.reserve(num_lambda);
  const MatrixXd eye = MatrixXd::Identity(config.n, config.n);
  try {
    for (double lambda : config.lambda_grid) {
      const HatMatrix<double> h = hat_matrix(design, m, penalty_l, lambda);
      residual_makers.push_back(eye - design * h.H);
    }
  } catch (const std::exception&) {
    SigmaSlice failed;
    failed.p1 = VectorXd::Zero(num_lambda);
    failed.p2 = VectorXd::Zero(num_lambda);
    failed.failed_trials = config.trials;
    return failed;
  }

  const VectorXd signal =
      design * SignalSpec{config.j}.coefficients(config.K);
  const int strong = config.strong_index - 1;

  SigmaSlice slice;
  slice.p1 = VectorXd::Zero(num_lambda);
  slice.p2 = VectorXd::Zero(num_lambda);
  long valid_trials = 0;
  long path_pos_failures = 0;
  long path_sign_failures = 0;

  VectorXd pos_fail = VectorXd::Zero(num_lambda);
  VectorXd sign_fail = VectorXd::Zero(num_lambda);

  for (int trial = 0; trial < config.trials; ++trial) {
    NoiseStream stream(config.seed, static_cast<std::uint64_t>(sigma_index),
                       static_cast<std::uint64_t>(trial));
    const VectorXd e = sample_noise(model, stream);
    const VectorXd y = signal + e;
    const int true_sign = sign_of(e(strong));
    bool any_pos_fail = false;
    bool any_sign_fail = false;
    std::vector<std::pair<bool, bool>> per_lambda(num_lambda);
    bool trial_ok = true;
    try {
      for (int k = 0; k < num_lambda; ++k) {
        const VectorXd r = residual_makers[k] * y;
        const DetectionOutcome d = detect(r);
        const bool pos = d.index != config.strong_index;
        const bool sgn = d.sign != true_sign;
        per_lambda[k] = {pos, sgn};
        any_pos_fail = any_pos_fail || pos;
        any_sign_fail = any_sign_fail || sgn;
      }
    } catch (const std::exception&) {
      trial_ok = false;  // a failed lambda point invalidates the trial
    }
    if (!trial_ok) {
      ++slice.failed_trials;
      continue;
    }
    ++valid_trials;
    for (int k = 0; k < num_lambda; ++k) {
      if (per_lambda[k].first) pos_fail(k) += 1.0;
      if (per_lambda[k].second) sign_fail(k) += 1.0;
    }
    if (any_pos_fail) ++path_pos_failures;
    if (any_sign_fail) ++path_sign_failures;
  }

  const double denom = valid_trials > 0 ? static_cast<double>(valid_trials)
                                        : 1.0;
  slice.p1 = pos_fail / denom;
  slice.p2 = sign_fail / denom;
  slice.p3 = static_cast<double>(path_pos_failures) / denom;
  slice.p4 = static_cast<double>(path_sign_failures) / denom;
  return slice;
}

}  // namespace

long MonteCarloResult::total_failed_trials() const {
  long total = 0;
  for (long f : failed_trials_per_sigma) total += f;
  return total;
}

ProbabilityCurve MonteCarloResult::lambda_curve(ProbabilityCurve::Kind kind,
                                                int sigma_index) const {
  if (kind != ProbabilityCurve::Kind::p1 &&
      kind != ProbabilityCurve::Kind::p2) {
    throw std::invalid_argument("lambda_curve: only p1/p2 vary over lambda");
  }
  const MatrixXd& src = kind == ProbabilityCurve::Kind::p1 ? p1 : p2;
  ProbabilityCurve c;
  c.kind = kind;
  c.axis = ProbabilityCurve::Axis::lambda;
  c.fixed_value = config.sigma_grid[sigma_index];
  c.fixed_index = sigma_index;
  c.config = config;
  for (std::size_t k = 0; k < config.lambda_grid.size(); ++k) {
    c.points.emplace_back(config.lambda_grid[k],
                          src(sigma_index, static_cast<Eigen::Index>(k)));
  }
  return c;
}

ProbabilityCurve MonteCarloResult::sigma_curve(ProbabilityCurve::Kind kind,
                                               int lambda_index) const {
  if (kind != ProbabilityCurve::Kind::p1 &&
      kind != ProbabilityCurve::Kind::p2) {
    throw std::invalid_argument("sigma_curve: only p1/p2 have a lambda axis");
  }
  const MatrixXd& src = kind == ProbabilityCurve::Kind::p1 ? p1 : p2;
  ProbabilityCurve c;
  c.kind = kind;
  c.axis = ProbabilityCurve::Axis::sigma;
  c.fixed_value = config.lambda_grid[lambda_index];
  c.fixed_index = lambda_index;
  c.config = config;
  for (std::size_t s = 0; s < config.sigma_grid.size(); ++s) {
    c.points.emplace_back(config.sigma_grid[s],
                          src(static_cast<Eigen::Index>(s), lambda_index));
  }
  return c;
}

ProbabilityCurve MonteCarloResult::path_curve(
    ProbabilityCurve::Kind kind) const {
  if (kind != ProbabilityCurve::Kind::p3 &&
      kind != ProbabilityCurve::Kind::p4) {
    throw std::invalid_argument("path_curve: only p3/p4 are path statistics");
  }
  const VectorXd& src = kind == ProbabilityCurve::Kind::p3 ? p3 : p4;
  ProbabilityCurve c;
  c.kind = kind;
  c.axis = ProbabilityCurve::Axis::sigma;
  c.config = config;
  for (std::size_t s = 0; s < config.sigma_grid.size(); ++s) {
    c.points.emplace_back(config.sigma_grid[s],
                          src(static_cast<Eigen::Index>(s)));
  }
  return c;
}

std::string to_string(ProbabilityCurve::Kind kind) {
  switch (kind) {
    case ProbabilityCurve::Kind::p1: return "p1";
    case ProbabilityCurve::Kind::p2: return "p2";
    case ProbabilityCurve::Kind::p3: return "p3";
    case ProbabilityCurve::Kind::p4: return "p4";
  }
  return "?";
}

MonteCarloResult monte_carlo(const ExperimentConfig& config, int threads) {
  config.validate();
  const int num_sigma = static_cast<int>(config.sigma_grid.size());
  const int num_lambda = static_cast<int>(config.lambda_grid.size());

  const KnotVector<double> kv =
      make_uniform_knots(config.a, config.b, config.K);
  const Dataset<double> data = Dataset<double>::uniform(config.a, config.b,
                                                        config.n);
  const MatrixXd design = design_matrix(kv, data.xs);
  const PenaltyOperator<double> penalty = penalty_operator(kv);

  std::vector<SigmaSlice> slices(num_sigma);
  const int workers =
      std::max(1, std::min(threads, num_sigma));
  if (workers == 1) {
    for (int s = 0; s < num_sigma; ++s) {
      slices[s] = run_sigma(config, design, penalty.L, s);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int s = next.fetch_add(1); s < num_sigma;
             s = next.fetch_add(1)) {
          slices[s] = run_sigma(config, design, penalty.L, s);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  MonteCarloResult result;
  result.config = config;
  result.p1.resize(num_sigma, num_lambda);
  result.p2.resize(num_sigma, num_lambda);
  result.p3.resize(num_sigma);
  result.p4.resize(num_sigma);
  result.failed_trials_per_sigma.resize(num_sigma);
  for (int s = 0; s < num_sigma; ++s) {
    result.p1.row(s) = slices[s].p1.transpose();
    result.p2.row(s) = slices[s].p2.transpose();
    result.p3(s) = slices[s].p3;
    result.p4(s) = slices[s].p4;
    result.failed_trials_per_sigma[s] = slices[s].failed_trials;
  }

  const long total = static_cast<long>(config.trials) * num_sigma;
  if (result.total_failed_trials() * 100 > total) {
    throw ExcessiveTrialFailuresError(
        "more than 1% of Monte Carlo trials failed (" +
        std::to_string(result.total_failed_trials()) + " of " +
        std::to_string(total) + ")");
  }
  return result;
}

}  // namespace splinenoise
