#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "splinenoise/checks.hpp"
#include "splinenoise/experiment.hpp"

namespace splinenoise {

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
  bool emit_svg = true;
};

/// Serializes one probability curve as CSV. Lambda/sigma families carry
/// the header "axis,value,p1,p2" (one row per grid point, both
/// probabilities side by side); the path family carries "sigma,p3,p4".
/// Numbers are written with 17 significant digits.
void write_curve_csv(const std::filesystem::path& path,
                     const ProbabilityCurve& first,
                     const ProbabilityCurve& second);

/// Minimal SVG line chart: axes, ticks, labeled polylines. Probabilities
/// are drawn on a fixed [0, 1] vertical scale.
void write_curve_svg(const std::filesystem::path& path,
                     const std::string& title, const std::string& x_label,
                     const ProbabilityCurve& first,
                     const ProbabilityCurve& second);

/// Runs the Monte Carlo experiment from a JSON config and writes the CSV
/// families, optional SVG charts, and a run manifest into out_dir.
/// Exit codes: 0 success, 1 configuration error, 2 excessive trial
/// failures.
int run_curves(const std::filesystem::path& config_path,
               const std::filesystem::path& out_dir,
               const RunOptions& options = {});

/// Runs the invariant battery and writes a pass/fail report into out_dir.
/// Returns 0 when every check passes, 1 otherwise.
int run_oracle_checks(const std::filesystem::path& out_dir,
                      std::uint64_t seed = 20250810);

}  // namespace splinenoise
