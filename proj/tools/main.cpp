#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "splinenoise/report.hpp"
#include "splinenoise/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Penalized cubic-spline fitting and dominant-noise detection"};
  app.set_version_flag("--version", std::string(splinenoise::kToolName) + " " +
                                        std::string(splinenoise::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  bool no_svg = false;

  CLI::App* curves = app.add_subcommand(
      "run-curves", "Run the Monte Carlo sweep and write probability curves");
  curves->add_option("--config", config_path, "JSON experiment config")
      ->required();
  curves->add_option("--out", out_dir, "output directory")->required();
  curves->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_given = true; });
  curves->add_option("--threads", threads,
                     "worker threads (affects speed only, never results)");
  curves->add_flag("--no-svg", no_svg, "skip SVG chart emission");

  std::string checks_out;
  std::uint64_t checks_seed = 20250810;
  CLI::App* checks = app.add_subcommand(
      "oracle-checks", "Run the numerical invariant battery");
  checks->add_option("--out", checks_out, "output directory")->required();
  checks->add_option("--seed", checks_seed, "seed for the random batteries");

  CLI11_PARSE(app, argc, argv);

  if (curves->parsed()) {
    splinenoise::RunOptions options;
    if (seed_given) options.seed_override = seed;
    options.threads = threads;
    options.emit_svg = !no_svg;
    return splinenoise::run_curves(config_path, out_dir, options);
  }
  return splinenoise::run_oracle_checks(checks_out, checks_seed);
}
