#include "splinenoise/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "splinenoise/config.hpp"
#include "splinenoise/errors.hpp"
#include "splinenoise/version.hpp"

namespace splinenoise {

namespace {

namespace fs = std::filesystem;

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string axis_name(ProbabilityCurve::Axis axis) {
  return axis == ProbabilityCurve::Axis::lambda ? "lambda" : "sigma";
}

void require_same_grid(const ProbabilityCurve& a, const ProbabilityCurve& b) {
  if (a.axis != b.axis || a.points.size() != b.points.size()) {
    throw std::invalid_argument("curve pair must share its grid");
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

}  // namespace

void write_curve_csv(const fs::path& path, const ProbabilityCurve& first,
                     const ProbabilityCurve& second) {
  require_same_grid(first, second);
  std::ofstream out = open_out(path);
  const bool path_family = first.kind == ProbabilityCurve::Kind::p3 ||
                           first.kind == ProbabilityCurve::Kind::p4;
  if (path_family) {
    out << "sigma,p3,p4\n";
    for (std::size_t i = 0; i < first.points.size(); ++i) {
      out << num17(first.points[i].first) << ','
          << num17(first.points[i].second) << ','
          << num17(second.points[i].second) << '\n';
    }
  } else {
    out << "axis,value,p1,p2\n";
    const std::string axis = axis_name(first.axis);
    for (std::size_t i = 0; i < first.points.size(); ++i) {
      out << axis << ',' << num17(first.points[i].first) << ','
          << num17(first.points[i].second) << ','
          << num17(second.points[i].second) << '\n';
    }
  }
}

namespace {

struct ChartGeometry {
  static constexpr double width = 640;
  static constexpr double height = 420;
  static constexpr double left = 62;
  static constexpr double right = 618;
  static constexpr double top = 46;
  static constexpr double bottom = 378;

  double x_min, x_max;

  double px(double x) const {
    return left + (right - left) * (x - x_min) /
                      (x_max > x_min ? x_max - x_min : 1.0);
  }
  double py(double p) const { return bottom - (bottom - top) * p; }
};

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void svg_polyline(std::ofstream& out, const ChartGeometry& g,
                  const ProbabilityCurve& curve, const char* color) {
  out << "  <polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, p] : curve.points) {
    out << fmt_tick(g.px(x)) << ',' << fmt_tick(g.py(p)) << ' ';
  }
  out << "\"/>\n";
}

}  // namespace

void write_curve_svg(const fs::path& path, const std::string& title,
                     const std::string& x_label,
                     const ProbabilityCurve& first,
                     const ProbabilityCurve& second) {
  require_same_grid(first, second);
  ChartGeometry g{};
  g.x_min = first.points.front().first;
  g.x_max = first.points.back().first;

  std::ofstream out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.width
      << "\" height=\"" << g.height << "\" viewBox=\"0 0 " << g.width << ' '
      << g.height << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <text x=\"" << (g.width / 2)
      << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" "
         "text-anchor=\"middle\">"
      << title << "</text>\n";

  // axes
  out << "  <line x1=\"" << g.left << "\" y1=\"" << g.bottom << "\" x2=\""
      << g.right << "\" y2=\"" << g.bottom
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "  <line x1=\"" << g.left << "\" y1=\"" << g.top << "\" x2=\""
      << g.left << "\" y2=\"" << g.bottom
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  for (int k = 0; k <= 5; ++k) {
    const double frac = static_cast<double>(k) / 5.0;
    const double xv = g.x_min + frac * (g.x_max - g.x_min);
    const double px = g.px(xv);
    out << "  <line x1=\"" << px << "\" y1=\"" << g.bottom << "\" x2=\"" << px
        << "\" y2=\"" << (g.bottom + 5) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << px << "\" y=\"" << (g.bottom + 18)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">"
        << fmt_tick(xv) << "</text>\n";
    const double py = g.py(frac);
    out << "  <line x1=\"" << (g.left - 5) << "\" y1=\"" << py << "\" x2=\""
        << g.left << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << (g.left - 9) << "\" y=\"" << (py + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">"
        << fmt_tick(frac) << "</text>\n";
  }
  out << "  <text x=\"" << ((g.left + g.right) / 2) << "\" y=\""
      << (g.bottom + 36)
      << "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">"
      << x_label << "</text>\n";

  const char* color1 = "#1f77b4";
  const char* color2 = "#d62728";
  svg_polyline(out, g, first, color1);
  svg_polyline(out, g, second, color2);

  out << "  <rect x=\"" << (g.right - 110) << "\" y=\"" << (g.top + 4)
      << "\" width=\"12\" height=\"3\" fill=\"" << color1 << "\"/>\n";
  out << "  <text x=\"" << (g.right - 92) << "\" y=\"" << (g.top + 9)
      << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << to_string(first.kind) << "</text>\n";
  out << "  <rect x=\"" << (g.right - 110) << "\" y=\"" << (g.top + 20)
      << "\" width=\"12\" height=\"3\" fill=\"" << color2 << "\"/>\n";
  out << "  <text x=\"" << (g.right - 92) << "\" y=\"" << (g.top + 25)
      << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << to_string(second.kind) << "</text>\n";
  out << "</svg>\n";
}

namespace {

std::string zero_pad(int value, int width) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%0*d", width, value);
  return buf;
}

struct EmittedFiles {
  std::vector<std::string> names;

  void add(const fs::path& p) { names.push_back(p.filename().string()); }
};

void emit_all_curves(const MonteCarloResult& result, const fs::path& out_dir,
                     bool emit_svg, EmittedFiles& files) {
  using Kind = ProbabilityCurve::Kind;
  const ExperimentConfig& cfg = result.config;

  for (int s = 0; s < static_cast<int>(cfg.sigma_grid.size()); ++s) {
    const ProbabilityCurve c1 = result.lambda_curve(Kind::p1, s);
    const ProbabilityCurve c2 = result.lambda_curve(Kind::p2, s);
    const std::string stem = "p1p2_vs_lambda_sigma_" + zero_pad(s, 2);
    const fs::path csv = out_dir / (stem + ".csv");
    write_curve_csv(csv, c1, c2);
    files.add(csv);
    if (emit_svg) {
      const fs::path svg = out_dir / (stem + ".svg");
      write_curve_svg(svg, "p1, p2 vs lambda at sigma = " +
                               fmt_tick(c1.fixed_value),
                      "lambda", c1, c2);
      files.add(svg);
    }
  }
  for (int k = 0; k < static_cast<int>(cfg.lambda_grid.size()); ++k) {
    const ProbabilityCurve c1 = result.sigma_curve(Kind::p1, k);
    const ProbabilityCurve c2 = result.sigma_curve(Kind::p2, k);
    const std::string stem = "p1p2_vs_sigma_lambda_" + zero_pad(k, 3);
    const fs::path csv = out_dir / (stem + ".csv");
    write_curve_csv(csv, c1, c2);
    files.add(csv);
    if (emit_svg) {
      const fs::path svg = out_dir / (stem + ".svg");
      write_curve_svg(svg, "p1, p2 vs sigma at lambda = " +
                               fmt_tick(c1.fixed_value),
                      "sigma", c1, c2);
      files.add(svg);
    }
  }
  const ProbabilityCurve c3 = result.path_curve(Kind::p3);
  const ProbabilityCurve c4 = result.path_curve(Kind::p4);
  const fs::path csv = out_dir / "p3p4_vs_sigma.csv";
  write_curve_csv(csv, c3, c4);
  files.add(csv);
  if (emit_svg) {
    const fs::path svg = out_dir / "p3p4_vs_sigma.svg";
    write_curve_svg(svg, "p3, p4 vs sigma (any-lambda path failure)", "sigma",
                    c3, c4);
    files.add(svg);
  }
}

void write_manifest(const fs::path& path, const ExperimentConfig& config,
                    const RunOptions& options, double duration_seconds,
                    const std::vector<long>& failures,
                    const EmittedFiles& files) {
  nlohmann::ordered_json m;
  m["tool"] = {{"name", std::string(kToolName)},
               {"version", std::string(kToolVersion)}};
  m["rng_scheme"] = std::string(kRngScheme);
  m["config"] = config_to_json(config);
  m["threads"] = options.threads;
  m["svg"] = options.emit_svg;
  m["duration_seconds"] = duration_seconds;
  m["failed_trials_per_sigma"] = failures;
  m["outputs"] = files.names;
  std::ofstream out = open_out(path);
  out << m.dump(2) << '\n';
}

}  // namespace

int run_curves(const fs::path& config_path, const fs::path& out_dir,
               const RunOptions& options) {
  ExperimentConfig config;
  try {
    config = load_config(config_path);
    if (options.seed_override) config.seed = *options.seed_override;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    fs::create_directories(out_dir);
    const auto start = std::chrono::steady_clock::now();
    const MonteCarloResult result = monte_carlo(config, options.threads);
    EmittedFiles files;
    emit_all_curves(result, out_dir, options.emit_svg, files);
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    write_manifest(out_dir / "manifest.json", config, options, duration,
                   result.failed_trials_per_sigma, files);
    return 0;
  } catch (const ExcessiveTrialFailuresError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_oracle_checks(const fs::path& out_dir, std::uint64_t seed) {
  try {
    fs::create_directories(out_dir);
    const std::vector<CheckResult> results = run_oracle_battery(seed);
    std::ofstream out = open_out(out_dir / "oracle_checks.txt");
    bool all_passed = true;
    for (const CheckResult& r : results) {
      const std::string line =
          std::string(r.passed ? "PASS" : "FAIL") + "  " + r.name +
          "  observed=" + num17(r.observed) +
          "  threshold=" + num17(r.threshold) + "  (" + r.detail + ")";
      out << line << '\n';
      std::cout << line << '\n';
      all_passed = all_passed && r.passed;
    }
    return all_passed ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace splinenoise
