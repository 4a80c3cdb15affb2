#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nport/ssv.hpp"
#include "nport/stability.hpp"
#include "nport/touchstone.hpp"
#include "nport/types.hpp"

namespace {

using nport::ComplexMatrix;
using json = nlohmann::ordered_json;

constexpr int kExitStable = 0;
constexpr int kExitUnstable = 1;
constexpr int kExitIndeterminate = 2;
constexpr int kExitUsage = 3;

int ports_from_extension(const std::string& path) {
  static const std::regex re(R"(\.s(\d+)p$)", std::regex::icase);
  std::smatch m;
  if (std::regex_search(path, m, re)) return std::stoi(m[1]);
  return 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nport::InputError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nport::ScatteringData load_touchstone(const std::string& path) {
  std::vector<std::string> warnings;
  auto data = nport::parse_touchstone(read_file(path),
                                      ports_from_extension(path), &warnings);
  for (const auto& w : warnings) {
    std::cerr << "warning: " << path << ": " << w << "\n";
  }
  return data;
}

// JSON array-of-arrays; entries are bare reals or [re, im] pairs.
ComplexMatrix parse_inline_matrix(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw nport::InputError(std::string("bad inline matrix: ") + e.what());
  }
  if (!j.is_array() || j.empty()) {
    throw nport::InputError("inline matrix must be a non-empty array of rows");
  }
  const size_t rows = j.size();
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw nport::InputError("inline matrix rows must be arrays");
  ComplexMatrix m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw nport::InputError("inline matrix rows must have equal length");
    }
    for (size_t c = 0; c < cols; ++c) {
      const auto& e = j[r][c];
      if (e.is_number()) {
        m(r, c) = nport::Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() &&
                 e[1].is_number()) {
        m(r, c) = nport::Complex(e[0].get<double>(), e[1].get<double>());
      } else {
        throw nport::InputError(
            "inline matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

struct OutputSettings {
  std::string format = "json";
  std::string output_path;
  bool intrinsic_asserted = false;
};

int exit_code_for(const nport::StabilityVerdict& v) {
  switch (v.kind) {
    case nport::StabilityVerdict::Kind::UnconditionallyStable:
      return kExitStable;
    case nport::StabilityVerdict::Kind::PotentiallyUnstable:
      return kExitUnstable;
    case nport::StabilityVerdict::Kind::Indeterminate:
      return kExitIndeterminate;
  }
  return kExitIndeterminate;
}

void emit(const nport::SweepReport& report, const nport::SsvOptions& o,
          const OutputSettings& out) {
  std::ostringstream body;
  if (out.format == "csv") {
    body << "x,mu_lower,mu_upper\n";
    char buf[128];
    for (const auto& p : report.points) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.parameter,
                    p.bounds.lower, p.bounds.upper);
      body << buf;
    }
  } else {
    json doc;
    doc["verdict"] = nport::to_string(report.verdict.kind);
    if (report.transition) {
      doc["transition"] = *report.transition;
    } else {
      doc["transition"] = nullptr;
    }
    json pts = json::array();
    for (const auto& p : report.points) {
      pts.push_back({{"x", p.parameter},
                     {"mu_lower", p.bounds.lower},
                     {"mu_upper", p.bounds.upper}});
    }
    doc["points"] = std::move(pts);
    doc["options"] = {{"gamma", o.gamma},
                      {"restarts", o.restarts},
                      {"seed", o.seed},
                      {"max_iterations", o.max_iterations},
                      {"convergence_tol", o.convergence_tol}};
    doc["intrinsic_stability_asserted"] = out.intrinsic_asserted;
    doc["elapsed_seconds"] = report.elapsed_seconds;  // emitted last
    body << doc.dump(2) << "\n";
  }

  if (out.output_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream f(out.output_path, std::ios::binary);
    if (!f) throw nport::InputError("cannot write file: " + out.output_path);
    f << body.str();
  }
}

void warn_proviso(const OutputSettings& out) {
  if (!out.intrinsic_asserted) {
    std::cerr << "warning: verdict assumes the device is intrinsically stable "
                 "with nominal loads (Rollett proviso); pass "
                 "--assume-internally-stable to assert it\n";
  }
}

bool parse_range(const std::string& text, double& a, double& b) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return false;
  try {
    size_t p1 = 0, p2 = 0;
    const std::string lo = text.substr(0, colon);
    const std::string hi = text.substr(colon + 1);
    a = std::stod(lo, &p1);
    b = std::stod(hi, &p2);
    return p1 == lo.size() && p2 == hi.size();
  } catch (const std::exception&) {
    return false;
  }
}

nport::SweepReport single_matrix_report(const ComplexMatrix& m,
                                        const nport::UncertaintyStructure& s,
                                        const nport::SsvOptions& o,
                                        double margin_tol) {
  const auto t0 = std::chrono::steady_clock::now();
  nport::SweepPoint pt;
  pt.parameter = 0.0;
  pt.bounds = nport::mu_bounds(m, s, o);
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;

  nport::SweepReport r;
  r.points = {pt};
  switch (nport::classify_point(pt.bounds, o.gamma, margin_tol)) {
    case nport::PointClass::Stable:
      r.verdict.kind = nport::StabilityVerdict::Kind::UnconditionallyStable;
      break;
    case nport::PointClass::Unstable:
      r.verdict.kind = nport::StabilityVerdict::Kind::PotentiallyUnstable;
      r.verdict.worst_parameter = 0.0;
      r.verdict.worst_lower = pt.bounds.lower;
      break;
    case nport::PointClass::Straddling:
      r.verdict.kind = nport::StabilityVerdict::Kind::Indeterminate;
      r.verdict.gap_parameters = {0.0};
      break;
  }
  r.elapsed_seconds = dt.count();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unconditional stability analysis of n-port networks via "
               "structured-singular-value bounds"};
  app.require_subcommand(1);

  nport::SsvOptions ssv_opts;
  OutputSettings out;
  int threads = 0;
  constexpr double kMarginTol = 1e-6;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--gamma", ssv_opts.gamma, "Admissible |Delta| bound")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", ssv_opts.seed, "Lower-bound restart seed");
    cmd->add_option("--restarts", ssv_opts.restarts,
                    "Lower-bound random restarts")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--format", out.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--output", out.output_path, "Write report to a file");
    cmd->add_flag("--assume-internally-stable", out.intrinsic_asserted,
                  "Assert the Rollett proviso (intrinsic stability)");
    cmd->add_option("--threads", threads, "Sweep threads (0 = auto)");
  };

  // analyze
  std::string analyze_input;
  std::string analyze_range;
  auto* analyze = app.add_subcommand(
      "analyze", "Frequency sweep of a Touchstone file");
  analyze->add_option("input", analyze_input, "Touchstone .sNp file")
      ->required();
  analyze->add_option("--range", analyze_range,
                      "Restrict to frequencies A:B (Hz)");
  add_common(analyze);

  // sweep-scale
  std::string sweep_input;
  std::string sweep_matrix;
  std::string sweep_entry = "1,1";
  std::string sweep_range = "0:3";
  int sweep_points = 1000;
  auto* sweep = app.add_subcommand(
      "sweep-scale", "Sweep a scaling coefficient on one S-matrix entry");
  sweep->add_option("input", sweep_input,
                    "Touchstone file (first frequency point is used)");
  sweep->add_option("--matrix", sweep_matrix, "Inline matrix (JSON)");
  sweep->add_option("--entry", sweep_entry, "Entry R,C to scale (1-based)");
  sweep->add_option("--range", sweep_range, "Coefficient range A:B");
  sweep->add_option("--points", sweep_points, "Grid points")
      ->check(CLI::Range(2, 100000000));
  add_common(sweep);

  // mu
  std::string mu_matrix;
  std::string mu_structure = "diag";
  auto* mu = app.add_subcommand("mu", "Mu bounds of one inline matrix");
  mu->add_option("--matrix", mu_matrix, "Inline matrix (JSON)")->required();
  mu->add_option("--structure", mu_structure, "Uncertainty structure")
      ->check(CLI::IsMember({"diag", "full"}));
  add_common(mu);

  // convert
  std::string conv_in, conv_out, conv_to = "ri", conv_unit;
  auto* convert =
      app.add_subcommand("convert", "Rewrite a Touchstone file");
  convert->add_option("input", conv_in, "Input .sNp file")->required();
  convert->add_option("output", conv_out, "Output path")->required();
  convert->add_option("--to", conv_to, "Output data format")
      ->check(CLI::IsMember({"ri", "ma", "db"}));
  convert->add_option("--unit", conv_unit, "Output frequency unit")
      ->check(CLI::IsMember({"hz", "khz", "mhz", "ghz"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*analyze) {
      auto data = load_touchstone(analyze_input);
      if (!analyze_range.empty()) {
        double lo = 0.0, hi = 0.0;
        if (!parse_range(analyze_range, lo, hi)) {
          throw nport::InputError("bad --range, expected A:B");
        }
        std::erase_if(data.points, [&](const auto& p) {
          return p.frequency_hz < lo || p.frequency_hz > hi;
        });
        if (data.points.empty()) {
          throw nport::InputError("--range excludes every frequency point");
        }
      }
      const auto report =
          nport::analyze_frequency_sweep(data, ssv_opts, kMarginTol, threads);
      warn_proviso(out);
      emit(report, ssv_opts, out);
      return exit_code_for(report.verdict);
    }

    if (*sweep) {
      ComplexMatrix m;
      if (!sweep_matrix.empty()) {
        m = parse_inline_matrix(sweep_matrix);
      } else if (!sweep_input.empty()) {
        const auto data = load_touchstone(sweep_input);
        m = data.points.front().s;
      } else {
        throw nport::InputError("sweep-scale needs an input file or --matrix");
      }
      double r = 0, c = 0;
      {
        const auto comma = sweep_entry.find(',');
        if (comma == std::string::npos ||
            !parse_range(sweep_entry.substr(0, comma) + ":" +
                             sweep_entry.substr(comma + 1),
                         r, c)) {
          throw nport::InputError("bad --entry, expected R,C");
        }
      }
      double c_from = 0, c_to = 0;
      if (!parse_range(sweep_range, c_from, c_to)) {
        throw nport::InputError("bad --range, expected A:B");
      }
      const auto report = nport::scale_entry_sweep(
          m, static_cast<int>(r) - 1, static_cast<int>(c) - 1, c_from, c_to,
          sweep_points, ssv_opts, kMarginTol, threads);
      warn_proviso(out);
      emit(report, ssv_opts, out);
      return exit_code_for(report.verdict);
    }

    if (*mu) {
      const ComplexMatrix m = parse_inline_matrix(mu_matrix);
      const int n = static_cast<int>(m.rows());
      const auto structure = mu_structure == "full"
                                 ? nport::UncertaintyStructure::full(n)
                                 : nport::UncertaintyStructure::diagonal(n);
      const auto report =
          single_matrix_report(m, structure, ssv_opts, kMarginTol);
      emit(report, ssv_opts, out);
      return exit_code_for(report.verdict);
    }

    if (*convert) {
      const auto data = load_touchstone(conv_in);
      nport::TouchstoneOptions topts;
      topts.reference_impedance = data.reference_impedance;
      topts.data_format = conv_to == "ma"   ? nport::DataFormat::MA
                          : conv_to == "db" ? nport::DataFormat::DB
                                            : nport::DataFormat::RI;
      if (!conv_unit.empty()) {
        topts.frequency_unit = conv_unit == "hz"    ? nport::FrequencyUnit::Hz
                               : conv_unit == "khz" ? nport::FrequencyUnit::kHz
                               : conv_unit == "mhz" ? nport::FrequencyUnit::MHz
                                                    : nport::FrequencyUnit::GHz;
      }
      std::ofstream f(conv_out, std::ios::binary);
      if (!f) throw nport::InputError("cannot write file: " + conv_out);
      f << nport::write_touchstone(data, topts);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
