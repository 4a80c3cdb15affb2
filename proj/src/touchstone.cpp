#include "nport/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace nport {

double frequency_unit_to_hz(FrequencyUnit u) {
  switch (u) {
    case FrequencyUnit::Hz:
      return 1.0;
    case FrequencyUnit::kHz:
      return 1e3;
    case FrequencyUnit::MHz:
      return 1e6;
    case FrequencyUnit::GHz:
      return 1e9;
  }
  return 1.0;
}

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct OptionLine {
  FrequencyUnit unit = FrequencyUnit::GHz;
  DataFormat format = DataFormat::MA;
  double reference_impedance = 50.0;
};

OptionLine parse_option_line(const std::string& line) {
  OptionLine opt;
  std::istringstream in(line.substr(1));  // skip '#'
  std::string tok;
  while (in >> tok) {
    const std::string t = to_lower(tok);
    if (t == "hz") {
      opt.unit = FrequencyUnit::Hz;
    } else if (t == "khz") {
      opt.unit = FrequencyUnit::kHz;
    } else if (t == "mhz") {
      opt.unit = FrequencyUnit::MHz;
    } else if (t == "ghz") {
      opt.unit = FrequencyUnit::GHz;
    } else if (t == "s") {
      // scattering parameters, the only supported type
    } else if (t == "y" || t == "z" || t == "g" || t == "h") {
      throw UnsupportedFormatError("touchstone: parameter type '" + tok +
                                   "' is not supported (S only)");
    } else if (t == "ri") {
      opt.format = DataFormat::RI;
    } else if (t == "ma") {
      opt.format = DataFormat::MA;
    } else if (t == "db") {
      opt.format = DataFormat::DB;
    } else if (t == "r") {
      if (!(in >> opt.reference_impedance) ||
          !(opt.reference_impedance > 0.0)) {
        throw FormatError("touchstone: bad reference impedance after R");
      }
    } else {
      throw FormatError("touchstone: unrecognized option token '" + tok + "'");
    }
  }
  return opt;
}

Complex decode_entry(DataFormat fmt, double a, double b) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  switch (fmt) {
    case DataFormat::RI:
      return {a, b};
    case DataFormat::MA:
      return {a * std::cos(b * kDeg), a * std::sin(b * kDeg)};
    case DataFormat::DB: {
      const double mag = std::pow(10.0, a / 20.0);
      return {mag * std::cos(b * kDeg), mag * std::sin(b * kDeg)};
    }
  }
  return {};
}

std::vector<double> parse_numbers(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw DataError("touchstone: non-numeric token '" + tok + "'");
    }
    if (pos != tok.size()) {
      throw DataError("touchstone: non-numeric token '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

// Lines wrap at 4 complex pairs for n >= 3.
int pairs_on_first_line(int n) { return std::min(n, 4); }

int infer_ports(const std::vector<std::vector<double>>& lines) {
  const size_t t0 = lines[0].size();
  if (t0 == 3) return 1;
  if (t0 == 7) return 3;
  if (t0 == 9) {
    // 2-port points fit on one 9-token line; a 4-port block continues with
    // 8-token rows.
    if (lines.size() > 1 && lines[1].size() == 8) return 4;
    return 2;
  }
  throw DataError("touchstone: cannot infer port count from a " +
                  std::to_string(t0) + "-token data line; pass n_ports");
}

}  // namespace

ScatteringData parse_touchstone(std::string_view text, int n_ports_hint,
                                std::vector<std::string>* warnings) {
  std::istringstream stream{std::string(text)};
  std::string raw;
  bool have_option = false;
  OptionLine opt;
  std::vector<std::vector<double>> data_lines;

  while (std::getline(stream, raw)) {
    if (const auto bang = raw.find('!'); bang != std::string::npos) {
      raw.erase(bang);
    }
    // trim
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    raw = raw.substr(first, raw.find_last_not_of(" \t\r") - first + 1);

    if (raw[0] == '[') {
      if (to_lower(raw).rfind("[version]", 0) == 0) {
        throw UnsupportedFormatError(
            "touchstone: v2 files ([Version] keyword) are not supported");
      }
      throw FormatError("touchstone: unexpected keyword line '" + raw + "'");
    }
    if (raw[0] == '#') {
      if (!have_option) {
        opt = parse_option_line(raw);
        have_option = true;
      }
      continue;
    }
    data_lines.push_back(parse_numbers(raw));
  }

  if (!have_option) {
    throw FormatError("touchstone: missing '#' option line");
  }
  if (data_lines.empty()) {
    throw DataError("touchstone: no data lines");
  }

  const int n = n_ports_hint > 0 ? n_ports_hint : infer_ports(data_lines);
  const double f_scale = frequency_unit_to_hz(opt.unit);

  ScatteringData out;
  out.n_ports = n;
  out.reference_impedance = opt.reference_impedance;

  size_t li = 0;
  double prev_freq = 0.0;
  while (li < data_lines.size()) {
    const auto& first_line = data_lines[li];
    const size_t expect_first = 1 + 2 * static_cast<size_t>(
                                        n <= 2 ? n * n : pairs_on_first_line(n));
    if (n == 2 && first_line.size() == 5) {
      // 2-port noise parameter block: f Fmin |Gopt| ang(Gopt) Rn.
      if (warnings) warnings->push_back("noise-parameter section skipped");
      break;
    }
    if (first_line.size() != expect_first) {
      throw DataError("touchstone: expected " + std::to_string(expect_first) +
                      " values on a frequency line, got " +
                      std::to_string(first_line.size()));
    }
    const double freq_hz = first_line[0] * f_scale;
    if (!(freq_hz > 0.0)) {
      throw DataError("touchstone: non-positive frequency");
    }
    if (!out.points.empty() && freq_hz <= prev_freq) {
      if (n == 2) {
        // Decreasing frequency marks the start of noise data in 2-port files.
        if (warnings) warnings->push_back("noise-parameter section skipped");
        break;
      }
      throw DataError("touchstone: frequencies must be strictly increasing");
    }

    std::vector<double> values(first_line.begin() + 1, first_line.end());
    ++li;
    if (n >= 3) {
      // Each matrix row starts a new line and wraps at 4 pairs per line.
      for (int row = 0; row < n; ++row) {
        size_t have =
            row == 0 ? 2 * static_cast<size_t>(pairs_on_first_line(n)) : 0;
        const size_t need = 2 * static_cast<size_t>(n);
        while (have < need) {
          if (li >= data_lines.size()) {
            throw DataError("touchstone: truncated frequency block");
          }
          const auto& cont = data_lines[li];
          if (cont.size() > 8 || cont.size() + have > need) {
            throw DataError("touchstone: wrong value count in frequency block");
          }
          values.insert(values.end(), cont.begin(), cont.end());
          have += cont.size();
          ++li;
        }
      }
    }
    if (values.size() != 2 * static_cast<size_t>(n) * n) {
      throw DataError("touchstone: wrong value count in frequency block");
    }

    ComplexMatrix s(n, n);
    if (n == 2) {
      // 2-port column order is S11 S21 S12 S22, not row-major.
      s(0, 0) = decode_entry(opt.format, values[0], values[1]);
      s(1, 0) = decode_entry(opt.format, values[2], values[3]);
      s(0, 1) = decode_entry(opt.format, values[4], values[5]);
      s(1, 1) = decode_entry(opt.format, values[6], values[7]);
    } else {
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          const size_t k = 2 * static_cast<size_t>(r * n + c);
          s(r, c) = decode_entry(opt.format, values[k], values[k + 1]);
        }
      }
    }
    require_finite(s);
    out.points.push_back({freq_hz, std::move(s)});
    prev_freq = freq_hz;
  }

  return out;
}

namespace {

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void encode_entry(DataFormat fmt, const Complex& z, double& a, double& b) {
  constexpr double kDeg = 180.0 / std::numbers::pi;
  switch (fmt) {
    case DataFormat::RI:
      a = z.real();
      b = z.imag();
      return;
    case DataFormat::MA:
      a = std::abs(z);
      b = std::arg(z) * kDeg;
      return;
    case DataFormat::DB:
      a = 20.0 * std::log10(std::abs(z));
      b = std::arg(z) * kDeg;
      return;
  }
}

const char* unit_name(FrequencyUnit u) {
  switch (u) {
    case FrequencyUnit::Hz:
      return "Hz";
    case FrequencyUnit::kHz:
      return "kHz";
    case FrequencyUnit::MHz:
      return "MHz";
    case FrequencyUnit::GHz:
      return "GHz";
  }
  return "GHz";
}

const char* format_name(DataFormat f) {
  switch (f) {
    case DataFormat::RI:
      return "RI";
    case DataFormat::MA:
      return "MA";
    case DataFormat::DB:
      return "DB";
  }
  return "RI";
}

}  // namespace

std::string write_touchstone(const ScatteringData& data,
                             const TouchstoneOptions& opts) {
  if (data.n_ports < 1) throw InputError("write_touchstone: no ports");
  std::ostringstream out;
  out << "# " << unit_name(opts.frequency_unit) << " S "
      << format_name(opts.data_format) << " R "
      << fmt_value(opts.reference_impedance) << "\n";

  const double f_scale = frequency_unit_to_hz(opts.frequency_unit);
  const int n = data.n_ports;
  for (const auto& pt : data.points) {
    if (pt.s.rows() != n || pt.s.cols() != n) {
      throw InputError("write_touchstone: matrix size != n_ports");
    }
    out << fmt_value(pt.frequency_hz / f_scale);
    auto emit = [&](const Complex& z) {
      double a = 0.0, b = 0.0;
      encode_entry(opts.data_format, z, a, b);
      out << ' ' << fmt_value(a) << ' ' << fmt_value(b);
    };
    if (n == 1) {
      emit(pt.s(0, 0));
      out << '\n';
    } else if (n == 2) {
      emit(pt.s(0, 0));
      emit(pt.s(1, 0));
      emit(pt.s(0, 1));
      emit(pt.s(1, 1));
      out << '\n';
    } else {
      for (int r = 0; r < n; ++r) {
        int on_line = 0;
        for (int c = 0; c < n; ++c) {
          if (on_line == 4) {
            out << '\n';
            on_line = 0;
          }
          emit(pt.s(r, c));
          ++on_line;
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace nport
