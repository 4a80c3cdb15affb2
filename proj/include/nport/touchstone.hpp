#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nport/types.hpp"

namespace nport {

enum class FrequencyUnit { Hz, kHz, MHz, GHz };
enum class DataFormat { RI, MA, DB };

struct TouchstoneOptions {
  FrequencyUnit frequency_unit = FrequencyUnit::GHz;
  DataFormat data_format = DataFormat::MA;
  double reference_impedance = 50.0;
};

struct ScatteringData {
  struct Point {
    double frequency_hz = 0.0;
    ComplexMatrix s;
  };

  int n_ports = 0;
  double reference_impedance = 50.0;
  std::vector<Point> points;
};

double frequency_unit_to_hz(FrequencyUnit u);

// Parse a Touchstone v1 document. Frequencies come back in Hz, entries in
// rectangular form. n_ports_hint = 0 infers the port count from the data
// layout (reliable for 1..4 ports); pass the count from the .sNp extension
// for larger networks. Noise-parameter sections in 2-port files are skipped
// with a warning appended to *warnings.
ScatteringData parse_touchstone(std::string_view text, int n_ports_hint = 0,
                                std::vector<std::string>* warnings = nullptr);

// Emit a Touchstone v1 document. RI output prints 17 significant digits so
// parse(write(d)) reproduces d bit-exactly.
std::string write_touchstone(const ScatteringData& data,
                             const TouchstoneOptions& opts);

}  // namespace nport
