#pragma once

#include <optional>
#include <vector>

#include "nport/ssv.hpp"
#include "nport/touchstone.hpp"
#include "nport/types.hpp"

namespace nport {

enum class PointClass { Stable, Unstable, Straddling };

// Per-point classification against the gamma level.
PointClass classify_point(const SsvBounds& b, double gamma, double margin_tol);

struct StabilityVerdict {
  enum class Kind { UnconditionallyStable, PotentiallyUnstable, Indeterminate };

  Kind kind = Kind::Indeterminate;
  // PotentiallyUnstable: parameter value (frequency or c) of the worst point.
  double worst_parameter = 0.0;
  double worst_lower = 0.0;
  // Indeterminate: parameter values where the bounds straddle the level.
  std::vector<double> gap_parameters;
};

const char* to_string(StabilityVerdict::Kind k);

struct SweepPoint {
  double parameter = 0.0;  // frequency in Hz, or scale coefficient c
  SsvBounds bounds;
};

struct SweepReport {
  std::vector<SweepPoint> points;  // ordered by parameter value
  StabilityVerdict verdict;
  std::optional<double> transition;  // first parameter where mu crosses gamma
  double elapsed_seconds = 0.0;      // numeric phase only
};

// Linear interpolation of the upper-bound curve at `level` between the first
// adjacent straddling pair; the first point's parameter if it already starts
// at or above the level.
std::optional<double> find_transition(const std::vector<SweepPoint>& points,
                                      double level = 1.0);

// Per-frequency mu bounds with ScalarComplexDiagonal(n_ports) structure.
// threads: 0 = auto, 1 = serial reference path; output is identical either
// way. Caller asserts intrinsic (Rollett-proviso) stability out of band.
SweepReport analyze_frequency_sweep(const ScatteringData& data,
                                    const SsvOptions& o,
                                    double margin_tol = 1e-6, int threads = 0);

// Replace s[row, col] by c * s[row, col] on a uniform c grid and compute mu
// bounds at every point. Indices are 0-based.
SweepReport scale_entry_sweep(const ComplexMatrix& s, int row, int col,
                              double c_from, double c_to, int n_points,
                              const SsvOptions& o, double margin_tol = 1e-6,
                              int threads = 0);

struct TwoPortFactors {
  double k = 0.0;
  double det_magnitude = 0.0;  // |S11 S22 - S12 S21|
  std::optional<double> mu_es;
};

// Rollett K and |det|; K > 1 needs |det| < 1 as auxiliary condition, the
// conjunction is left to the caller.
TwoPortFactors rollett_k(const ComplexMatrix& s);

// Edwards-Sinsky geometric factor; > 1 iff unconditionally stable.
double edwards_sinsky_mu(const ComplexMatrix& s);

}  // namespace nport
