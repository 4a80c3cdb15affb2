#pragma once

#include <vector>

#include "nport/types.hpp"

namespace nport {

struct OracleConfig {
  int phase_points_per_axis = 64;
  int max_ports = 4;      // combinatorial guard
  int threads = 0;        // 0 = auto, 1 = serial reference path
};

struct OracleResult {
  double value = 0.0;
  std::vector<double> best_phases;  // radians, one per port
};

// Brute-force lower bound on mu for scalar complex diagonal uncertainty:
// maximize spectral_radius(m * diag(e^{j theta})) over a uniform phase grid
// that includes theta = 0 on every axis. Every grid point corresponds to a
// feasible equal-modulus Delta, so the result never exceeds mu. Ties break
// toward the lexicographically smallest phase vector regardless of thread
// count.
OracleResult phase_grid_lower_bound(const ComplexMatrix& m,
                                    const OracleConfig& cfg);

}  // namespace nport
