// Compares the serial reference sweep path against the OpenMP-parallel one
// on the 1000-point 4x4 scale sweep workload and reports timings.
#include <cstdio>
#include <random>

#include "nport/stability.hpp"

int main() {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  nport::ComplexMatrix m(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      m(r, c) = 0.5 * nport::Complex(gauss(rng), gauss(rng));
    }
  }

  nport::SsvOptions opts;
  const auto serial =
      nport::scale_entry_sweep(m, 0, 0, 0.0, 3.0, 1000, opts, 1e-6, 1);
  std::printf("serial:   %8.3f s  (%zu points)\n", serial.elapsed_seconds,
              serial.points.size());
  const auto parallel =
      nport::scale_entry_sweep(m, 0, 0, 0.0, 3.0, 1000, opts, 1e-6, 0);
  std::printf("parallel: %8.3f s  (speedup %.2fx)\n", parallel.elapsed_seconds,
              serial.elapsed_seconds / parallel.elapsed_seconds);

  for (size_t i = 0; i < serial.points.size(); ++i) {
    if (serial.points[i].bounds.lower != parallel.points[i].bounds.lower ||
        serial.points[i].bounds.upper != parallel.points[i].bounds.upper) {
      std::printf("MISMATCH at point %zu\n", i);
      return 1;
    }
  }
  std::printf("serial and parallel outputs identical\n");
  return 0;
}
