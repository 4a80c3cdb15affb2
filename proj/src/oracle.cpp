#include "nport/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nport/matrix_core.hpp"

namespace nport {

namespace {

// theta for grid index, most significant digit = first port so the linear
// index order matches lexicographic phase order.
void index_to_phases(std::uint64_t idx, int n, int k, double step,
                     RealVector& theta) {
  for (int i = n - 1; i >= 0; --i) {
    theta(i) = step * static_cast<double>(idx % k);
    idx /= k;
  }
}

double rho_at(const ComplexMatrix& m, const RealVector& theta) {
  const Eigen::Index n = m.rows();
  ComplexMatrix a = m;
  for (Eigen::Index c = 0; c < n; ++c) {
    a.col(c) *= Complex(std::cos(theta(c)), std::sin(theta(c)));
  }
  return spectral_radius(a);
}

}  // namespace

OracleResult phase_grid_lower_bound(const ComplexMatrix& m,
                                    const OracleConfig& cfg) {
  if (m.rows() != m.cols()) {
    throw DimensionError("phase_grid_lower_bound: matrix must be square");
  }
  require_finite(m);
  const int n = static_cast<int>(m.rows());
  if (n > cfg.max_ports) {
    throw GridGuardError("phase_grid_lower_bound: " + std::to_string(n) +
                         " ports exceeds max_ports guard");
  }
  if (cfg.phase_points_per_axis < 4) {
    throw InputError("phase_grid_lower_bound: need >= 4 points per axis");
  }
  const int k = cfg.phase_points_per_axis;
  double total_d = 1.0;
  for (int i = 0; i < n; ++i) total_d *= k;
  if (total_d > 1e8) {
    throw GridGuardError("phase_grid_lower_bound: grid size exceeds 1e8");
  }
  const auto total = static_cast<std::uint64_t>(total_d);
  const double step = 2.0 * std::numbers::pi / k;

  double best_value = -1.0;
  std::uint64_t best_idx = 0;

#ifdef _OPENMP
  const int nthreads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#else
  const int nthreads = 1;
#endif

  if (nthreads == 1) {
    RealVector theta(n);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      index_to_phases(idx, n, k, step, theta);
      const double v = rho_at(m, theta);
      if (v > best_value) {
        best_value = v;
        best_idx = idx;
      }
    }
  } else {
#ifdef _OPENMP
#pragma omp parallel num_threads(nthreads)
    {
      double local_best = -1.0;
      std::uint64_t local_idx = 0;
      RealVector theta(n);
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(total); ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        index_to_phases(idx, n, k, step, theta);
        const double v = rho_at(m, theta);
        // strict > with ascending idx inside each thread keeps the smallest
        // index per value locally
        if (v > local_best) {
          local_best = v;
          local_idx = idx;
        }
      }
#pragma omp critical
      {
        if (local_best > best_value ||
            (local_best == best_value && local_idx < best_idx)) {
          best_value = local_best;
          best_idx = local_idx;
        }
      }
    }
#endif
  }

  OracleResult r;
  r.value = best_value < 0.0 ? 0.0 : best_value;
  RealVector theta(n);
  index_to_phases(best_idx, n, k, step, theta);
  r.best_phases.assign(theta.data(), theta.data() + n);
  return r;
}

}  // namespace nport
