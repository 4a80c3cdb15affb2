#include "nport/stability.hpp"

#include <chrono>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nport/matrix_core.hpp"

namespace nport {

PointClass classify_point(const SsvBounds& b, double gamma, double margin_tol) {
  if (b.lower >= gamma) return PointClass::Unstable;
  if (b.upper < gamma - margin_tol) return PointClass::Stable;
  return PointClass::Straddling;
}

const char* to_string(StabilityVerdict::Kind k) {
  switch (k) {
    case StabilityVerdict::Kind::UnconditionallyStable:
      return "UnconditionallyStable";
    case StabilityVerdict::Kind::PotentiallyUnstable:
      return "PotentiallyUnstable";
    case StabilityVerdict::Kind::Indeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

std::optional<double> find_transition(const std::vector<SweepPoint>& points,
                                      double level) {
  for (size_t i = 0; i < points.size(); ++i) {
    const double u = points[i].bounds.upper;
    if (u >= level) {
      if (i == 0) return points[0].parameter;
      const double u_prev = points[i - 1].bounds.upper;
      const double x_prev = points[i - 1].parameter;
      const double x = points[i].parameter;
      if (u == u_prev) return x;
      return x_prev + (level - u_prev) / (u - u_prev) * (x - x_prev);
    }
  }
  return std::nullopt;
}

namespace {

StabilityVerdict make_verdict(const std::vector<SweepPoint>& points,
                              double gamma, double margin_tol) {
  StabilityVerdict v;
  bool any_unstable = false;
  bool all_stable = true;
  for (const auto& p : points) {
    switch (classify_point(p.bounds, gamma, margin_tol)) {
      case PointClass::Unstable:
        all_stable = false;
        if (!any_unstable || p.bounds.lower > v.worst_lower) {
          v.worst_parameter = p.parameter;
          v.worst_lower = p.bounds.lower;
        }
        any_unstable = true;
        break;
      case PointClass::Straddling:
        all_stable = false;
        v.gap_parameters.push_back(p.parameter);
        break;
      case PointClass::Stable:
        break;
    }
  }
  if (any_unstable) {
    v.kind = StabilityVerdict::Kind::PotentiallyUnstable;
    v.gap_parameters.clear();
  } else if (all_stable) {
    v.kind = StabilityVerdict::Kind::UnconditionallyStable;
  } else {
    v.kind = StabilityVerdict::Kind::Indeterminate;
  }
  return v;
}

// Deterministic parallel map: point i is a pure function of its inputs, so
// results match the serial reference path for any thread count.
template <class F>
void map_points(int count, int threads, F&& body) {
#ifdef _OPENMP
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  if (nthreads > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
#else
  (void)threads;
#endif
  for (int i = 0; i < count; ++i) body(i);
}

SweepReport finish_report(std::vector<SweepPoint> points, const SsvOptions& o,
                          double margin_tol, double seconds) {
  SweepReport r;
  r.verdict = make_verdict(points, o.gamma, margin_tol);
  r.transition = find_transition(points, o.gamma);
  r.points = std::move(points);
  r.elapsed_seconds = seconds;
  return r;
}

}  // namespace

SweepReport analyze_frequency_sweep(const ScatteringData& data,
                                    const SsvOptions& o, double margin_tol,
                                    int threads) {
  if (data.points.empty()) {
    throw InputError("analyze_frequency_sweep: empty sweep data");
  }
  validate(o);
  const auto structure = UncertaintyStructure::diagonal(data.n_ports);
  std::vector<SweepPoint> points(data.points.size());
  const auto t0 = std::chrono::steady_clock::now();
  map_points(static_cast<int>(data.points.size()), threads, [&](int i) {
    points[i].parameter = data.points[i].frequency_hz;
    points[i].bounds = mu_bounds(data.points[i].s, structure, o);
  });
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;
  return finish_report(std::move(points), o, margin_tol, dt.count());
}

SweepReport scale_entry_sweep(const ComplexMatrix& s, int row, int col,
                              double c_from, double c_to, int n_points,
                              const SsvOptions& o, double margin_tol,
                              int threads) {
  if (s.rows() != s.cols()) {
    throw DimensionError("scale_entry_sweep: matrix must be square");
  }
  if (row < 0 || col < 0 || row >= s.rows() || col >= s.cols()) {
    throw InputError("scale_entry_sweep: entry index out of range");
  }
  if (n_points < 2) throw InputError("scale_entry_sweep: need >= 2 points");
  validate(o);
  require_finite(s);

  const auto structure =
      UncertaintyStructure::diagonal(static_cast<int>(s.rows()));
  std::vector<SweepPoint> points(n_points);
  const double dc = (c_to - c_from) / (n_points - 1);
  const auto t0 = std::chrono::steady_clock::now();
  map_points(n_points, threads, [&](int i) {
    const double c = c_from + dc * i;
    ComplexMatrix scaled = s;
    scaled(row, col) *= c;
    points[i].parameter = c;
    points[i].bounds = mu_bounds(scaled, structure, o);
  });
  const std::chrono::duration<double> dt =
      std::chrono::steady_clock::now() - t0;
  return finish_report(std::move(points), o, margin_tol, dt.count());
}

namespace {

void require_two_port(const ComplexMatrix& s, const char* op) {
  if (s.rows() != 2 || s.cols() != 2) {
    throw DimensionError(std::string(op) + ": requires a 2x2 matrix");
  }
  require_finite(s);
}

}  // namespace

TwoPortFactors rollett_k(const ComplexMatrix& s) {
  require_two_port(s, "rollett_k");
  const Complex det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  const double s12s21 = std::abs(s(0, 1) * s(1, 0));
  if (s12s21 == 0.0) {
    throw UndefinedFactorError("rollett_k: S12*S21 = 0 (unilateral device)");
  }
  TwoPortFactors f;
  f.det_magnitude = std::abs(det);
  f.k = (1.0 - std::norm(s(0, 0)) - std::norm(s(1, 1)) + std::norm(det)) /
        (2.0 * s12s21);
  return f;
}

double edwards_sinsky_mu(const ComplexMatrix& s) {
  require_two_port(s, "edwards_sinsky_mu");
  const Complex det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  const double denom = std::abs(s(1, 1) - det * std::conj(s(0, 0))) +
                       std::abs(s(0, 1) * s(1, 0));
  if (denom == 0.0) {
    throw UndefinedFactorError("edwards_sinsky_mu: zero denominator");
  }
  return (1.0 - std::norm(s(0, 0))) / denom;
}

}  // namespace nport
