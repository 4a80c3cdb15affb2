#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "nport/touchstone.hpp"
#include "nport/types.hpp"

namespace nport {

// Block structure of the uncertainty: either n independent scalar complex
// blocks (the diagonal of reflection coefficients) or one full complex block.
struct UncertaintyStructure {
  enum class Kind { ScalarComplexDiagonal, FullComplex };

  Kind kind = Kind::ScalarComplexDiagonal;
  int dimension = 0;

  static UncertaintyStructure diagonal(int n) {
    return {Kind::ScalarComplexDiagonal, n};
  }
  static UncertaintyStructure full(int n) { return {Kind::FullComplex, n}; }
};

// A concrete perturbation certifying a lower bound.
struct DeltaCandidate {
  UncertaintyStructure::Kind kind =
      UncertaintyStructure::Kind::ScalarComplexDiagonal;
  ComplexVector diagonal;  // used when kind == ScalarComplexDiagonal
  ComplexMatrix full;      // used when kind == FullComplex

  ComplexMatrix as_matrix() const;
  double norm() const;  // sigma_max of the perturbation
};

struct SsvBounds {
  double lower = 0.0;
  double upper = 0.0;
  RealVector d_scale;  // optimal positive diagonal D, first entry 1
  std::optional<DeltaCandidate> destabilizer;
};

struct SsvOptions {
  double gamma = 1.0;  // admissible |Delta| bound; the verdict threshold
  int restarts = 10;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double convergence_tol = 1e-9;
};

void validate(const SsvOptions& o);

struct VerifyResult {
  double residual = 0.0;
  // 1/sigma_max(Delta); empty means unbounded (Delta == 0), serialized null.
  std::optional<double> implied_mu;
};

// Sampled H-infinity norm: max over sweep points of sigma_max(S(f)).
double small_gain_norm(const ScatteringData& data);

// D-scale upper bound: min over positive diagonal D (d_1 = 1) of
// sigma_max(D m D^-1), by cyclic coordinate descent with golden-section line
// search in log-space. Any feasible D upper-bounds mu, so early termination
// is safe. FullComplex reduces to sigma_max(m) with no optimization.
std::pair<double, RealVector> mu_upper(const ComplexMatrix& m,
                                       const UncertaintyStructure& s,
                                       const SsvOptions& o);

// Certified lower bound: maximizes rho(m * diag(e^{j theta})) by a power-style
// alternation of dominant-eigenpair and phase-alignment steps over `restarts`
// seeded initializations (the first is theta = 0). The returned Delta always
// satisfies det(I - m Delta) = 0 with sigma_max(Delta) = 1/value.
std::pair<double, std::optional<DeltaCandidate>> mu_lower(
    const ComplexMatrix& m, const UncertaintyStructure& s, const SsvOptions& o);

SsvBounds mu_bounds(const ComplexMatrix& m, const UncertaintyStructure& s,
                    const SsvOptions& o);

VerifyResult verify_destabilizer(const ComplexMatrix& m,
                                 const DeltaCandidate& delta);

}  // namespace nport
