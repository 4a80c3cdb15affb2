#pragma once

#include <utility>

#include "nport/types.hpp"

namespace nport {

// Determinant by partially pivoted LU. Near-singular matrices return the
// computed (tiny) value rather than erroring.
Complex determinant(const ComplexMatrix& m);

/// Largest singular value; >= 0.
double sigma_max(const ComplexMatrix& m);

/// max |lambda_i| over all eigenvalues of a square matrix.
double spectral_radius(const ComplexMatrix& m);

// Unit-norm u, v with m*v = sigma_max*u. For a degenerate top singular value
// any valid pair may come back.
std::pair<ComplexVector, ComplexVector> principal_singular_vectors(
    const ComplexMatrix& m);

namespace detail {

struct Eigenpair {
  Complex value;        // dominant eigenvalue (largest modulus)
  ComplexVector right;  // unit right eigenvector
  ComplexVector left;   // left eigenvector, scaled so left^H * right = 1
};

// Dominant eigenpair of a square matrix via a full eigendecomposition.
// Deterministic: ties on |lambda| break toward the smaller solver index.
Eigenpair dominant_eigenpair(const ComplexMatrix& m);

}  // namespace detail

}  // namespace nport
