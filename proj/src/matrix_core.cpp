#include "nport/matrix_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

namespace nport {

const NumericSettings& NumericSettings::defaults() {
  static const NumericSettings s{};
  return s;
}

void require_finite(const ComplexMatrix& m) {
  if (!m.allFinite()) {
    throw DataError("matrix contains a non-finite entry");
  }
}

namespace {

void require_square(const ComplexMatrix& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(op) + ": matrix must be square, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

void require_nonempty(const ComplexMatrix& m, const char* op) {
  if (m.size() == 0) {
    throw DimensionError(std::string(op) + ": matrix must be nonempty");
  }
}

}  // namespace

Complex determinant(const ComplexMatrix& m) {
  require_square(m, "determinant");
  require_nonempty(m, "determinant");
  require_finite(m);
  if (m.rows() == 1) return m(0, 0);
  return Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
}

double sigma_max(const ComplexMatrix& m) {
  require_nonempty(m, "sigma_max");
  require_finite(m);
  // 1x1 and rank-one-by-shape cases fall out of the general path fine;
  // JacobiSVD is deterministic and accurate at these sizes.
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_radius(const ComplexMatrix& m) {
  require_square(m, "spectral_radius");
  require_nonempty(m, "spectral_radius");
  require_finite(m);
  const auto n = m.rows();
  if (n == 1) return std::abs(m(0, 0));
  if (n == 2) {
    // Closed form: lambda = (tr +/- sqrt(tr^2 - 4 det)) / 2.
    const Complex tr = m(0, 0) + m(1, 1);
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    return 0.5 * std::max(std::abs(tr + disc), std::abs(tr - disc));
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::pair<ComplexVector, ComplexVector> principal_singular_vectors(
    const ComplexMatrix& m) {
  require_nonempty(m, "principal_singular_vectors");
  require_finite(m);
  Eigen::JacobiSVD<ComplexMatrix> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().col(0), svd.matrixV().col(0)};
}

namespace detail {

Eigenpair dominant_eigenpair(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/true);
  const auto& vals = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < vals.size(); ++i) {
    if (std::abs(vals(i)) > std::abs(vals(best))) best = i;
  }
  Eigenpair ep;
  ep.value = vals(best);
  ep.right = es.eigenvectors().col(best).normalized();
  // Left eigenvector from the inverse of the eigenvector basis; row `best`
  // of V^{-1} satisfies row * A = lambda * row and row * right = 1.
  const ComplexMatrix vinv = es.eigenvectors().inverse();
  ep.left = vinv.row(best).adjoint();
  // left^H right is 1 up to roundoff; renormalize when the basis is poorly
  // conditioned.
  const Complex dot = ep.left.dot(ep.right);
  if (std::abs(dot) > 0) ep.left /= std::conj(dot);
  return ep;
}

}  // namespace detail

}  // namespace nport
