#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace nport {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Default numeric tolerances, collected in one place so call sites share them.
struct NumericSettings {
  double svd_rel_tol = 1e-10;
  double eig_rel_tol = 1e-10;
  double singular_vector_residual_tol = 1e-8;
  double bounds_report_tol = 1e-12;
  double destabilizer_residual_tol = 1e-6;

  static const NumericSettings& defaults();
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StructureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UndefinedFactorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No NaN/Inf is admitted into any matrix.
void require_finite(const ComplexMatrix& m);

}  // namespace nport
