#pragma once

#include <optional>

#include "singcert/linalg.hpp"

namespace singcert {

// A = vectors * diag(values) * vectors^T, eigenvectors stored as columns.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

// Cyclic Jacobi rotations. Eigenvalues are left in the order the sweeps
// produce (a diagonal input is returned untouched) unless `sort_descending`.
SymmetricEigen symmetric_eigen(const Matrix& a, bool sort_descending = false);

// sigma_1 >= ... >= sigma_min(m,n) >= 0, via one-sided (Hestenes) Jacobi,
// i.e. Jacobi on A^T A applied implicitly to the columns of A.
Vector singular_values(const Matrix& a);

// sigma_1(A).
double operator_norm(const Matrix& a);

// Eckart-Young: sigma_n(A) = 1/||A^{-1}||, zero for singular A.
double distance_to_singular(const Matrix& a);

// Q0^T A Q0 = D0 = diag(signs).
struct SignatureFactorization {
  Matrix q0;
  Vector signs;
  Vector sigma;  // singular values of A, nonincreasing

  Matrix d0() const { return Matrix::diagonal(signs); }
};

// Q0 = U |Lambda|^{-1/2} from A = U Lambda U^T. Throws NearSingular when
// sigma_n(A) <= tol (default 1e-12 * ||A||).
SignatureFactorization signature_diagonalize(const Matrix& a,
                                             std::optional<double> tol = std::nullopt);

bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

}  // namespace singcert
