#pragma once

#include <functional>
#include <optional>

#include "singcert/ck_norm.hpp"
#include "singcert/linalg.hpp"

namespace singcert {

struct NewtonOptions {
  int max_iter = 100;
  double tol = 1e-12;             // on the residual norm
  std::optional<Ball> domain;     // iterates are projected back into it
};

struct NewtonResult {
  Vector x;
  int iterations = 0;
  int clamped_steps = 0;
  double residual = 0.0;
  bool converged = false;
};

using ResidualFn = std::function<Vector(std::span<const double>)>;
using JacobianFn = std::function<Matrix(std::span<const double>)>;

// Full Newton steps x <- x - J(x)^{-1} r(x), falling back to a least-squares
// step when J is singular. Never throws on non-convergence.
NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Vector start,
                          const NewtonOptions& options = {});

// Minimum-norm least-squares solve via the normal equations of the
// smaller side, regularised; used only as a fallback.
Vector least_squares_step(const Matrix& a, std::span<const double> b);

}  // namespace singcert
