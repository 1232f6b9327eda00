#include "singcert/newton.hpp"

#include <cmath>

namespace singcert {

Vector least_squares_step(const Matrix& a, std::span<const double> b) {
  // (A^T A + mu I) x = A^T b with a tiny Tikhonov shift
  const Matrix at = a.transpose();
  Matrix ata = at * a;
  const double mu = 1e-14 * std::max(1.0, ata.max_abs());
  for (std::size_t i = 0; i < ata.rows(); ++i) ata(i, i) += mu;
  Vector x;
  if (!try_solve(ata, at.apply(b), x)) x.assign(a.cols(), 0.0);
  return x;
}

NewtonResult newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Vector start,
                          const NewtonOptions& options) {
  NewtonResult out;
  out.x = std::move(start);
  Vector r = residual(out.x);
  out.residual = norm(r);
  double best = out.residual;
  int stalled = 0;
  while (out.iterations < options.max_iter) {
    if (out.residual <= options.tol) {
      out.converged = true;
      return out;
    }
    const Matrix j = jacobian(out.x);
    Vector step;
    if (!j.is_square() || !try_solve(j, r, step)) step = least_squares_step(j, r);
    for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] -= step[i];
    ++out.iterations;
    if (options.domain) {
      const Ball& d = *options.domain;
      const double dist = distance(out.x, d.center);
      if (dist > d.radius) {
        for (std::size_t i = 0; i < out.x.size(); ++i)
          out.x[i] = d.center[i] + (out.x[i] - d.center[i]) * (d.radius / dist);
        ++out.clamped_steps;
      }
    }
    r = residual(out.x);
    out.residual = norm(r);
    // rounding floor reached: the residual stops improving
    if (out.residual < best * 0.5) {
      best = out.residual;
      stalled = 0;
    } else if (++stalled >= 3 && out.residual <= 100.0 * options.tol) {
      out.converged = true;
      return out;
    }
    if (!std::isfinite(out.residual)) return out;
  }
  out.converged = out.residual <= options.tol;
  return out;
}

}  // namespace singcert
