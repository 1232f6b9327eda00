#pragma once

#include <optional>

#include "singcert/ck_norm.hpp"
#include "singcert/jet_oracle.hpp"
#include "singcert/verification.hpp"

namespace singcert {

// Zero set of F : R^m x R^n -> R^n near (x0, y0); the first m inputs of the
// oracle are x, the remaining n are y.
struct ImplicitCertificate {
  Vector x0;
  Vector y0;
  double K = 0.0;
  double delta = 0.0;
  double r = 0.0;
  double rho = 0.0;      // g is defined on B_rho(x0)
  double lip_g = 0.0;
  std::optional<double> ck_g;
  int k = 1;
  double partial_inv_norm = 0.0;  // |(dF/dy(x0, y0))^{-1}|
};

// 1 / (2 sqrt(1 + (1 + K)^2 s^2)) with s = sup |M2^{-1}|.
double implicit_delta(double K, double m2_inv_norm);

// Formula-only certificate for a Lipschitz F: caller supplies K, sup |M2^{-1}| and r.
ImplicitCertificate lipschitz_implicit_certificate(std::span<const double> x0, std::span<const double> y0, double K,
                                                   double m2_inv_norm, double r);

ImplicitCertificate smooth_implicit_certificate(const JetOracle& F, std::size_t m, std::span<const double> x0,
                                                std::span<const double> y0, const CkNormBound& kbound, int k);

struct ImplicitSolution {
  Vector y;
  int path_steps = 0;
  double residual = 0.0;
};

// Continuation along x0 -> x with Newton corrections in y; 8 steps, doubled
// on failure up to 256. Requires x in B_rho(x0); the path must stay in B_r.
ImplicitSolution solve_implicit(const JetOracle& F, const ImplicitCertificate& cert, std::span<const double> x);

// The same continuation without a certificate; the path must stay within
// guard_radius of (x0, y0).
ImplicitSolution continue_implicit(const JetOracle& F, std::size_t m, std::span<const double> x0,
                                   std::span<const double> y0, std::span<const double> x, double guard_radius);

// -(dF/dy)^{-1} dF/dx at (x, y).
Matrix implicit_derivative(const JetOracle& F, std::size_t m, std::span<const double> x, std::span<const double> y);

// Taylor jets of g at x (variables: increments of x) given y = g(x).
std::vector<TaylorJet> implicit_jets(const JetOracle& F, std::size_t m, std::span<const double> x,
                                     std::span<const double> y, int order);

struct ImplicitVerifyOptions {
  std::size_t points = 1000;
  std::size_t pairs = 2000;
  std::size_t derivative_points = 100;
  std::size_t ck_samples = 100;
  unsigned long long seed = 1;
  bool check_ck = true;
};

VerificationReport verify_implicit(const JetOracle& F, const ImplicitCertificate& cert,
                                   const ImplicitVerifyOptions& options = {});

}  // namespace singcert
