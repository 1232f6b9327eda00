#pragma once

#include <optional>

#include "singcert/ck_norm.hpp"
#include "singcert/jet_oracle.hpp"
#include "singcert/newton.hpp"
#include "singcert/verification.hpp"

namespace singcert {

struct InverseRadii {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double lip_inverse = 0.0;
};

struct InverseCertificate {
  Vector x0;
  double K = 0.0;
  double delta = 0.0;
  double r = 0.0;
  double rho1 = 0.0;   // domain radius around x0
  double rho2 = 0.0;   // image radius around f(x0)
  double lip_inverse = 0.0;
  std::optional<double> ck_inverse;
  std::optional<double> ck_inverse_from_one;  // set when the two EI ranges differ
  int k = 1;
  Vector fx0;
};

// (r delta / 2K, r delta / 2, 1 / delta); also the general Lipschitz case
// where delta and r come from the caller.
InverseRadii inverse_radii(double K, double delta, double r);

struct InverseOptions {
  std::optional<double> delta;  // a smaller delta' is honoured
  double singular_tol = 1e-12;  // relative to max(1, sigma_1)
};

// delta = sigma_n(Df(x0)) / 2, r = delta / K.
InverseCertificate smooth_inverse_certificate(const JetOracle& f, std::span<const double> x0,
                                              const CkNormBound& kbound, int k,
                                              const InverseOptions& options = {});

// Newton from x0, iterates projected into B_r(x0). The result is checked
// against the modulus bound |x - x0| <= |y - f(x0)| / delta (<= r/2).
NewtonResult evaluate_inverse(const JetOracle& f, const InverseCertificate& cert, std::span<const double> y,
                              bool strict_domain = false);

// Taylor jets of f^{-1} at y (variables: increments of y) given x = f^{-1}(y).
std::vector<TaylorJet> inverse_jets(const JetOracle& f, std::span<const double> x, std::span<const double> y, int order);

struct InverseVerifyOptions {
  std::size_t pairs = 10000;
  std::size_t targets = 1000;
  std::size_t variation_samples = 2000;
  std::size_t ck_samples = 200;
  unsigned long long seed = 1;
  bool check_ck = true;
};

VerificationReport verify_inverse(const JetOracle& f, const InverseCertificate& cert,
                                  const InverseVerifyOptions& options = {});

}  // namespace singcert
