#pragma once

#include <memory>
#include <optional>

#include "singcert/ck_norm.hpp"
#include "singcert/jet_oracle.hpp"
#include "singcert/verification.hpp"

namespace singcert {

// Radius of the triangular diagonalization of an n x n family with C^k norm Kbar.
double diag_delta(double kbar, std::size_t n);
// |DQ| <= (Kbar+1)(1 + (Kbar+2) n(n+1)); the splitting proof uses (Kbar+2)^2.
double diag_dq_bound(double kbar, std::size_t n);
double diag_dq_bound_squared(double kbar, std::size_t n);
// |Q|_{C^k} <= 2^{k-1}(Kbar+1) EI(Kbar+1, (Kbar+1)(1+(Kbar+2)n(n+1)), k-1), k >= 2.
double diag_ck_bound(double kbar, std::size_t n, int k);

// Upper triangular Q with positive diagonal and Q^T diag(signs) Q = B.
// Throws SignBreakdown when a pivot has the wrong sign.
Matrix signed_cholesky(const Matrix& b, std::span<const double> signs);
// Derivative of signed_cholesky along Bdot, given Q = signed_cholesky(B).
Matrix signed_cholesky_derivative(const Matrix& q, std::span<const double> signs, const Matrix& bdot);

// A symmetric matrix family x -> Bbar(x) given as an oracle with n*n
// row-major outputs, factored pointwise as Bbar = Q^T D0 Q.
class TriangularFamily {
 public:
  TriangularFamily(OraclePtr family, std::size_t n, Vector base, Vector signs, double kbar, int k);

  std::size_t size() const { return n_; }
  const Vector& base() const { return base_; }
  const Vector& signs() const { return signs_; }
  double kbar() const { return kbar_; }
  int order() const { return k_; }
  double delta_diag() const { return delta_; }

  Matrix bbar(std::span<const double> x) const;
  Matrix q(std::span<const double> x) const;
  // dQ/dx_c for every input coordinate c.
  std::vector<Matrix> dq(std::span<const double> x) const;

 private:
  OraclePtr family_;
  std::size_t n_;
  Vector base_;
  Vector signs_;
  double kbar_;
  int k_;
  double delta_;
};

// Requires Bbar(base) = diag(+-1) to 1e-10 (NotDiagonalAtOrigin otherwise).
TriangularFamily diagonalize_family(OraclePtr family, std::size_t n, double kbar, int k, Vector base = {});

struct FamilyVerifyOptions {
  std::size_t samples = 1000;
  unsigned long long seed = 1;
};

// reconstruction, q_at_base, dq_bound on B_delta(base).
VerificationReport verify_family(const TriangularFamily& family, const FamilyVerifyOptions& options = {});

// sigma^{5/2}/(32(K+1)^{9/2}) min(1, 2 sigma^2/(3(p^2+p+1)), sigma^{3/2}/(2(p^2+p+1))).
double splitting_delta(double K, double sigma_p, std::size_t p);
double splitting_dphi_bound(double K, double sigma_p);
// M(K, sigma_p, k) bounding |phi|_{C^{k-1}}, k >= 3.
double splitting_ck_bound(double K, double sigma_p, std::size_t p, int k);

// Radii of the construction; chart = min(theorem, internal).
struct SplitRadii {
  double implicit_r = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double r3 = 0.0;
  double kbar = 0.0;
  double internal = 0.0;
  double theorem = 0.0;
  double chart = 0.0;
};

SplitRadii split_radii(double K, double sigma_p, std::size_t p);

struct SplitOptions {
  double rank_tol = 1e-8;       // sigma_{p+1} <= rank_tol * sigma_1 declares rank p
  double critical_tol = 1e-10;  // |Df(x0)|
};

struct SplitCertificate {
  Vector x0;
  std::size_t n = 0;
  std::size_t p = 0;
  Vector signs;
  double K = 0.0;
  double sigma_p = 0.0;
  double delta = 0.0;           // chart domain B_delta(0): min of the two below
  double delta_theorem = 0.0;   // splitting_delta(K, sigma_p, p)
  double delta_internal = 0.0;  // min(delta2, r3) delta3 / 2 from the construction
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  double r3 = 0.0;
  double implicit_r = 0.0;
  double kbar = 0.0;
  double dphi_bound = 0.0;
  double ck_phi_bound = 0.0;
  int k = 3;
  double fx0 = 0.0;
  // x = x0 + rotation * w; the Hessian is diagonal in w with |eigenvalues| decreasing.
  Matrix rotation;
  Matrix q0;
};

// Chart phi on B_delta(0) in R^p x R^{n-p} with
// f(phi(x, y)) = f(x0) + sum signs_i x_i^2 + alpha(y).
class SplitChart {
 public:
  SplitChart(OraclePtr f, SplitCertificate cert);

  const SplitCertificate& certificate() const { return cert_; }

  Vector phi(std::span<const double> w) const;
  Matrix dphi(std::span<const double> w) const;
  double alpha(std::span<const double> y) const;
  Vector alpha_gradient(std::span<const double> y) const;
  Vector g(std::span<const double> y) const;
  // f(x0) + sum signs_i x_i^2 + alpha(y)
  double normal_form(std::span<const double> w) const;

  // Matrices of the construction in rotated coordinates (x, y).
  Matrix b(std::span<const double> w) const;
  Matrix bbar(std::span<const double> w) const;
  Matrix q(std::span<const double> w) const;
  // f2(x, y) = f(x + g(y), y) - f(x0) - alpha(y)
  double f2(std::span<const double> w) const;
  // phi2^{-1}(u, y) = (x, y)
  Vector phi2_inverse(std::span<const double> w) const;

 private:
  struct Family {
    Matrix b;
    std::vector<Matrix> db;  // empty unless requested
  };
  Family family_at(std::span<const double> x, std::span<const double> y, std::span<const double> gy,
                   const Matrix* dg, bool derivative) const;
  Matrix dg_at(std::span<const double> gy, std::span<const double> y) const;
  Matrix dphi2(std::span<const double> x, std::span<const double> y) const;

  OraclePtr f_;
  OraclePtr rotated_;
  OraclePtr gradient_;
  SplitCertificate cert_;
  Matrix q0_inv_;
};

SplitChart build_split_chart(OraclePtr f, std::span<const double> x0, const CkNormBound& kbound, int k,
                             const SplitOptions& options = {});

// max over samples in B_delta of |f(phi(w)) - normal_form(w)|.
double normal_form_residual(const JetOracle& f, const SplitChart& chart, std::size_t samples,
                            unsigned long long seed = 1, double radius_fraction = 1.0);

struct SplitVerifyOptions {
  std::size_t samples = 1000;
  unsigned long long seed = 1;
};

// normal_form, alpha_jet, dphi_bound, reconstruction, quadratic_identity.
VerificationReport verify_split(const JetOracle& f, const SplitChart& chart, const SplitVerifyOptions& options = {});

}  // namespace singcert
