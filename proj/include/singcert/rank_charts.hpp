#pragma once

#include <memory>
#include <optional>

#include "singcert/certified_inverse.hpp"
#include "singcert/ck_norm.hpp"
#include "singcert/jet_oracle.hpp"
#include "singcert/verification.hpp"

namespace singcert {

struct RankCertificate {
  Vector x0;
  std::size_t p = 0;
  double K = 0.0;
  double delta = 0.0;
  double r = 0.0;
  double rho1 = 0.0;  // phi is certified on B_rho1(x0)
  double rho2 = 0.0;  // phi^{-1} on B_rho2(phi(x0)), psi on B_rho2(f(x0))
  double lip_phi = 0.0;
  double lip_phi_inv = 0.0;
  double lip_psi = 0.0;
  double ck_phi = 0.0;
  double ck_psi = 0.0;
  int k = 1;
  double block_inv_norm = 0.0;
  // Pivot order: rows[0..p) and cols[0..p) select the invertible block.
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  Vector fx0;
  Vector phi_x0;
};

// Rank of A with singular values below rel_tol * max(1, sigma_1) discarded.
std::size_t numerical_rank(const Matrix& a, double rel_tol = 1e-8);

// Greedy complete pivoting: p rows and columns whose block is well
// conditioned, followed by the remaining indices in order.
void select_block(const Matrix& j, std::size_t p, std::vector<std::size_t>& rows, std::vector<std::size_t>& cols);

struct RankOptions {
  double rank_tol = 1e-8;
  std::size_t drift_samples = 400;
  unsigned long long seed = 1;
};

// p = 0 means "use the numerical rank of Jf(x0)".
RankCertificate rank_certificate(const JetOracle& f, std::span<const double> x0, std::size_t p,
                                 const CkNormBound& kbound, int k, const RankOptions& options = {});

// phi(x) = (f_rows[0..p)(x), x_cols[p..n)) as an oracle.
class PhiOracle final : public JetOracle {
 public:
  PhiOracle(OraclePtr f, std::vector<std::size_t> rows, std::vector<std::size_t> cols, std::size_t p);
  std::size_t dims_in() const override { return f_->dims_in(); }
  std::size_t dims_out() const override { return f_->dims_in(); }
  int max_order() const override { return f_->max_order(); }
  DerivativeTensor derivative(std::span<const double> x, int order) const override;

 private:
  OraclePtr f_;
  std::vector<std::size_t> rows_, cols_;
  std::size_t p_;
};

class StraighteningCharts {
 public:
  StraighteningCharts(OraclePtr f, RankCertificate cert);

  const RankCertificate& certificate() const { return cert_; }

  Vector phi(std::span<const double> x) const;
  Vector phi_inverse(std::span<const double> z) const;
  Vector psi(std::span<const double> y) const;
  // g = f o phi^{-1}
  Vector g(std::span<const double> z) const;
  // Dg(z) = Df(x) Dphi(x)^{-1} with x = phi^{-1}(z), rows in pivot order.
  Matrix g_jacobian(std::span<const double> z) const;

 private:
  OraclePtr f_;
  RankCertificate cert_;
  std::shared_ptr<PhiOracle> phi_;
  InverseCertificate phi_cert_;
};

struct RankVerifyOptions {
  std::size_t samples = 1000;
  std::size_t pairs = 1000;
  unsigned long long seed = 1;
};

VerificationReport verify_rank(const JetOracle& f, const StraighteningCharts& charts, const RankVerifyOptions& options = {});

}  // namespace singcert
