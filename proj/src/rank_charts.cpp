#include "singcert/rank_charts.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "singcert/certified_implicit.hpp"
#include "singcert/error.hpp"
#include "singcert/parallel.hpp"
#include "singcert/spectral.hpp"

namespace singcert {

std::size_t numerical_rank(const Matrix& a, double rel_tol) {
  const Vector s = singular_values(a);
  if (s.empty()) return 0;
  const double cut = rel_tol * std::max(1.0, s.front());
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [cut](double v) { return v > cut; }));
}

void select_block(const Matrix& j, std::size_t p, std::vector<std::size_t>& rows, std::vector<std::size_t>& cols) {
  const std::size_t m = j.rows(), n = j.cols();
  Matrix a = j;
  std::vector<bool> row_used(m, false), col_used(n, false);
  rows.clear();
  cols.clear();
  for (std::size_t step = 0; step < p; ++step) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (row_used[i]) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (col_used[c]) continue;
        if (std::abs(a(i, c)) > best) {
          best = std::abs(a(i, c));
          bi = i;
          bj = c;
        }
      }
    }
    row_used[bi] = col_used[bj] = true;
    rows.push_back(bi);
    cols.push_back(bj);
    if (a(bi, bj) == 0.0) continue;
    for (std::size_t i = 0; i < m; ++i) {
      if (row_used[i]) continue;
      const double factor = a(i, bj) / a(bi, bj);
      for (std::size_t c = 0; c < n; ++c) a(i, c) -= factor * a(bi, c);
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    if (!row_used[i]) rows.push_back(i);
  for (std::size_t c = 0; c < n; ++c)
    if (!col_used[c]) cols.push_back(c);
}

RankCertificate rank_certificate(const JetOracle& f, std::span<const double> x0, std::size_t p,
                                 const CkNormBound& kbound, int k, const RankOptions& options) {
  const std::size_t n = f.dims_in(), m = f.dims_out();
  if (x0.size() != n) throw Error(ErrorCode::InvalidArgument, "x0 dimension mismatch");
  if (k < 1 || kbound.order < k) throw Error(ErrorCode::InvalidArgument, "C^k bound order is below k");
  const Matrix j = f.jacobian(x0);
  const std::size_t rank0 = numerical_rank(j, options.rank_tol);
  if (p == 0) p = rank0;
  if (p == 0) throw Error(ErrorCode::SingularLeadingBlock, "Jf(x0) has rank 0");
  if (p > std::min(m, n)) throw Error(ErrorCode::InvalidArgument, "rank exceeds min(m, n)");
  if (rank0 > p) throw Error(ErrorCode::RankDrift, "Jf(x0) has rank " + std::to_string(rank0) + " > p");

  RankCertificate c;
  c.x0.assign(x0.begin(), x0.end());
  c.p = p;
  c.k = k;
  select_block(j, p, c.rows, c.cols);
  Matrix m1(p, p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) m1(a, b) = j(c.rows[a], c.cols[b]);
  const Vector s = singular_values(m1);
  if (s.back() <= 1e-12 * std::max(1.0, operator_norm(j))) {
    throw Error(ErrorCode::SingularLeadingBlock, "no invertible p x p block in Jf(x0)");
  }
  if (!(kbound.value > 0.0)) throw Error(ErrorCode::InvalidArgument, "K must be positive");
  c.K = kbound.value;
  c.block_inv_norm = 1.0 / s.back();
  c.delta = implicit_delta(c.K, c.block_inv_norm);
  c.r = c.delta / c.K;
  if (!kbound.ball.contains_ball(x0, c.r)) throw Error(ErrorCode::DomainTooSmall, "the C^k bound's ball does not contain B_r(x0)");
  c.rho1 = c.r * c.delta / (2.0 * (c.K + 1.0));
  c.rho2 = c.r * c.delta / 2.0;
  c.lip_phi = c.K + 1.0;
  c.lip_phi_inv = 1.0 / c.delta;
  c.lip_psi = 1.0 + c.K / c.delta;
  c.ck_phi = c.K + 1.0;
  c.ck_psi = compose_bound(inverse_bound(c.K + 1.0, 1.0 / c.delta, k), c.K, k) + 1.0;
  c.fx0 = f.value(x0);
  c.phi_x0.resize(n);
  for (std::size_t i = 0; i < n; ++i) c.phi_x0[i] = i < p ? c.fx0[c.rows[i]] : x0[c.cols[i]];

  // constant rank on B_r(x0), sampled
  auto pts = ball_samples(Ball{c.x0, c.r}, options.drift_samples, options.seed);
  std::vector<std::size_t> ranks(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { ranks[i] = numerical_rank(f.jacobian(pts[i]), options.rank_tol); });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (ranks[i] != p) {
      std::string where;
      for (double v : pts[i]) where += (where.empty() ? "" : ",") + format_double(v);
      throw Error(ErrorCode::RankDrift, "Jf has rank " + std::to_string(ranks[i]) + " at (" + where + ")");
    }
  }
  return c;
}

PhiOracle::PhiOracle(OraclePtr f, std::vector<std::size_t> rows, std::vector<std::size_t> cols, std::size_t p)
    : f_(std::move(f)), rows_(std::move(rows)), cols_(std::move(cols)), p_(p) {}

DerivativeTensor PhiOracle::derivative(std::span<const double> x, int order) const {
  const std::size_t n = dims_in();
  const DerivativeTensor t = f_->derivative(x, order);
  DerivativeTensor out(n, n, order);
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t flat = 0; flat < out.slice_size(); ++flat) out.at(i, flat) = t.at(rows_[i], flat);
  for (std::size_t i = p_; i < n; ++i) {
    if (order == 0) out.at(i, 0) = x[cols_[i]];
    if (order == 1) out.at(i, cols_[i]) = 1.0;
  }
  return out;
}

StraighteningCharts::StraighteningCharts(OraclePtr f, RankCertificate cert) : f_(std::move(f)), cert_(std::move(cert)) {
  phi_ = std::make_shared<PhiOracle>(f_, cert_.rows, cert_.cols, cert_.p);
  phi_cert_.x0 = cert_.x0;
  phi_cert_.K = cert_.K + 1.0;
  phi_cert_.delta = cert_.delta;
  phi_cert_.r = cert_.r;
  phi_cert_.rho1 = cert_.rho1;
  phi_cert_.rho2 = cert_.rho2;
  phi_cert_.lip_inverse = 1.0 / cert_.delta;
  phi_cert_.k = cert_.k;
  phi_cert_.fx0 = cert_.phi_x0;
}

Vector StraighteningCharts::phi(std::span<const double> x) const {
  if (distance(x, cert_.x0) > cert_.rho1 * (1.0 + 1e-12)) throw Error(ErrorCode::OutsideCertifiedBall, "x lies outside B_rho1(x0)");
  return phi_->value(x);
}

Vector StraighteningCharts::phi_inverse(std::span<const double> z) const {
  return evaluate_inverse(*phi_, phi_cert_, z).x;
}

Vector StraighteningCharts::g(std::span<const double> z) const {
  const Vector fx = f_->value(phi_inverse(z));
  Vector out(fx.size());
  for (std::size_t i = 0; i < fx.size(); ++i) out[i] = fx[cert_.rows[i]];
  return out;
}

Vector StraighteningCharts::psi(std::span<const double> y) const {
  if (distance(y, cert_.fx0) > cert_.rho2 * (1.0 + 1e-12)) throw Error(ErrorCode::OutsideCertifiedBall, "y lies outside B_rho2(f(x0))");
  const std::size_t p = cert_.p, n = cert_.x0.size(), m = y.size();
  Vector out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = y[cert_.rows[i]];
  if (p == m) return out;
  Vector w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = i < p ? y[cert_.rows[i]] : cert_.x0[cert_.cols[i]];
  const Vector gw = g(w);
  for (std::size_t i = p; i < m; ++i) out[i] -= gw[i];
  return out;
}

Matrix StraighteningCharts::g_jacobian(std::span<const double> z) const {
  const Vector x = phi_inverse(z);
  const Matrix df = f_->jacobian(x);
  Matrix dfp(df.rows(), df.cols());
  for (std::size_t i = 0; i < df.rows(); ++i)
    for (std::size_t j = 0; j < df.cols(); ++j) dfp(i, j) = df(cert_.rows[i], j);
  return dfp * inverse(phi_->jacobian(x));
}

VerificationReport verify_rank(const JetOracle& f, const StraighteningCharts& charts, const RankVerifyOptions& options) {
  VerificationReport report;
  const RankCertificate& c = charts.certificate();
  const std::size_t p = c.p;
  std::mt19937_64 rng(options.seed);
  // psi needs f(phi^{-1}(z)) within rho2 of f(x0); |f(phi^{-1} z) - f(x0)| <= K |z - phi(x0)| / delta
  const Ball zball{c.phi_x0, std::min(c.rho2, c.rho2 * c.delta / c.K)};
  const auto zs = ball_samples(zball, options.samples, rng());

  report.checks.push_back(max_norm_check("normal_form", 1e-9, zs, [&](std::span<const double> z) {
    const Vector y = charts.psi(f.value(charts.phi_inverse(z)));
    Vector d(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) d[i] = y[i] - (i < p ? z[i] : 0.0);
    return d;
  }));
  const auto xs = ball_samples(Ball{c.x0, c.rho1}, options.samples, rng());
  report.checks.push_back(max_norm_check("phi_roundtrip", 1e-10, xs, [&](std::span<const double> x) {
    return subtract(charts.phi_inverse(charts.phi(x)), x);
  }));
  report.checks.push_back(max_norm_check("vanishing_block", 1e-8, zs, [&](std::span<const double> z) {
    const Matrix dg = charts.g_jacobian(z);
    Vector block;
    for (std::size_t i = p; i < dg.rows(); ++i)
      for (std::size_t j = p; j < dg.cols(); ++j) block.push_back(dg(i, j));
    return block;
  }));
  report.checks.push_back(lipschitz_check("lipschitz_phi", c.lip_phi, Ball{c.x0, c.rho1}, options.pairs, rng(),
                                          [&](std::span<const double> x) { return charts.phi(x); }));
  report.checks.push_back(lipschitz_check("lipschitz_phi_inverse", c.lip_phi_inv, Ball{c.phi_x0, c.rho2}, options.pairs, rng(),
                                          [&](std::span<const double> z) { return charts.phi_inverse(z); }));
  report.checks.push_back(lipschitz_check("lipschitz_psi", c.lip_psi, Ball{c.fx0, c.rho2}, options.pairs, rng(),
                                          [&](std::span<const double> y) { return charts.psi(y); }));
  return report;
}

}  // namespace singcert
