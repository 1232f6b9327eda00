#include "singcert/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "singcert/certified_implicit.hpp"
#include "singcert/error.hpp"
#include "singcert/newton.hpp"
#include "singcert/quadrature.hpp"
#include "singcert/spectral.hpp"

namespace singcert {

namespace {

const GaussRule& rule12() {
  static const GaussRule rule = gauss_legendre(12);
  return rule;
}

// z = (y, x) -> df/dx(x, y), for the implicit solve of Step 1.
class PartialGradientOracle final : public JetOracle {
 public:
  PartialGradientOracle(OraclePtr f, std::size_t p) : f_(std::move(f)), p_(p), n_(f_->dims_in()) {
    const std::size_t q = n_ - p_;
    perm_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i < q ? p_ + i : i - q;
  }
  std::size_t dims_in() const override { return n_; }
  std::size_t dims_out() const override { return p_; }
  int max_order() const override { return f_->max_order() - 1; }
  std::string describe() const override { return "dx(" + f_->describe() + ")"; }

  DerivativeTensor derivative(std::span<const double> z, int order) const override {
    Vector w(n_);
    for (std::size_t i = 0; i < n_; ++i) w[perm_[i]] = z[i];
    const DerivativeTensor t = f_->derivative(w, order + 1);
    DerivativeTensor out(p_, n_, order);
    std::vector<std::size_t> digits(order);
    for (std::size_t flat = 0; flat < out.slice_size(); ++flat) {
      std::size_t rest = flat;
      for (int d = order - 1; d >= 0; --d) {
        digits[d] = rest % n_;
        rest /= n_;
      }
      for (std::size_t a = 0; a < p_; ++a) {
        std::size_t ff = a;
        for (int d = 0; d < order; ++d) ff = ff * n_ + perm_[digits[d]];
        out.at(a, flat) = t.at(0, ff);
      }
    }
    return out;
  }

 private:
  OraclePtr f_;
  std::size_t p_, n_;
  std::vector<std::size_t> perm_;
};

Matrix sym_product(const Matrix& q0, const Matrix& b) { return q0.transpose() * b * q0; }

Matrix reconstruct(const Matrix& q, std::span<const double> signs) {
  return q.transpose() * Matrix::diagonal(signs) * q;
}

Vector matrix_entries(const Matrix& a) { return a.data(); }

}  // namespace

double diag_delta(double kbar, std::size_t n) {
  if (kbar < 0 || n < 1) throw Error(ErrorCode::InvalidArgument, "diag_delta needs Kbar >= 0 and n >= 1");
  const double nn = static_cast<double>(n);
  return 1.0 / (4.0 * (kbar + 1) * (kbar + 2) * (1 + (kbar + 2) * (kbar + 2)) * nn * (nn + 1));
}

double diag_dq_bound(double kbar, std::size_t n) {
  const double nn = static_cast<double>(n);
  return (kbar + 1) * (1 + (kbar + 2) * nn * (nn + 1));
}

double diag_dq_bound_squared(double kbar, std::size_t n) {
  const double nn = static_cast<double>(n);
  return (kbar + 1) * (1 + (kbar + 2) * (kbar + 2) * nn * (nn + 1));
}

double diag_ck_bound(double kbar, std::size_t n, int k) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "diag_ck_bound needs k >= 2");
  return std::pow(2.0, k - 1) * (kbar + 1) * inverse_bound(kbar + 1, diag_dq_bound(kbar, n), k - 1);
}

Matrix signed_cholesky(const Matrix& b, std::span<const double> signs) {
  const std::size_t n = b.rows();
  if (!b.is_square() || signs.size() != n) throw Error(ErrorCode::InvalidArgument, "signed_cholesky dimension mismatch");
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = b(i, i);
    for (std::size_t m = 0; m < i; ++m) d -= signs[m] * q(m, i) * q(m, i);
    d *= signs[i];
    if (!(d > 0.0)) throw Error(ErrorCode::SignBreakdown, "pivot " + std::to_string(i) + " has the wrong sign");
    q(i, i) = std::sqrt(d);
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = b(i, j);
      for (std::size_t m = 0; m < i; ++m) s -= signs[m] * q(m, i) * q(m, j);
      q(i, j) = signs[i] * s / q(i, i);
    }
  }
  return q;
}

Matrix signed_cholesky_derivative(const Matrix& q, std::span<const double> signs, const Matrix& bdot) {
  // Q^T D0 Qdot + Qdot^T D0 Q = Bdot; with W = Qdot Q^{-1} upper triangular,
  // D0 W is the upper part of Q^{-T} Bdot Q^{-1} with halved diagonal.
  const std::size_t n = q.rows();
  const Matrix qi = inverse(q);
  const Matrix c = qi.transpose() * bdot * qi;
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) w(i, j) = signs[i] * (i == j ? 0.5 * c(i, j) : c(i, j));
  return w * q;
}

TriangularFamily::TriangularFamily(OraclePtr family, std::size_t n, Vector base, Vector signs, double kbar, int k)
    : family_(std::move(family)), n_(n), base_(std::move(base)), signs_(std::move(signs)), kbar_(kbar), k_(k),
      delta_(diag_delta(kbar, n)) {}

Matrix TriangularFamily::bbar(std::span<const double> x) const { return Matrix(n_, n_, family_->value(x)); }

Matrix TriangularFamily::q(std::span<const double> x) const { return signed_cholesky(bbar(x), signs_); }

std::vector<Matrix> TriangularFamily::dq(std::span<const double> x) const {
  const Matrix q0 = q(x);
  const Matrix j = family_->jacobian(x);
  std::vector<Matrix> out;
  for (std::size_t c = 0; c < j.cols(); ++c) {
    Matrix bdot(n_, n_);
    for (std::size_t e = 0; e < n_ * n_; ++e) bdot.data()[e] = j(e, c);
    out.push_back(signed_cholesky_derivative(q0, signs_, bdot));
  }
  return out;
}

TriangularFamily diagonalize_family(OraclePtr family, std::size_t n, double kbar, int k, Vector base) {
  if (family->dims_out() != n * n) throw Error(ErrorCode::InvalidArgument, "family must have n*n outputs");
  if (base.empty()) base.assign(family->dims_in(), 0.0);
  if (!(kbar >= 0)) throw Error(ErrorCode::InvalidArgument, "Kbar must be nonnegative");
  const Matrix b(n, n, family->value(base));
  Vector signs(n);
  double defect = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    signs[i] = b(i, i) >= 0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j) defect = std::max(defect, std::abs(b(i, j) - (i == j ? signs[i] : 0.0)));
  }
  if (defect > 1e-10) throw Error(ErrorCode::NotDiagonalAtOrigin, "Bbar(base) is not diag(+-1): defect " + format_double(defect));
  return TriangularFamily(std::move(family), n, std::move(base), std::move(signs), kbar, k);
}

VerificationReport verify_family(const TriangularFamily& fam, const FamilyVerifyOptions& options) {
  VerificationReport report;
  const Ball ball{fam.base(), fam.delta_diag()};
  const auto xs = ball_samples(ball, options.samples, options.seed);
  const std::size_t n = fam.size();
  report.checks.push_back(max_norm_check("reconstruction", 1e-10, xs, [&](std::span<const double> x) {
    return matrix_entries(reconstruct(fam.q(x), fam.signs()) - fam.bbar(x));
  }));
  {
    auto c = start_check("triangular", 0.0);
    for (const auto& x : xs) {
      const Matrix q = fam.q(x);
      for (std::size_t i = 0; i < n; ++i) {
        if (!(q(i, i) > 0)) c.worst = INFINITY;
        for (std::size_t j = 0; j < i; ++j) c.worst = std::max(c.worst, std::abs(q(i, j)));
      }
    }
    c.samples = xs.size();
    c.passed = c.worst <= c.threshold;
    report.checks.push_back(c);
  }
  report.checks.push_back(max_norm_check("q_at_base", 1e-12, {fam.base()}, [&](std::span<const double> x) {
    return matrix_entries(fam.q(x) - Matrix::identity(n));
  }));
  // central differences, |DQ| as the operator norm of R^d -> (n x n, Frobenius)
  const double h = 1e-6;
  auto dq = max_norm_check("dq_bound", diag_dq_bound(fam.kbar(), n) * (1 + 1e-6), xs, [&](std::span<const double> x) {
    const std::size_t d = x.size();
    Matrix jac(n * n, d);
    Vector xp(x.begin(), x.end()), xm = xp;
    for (std::size_t c = 0; c < d; ++c) {
      xp[c] += h;
      xm[c] -= h;
      const Matrix diff = (fam.q(xp) - fam.q(xm)) * (0.5 / h);
      for (std::size_t e = 0; e < n * n; ++e) jac(e, c) = diff.data()[e];
      xp[c] = xm[c] = x[c];
    }
    return Vector{operator_norm(jac)};
  });
  dq.note = "proof variant (Kbar+2)^2: " + format_double(diag_dq_bound_squared(fam.kbar(), n));
  report.checks.push_back(dq);
  return report;
}

double splitting_delta(double K, double sigma_p, std::size_t p) {
  if (!(sigma_p > 0)) throw Error(ErrorCode::InvalidArgument, "sigma_p must be positive");
  if (sigma_p > K) throw Error(ErrorCode::InvalidArgument, "sigma_p exceeds K");
  const double pp = static_cast<double>(p * p + p + 1);
  const double m = std::min({1.0, 2 * sigma_p * sigma_p / (3 * pp), std::pow(sigma_p, 1.5) / (2 * pp)});
  return std::pow(sigma_p, 2.5) / (32 * std::pow(K + 1, 4.5)) * m;
}

double splitting_dphi_bound(double K, double sigma_p) { return 32 * std::pow(K + 1, 5) / std::pow(sigma_p, 2.5); }

double splitting_ck_bound(double K, double sigma_p, std::size_t p, int k) {
  if (k < 3) throw Error(ErrorCode::InvalidArgument, "splitting needs k >= 3");
  const double dp = implicit_delta(K, 1.0 / sigma_p);
  const double delta1 = dp * dp / (2 * K * (K + 1));
  const double m1 = std::pow(2.0, k - 2) * inverse_bound(K, K / delta1, k - 2) * K;
  const double m2 = 1 + m1;
  const double m3 = diag_ck_bound(K / sigma_p, p, k - 1);
  const double m4 = std::pow(2.0, k - 1) * m3 * std::sqrt(K) + 1;
  return compose_bound(inverse_bound(m4, 2 * std::sqrt((1 + sigma_p) / sigma_p), k - 1), m2, k - 1);
}

SplitRadii split_radii(double K, double sigma_p, std::size_t p) {
  SplitRadii s;
  s.theorem = splitting_delta(K, sigma_p, p);
  const double dp = implicit_delta(K, 1.0 / sigma_p);
  s.implicit_r = dp / K;
  s.delta1 = s.implicit_r * dp / (2 * (K + 1));
  s.kbar = K / sigma_p;
  const double pp = static_cast<double>(p * (p + 1));
  const double spread = (s.kbar + 1) * (1 + (s.kbar + 2) * (s.kbar + 2) * pp);
  s.delta2 = std::min(s.delta1, 1.0 / (4 * (s.kbar + 2) * spread));
  s.delta3 = 0.5 * std::sqrt(sigma_p / (1 + sigma_p));
  s.r3 = s.delta3 / (2 * spread * std::sqrt(K));
  s.internal = std::min(s.delta2, s.r3) * s.delta3 / 2;
  s.chart = std::min(s.theorem, s.internal);
  return s;
}

SplitChart::SplitChart(OraclePtr f, SplitCertificate cert) : f_(std::move(f)), cert_(std::move(cert)) {
  rotated_ = std::make_shared<LinearPullbackOracle>(f_, cert_.x0, cert_.rotation);
  gradient_ = std::make_shared<PartialGradientOracle>(rotated_, cert_.p);
  const std::size_t p = cert_.p;
  const Vector zp(p, 0.0), zq(cert_.n - p, 0.0);
  const Matrix b0 = family_at(zp, zq, zp, nullptr, false).b;
  const auto sig = signature_diagonalize(b0);
  cert_.q0 = sig.q0;
  cert_.signs = sig.signs;
  q0_inv_ = inverse(cert_.q0);
}

SplitChart::Family SplitChart::family_at(std::span<const double> x, std::span<const double> y,
                                         std::span<const double> gy, const Matrix* dg, bool derivative) const {
  const std::size_t p = cert_.p, n = cert_.n, q = n - p;
  const GaussRule& rule = rule12();
  Family fam{Matrix(p, p), {}};
  if (derivative) fam.db.assign(n, Matrix(p, p));
  Vector w(n);
  for (std::size_t j = 0; j < q; ++j) w[p + j] = y[j];
  for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
    const double t = rule.nodes[a];
    for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
      const double s = rule.nodes[b];
      const double wt = rule.weights[a] * rule.weights[b] * t;
      for (std::size_t i = 0; i < p; ++i) w[i] = s * t * x[i] + gy[i];
      const Matrix h = rotated_->hessian(w);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) fam.b(i, j) += wt * h(i, j);
      if (!derivative) continue;
      const DerivativeTensor t3 = rotated_->derivative(w, 3);
      auto third = [&](std::size_t i, std::size_t j, std::size_t l) { return t3.at(0, (i * n + j) * n + l); };
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
          for (std::size_t c = 0; c < p; ++c) fam.db[c](i, j) += wt * s * t * third(i, j, c);
          for (std::size_t l = 0; l < q; ++l) {
            double v = third(i, j, p + l);
            for (std::size_t m = 0; m < p; ++m) v += third(i, j, m) * (*dg)(m, l);
            fam.db[p + l](i, j) += wt * v;
          }
        }
      }
    }
  }
  if (!fam.b.all_finite()) throw Error(ErrorCode::QuadratureFailure, "non-finite Hessian in the quadrature");
  for (const auto& m : fam.db)
    if (!m.all_finite()) throw Error(ErrorCode::QuadratureFailure, "non-finite third derivative in the quadrature");
  return fam;
}

Vector SplitChart::g(std::span<const double> y) const {
  const std::size_t p = cert_.p, q = cert_.n - p;
  if (q == 0) return Vector(p, 0.0);
  return continue_implicit(*gradient_, q, Vector(q, 0.0), Vector(p, 0.0), y, cert_.implicit_r).y;
}

Matrix SplitChart::dg_at(std::span<const double> gy, std::span<const double> y) const {
  const std::size_t p = cert_.p, q = cert_.n - p;
  if (q == 0) return Matrix(p, 0);
  const Matrix h = rotated_->hessian(concat(gy, y));
  return inverse(h.block(0, 0, p, p)) * h.block(0, p, p, q) * -1.0;
}

Matrix SplitChart::b(std::span<const double> w) const {
  const std::size_t p = cert_.p;
  const auto y = w.subspan(p);
  return family_at(w.first(p), y, g(y), nullptr, false).b;
}

Matrix SplitChart::bbar(std::span<const double> w) const { return sym_product(cert_.q0, b(w)); }

Matrix SplitChart::q(std::span<const double> w) const { return signed_cholesky(bbar(w), cert_.signs); }

double SplitChart::f2(std::span<const double> w) const {
  const std::size_t p = cert_.p;
  const auto y = w.subspan(p);
  const Vector gy = g(y);
  Vector shifted(w.begin(), w.end());
  for (std::size_t i = 0; i < p; ++i) shifted[i] += gy[i];
  return rotated_->value(shifted)[0] - rotated_->value(concat(gy, y))[0];
}

Matrix SplitChart::dphi2(std::span<const double> x, std::span<const double> y) const {
  const std::size_t p = cert_.p, n = cert_.n;
  const Vector gy = g(y);
  const Matrix dg = dg_at(gy, y);
  const Family fam = family_at(x, y, gy, &dg, true);
  const Matrix qm = signed_cholesky(sym_product(cert_.q0, fam.b), cert_.signs);
  const Vector v = q0_inv_.apply(x);
  Matrix out = Matrix::identity(n);
  const Matrix lead = qm * q0_inv_;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) out(i, j) = lead(i, j);
  for (std::size_t c = 0; c < n; ++c) {
    const Matrix dq = signed_cholesky_derivative(qm, cert_.signs, sym_product(cert_.q0, fam.db[c]));
    const Vector col = dq.apply(v);
    for (std::size_t i = 0; i < p; ++i) out(i, c) += col[i];
  }
  return out;
}

Vector SplitChart::phi2_inverse(std::span<const double> w) const {
  const std::size_t p = cert_.p;
  const auto u = w.first(p);
  const auto y = w.subspan(p);
  const Vector gy = g(y);
  const Matrix dg = dg_at(gy, y);
  auto residual = [&](std::span<const double> x) {
    const Matrix qm = signed_cholesky(sym_product(cert_.q0, family_at(x, y, gy, nullptr, false).b), cert_.signs);
    return subtract(qm.apply(q0_inv_.apply(x)), u);
  };
  auto jacobian = [&](std::span<const double> x) {
    const Family fam = family_at(x, y, gy, &dg, true);
    const Matrix qm = signed_cholesky(sym_product(cert_.q0, fam.b), cert_.signs);
    const Vector v = q0_inv_.apply(x);
    Matrix jac = qm * q0_inv_;
    for (std::size_t c = 0; c < p; ++c) {
      const Vector col = signed_cholesky_derivative(qm, cert_.signs, sym_product(cert_.q0, fam.db[c])).apply(v);
      for (std::size_t i = 0; i < p; ++i) jac(i, c) += col[i];
    }
    return jac;
  };
  NewtonOptions opt;
  opt.tol = 1e-15;
  opt.max_iter = 50;
  opt.domain = Ball{Vector(p, 0.0), cert_.delta1};
  const NewtonResult res = newton_solve(residual, jacobian, cert_.q0.apply(u), opt);
  if (!res.converged) throw Error(ErrorCode::NoConvergence, "phi2 inversion did not converge");
  Vector out(w.begin(), w.end());
  std::copy(res.x.begin(), res.x.end(), out.begin());
  return out;
}

Vector SplitChart::phi(std::span<const double> w) const {
  if (norm(w) > cert_.delta * (1 + 1e-12)) throw Error(ErrorCode::OutsideCertifiedBall, "point lies outside B_delta");
  const std::size_t p = cert_.p;
  Vector xy = phi2_inverse(w);
  const Vector gy = g(w.subspan(p));
  for (std::size_t i = 0; i < p; ++i) xy[i] += gy[i];
  return add(cert_.x0, cert_.rotation.apply(xy));
}

Matrix SplitChart::dphi(std::span<const double> w) const {
  const std::size_t p = cert_.p, n = cert_.n;
  const Vector xy = phi2_inverse(w);
  const auto y = w.subspan(p);
  const Matrix d2 = dphi2(std::span<const double>(xy).first(p), y);
  Matrix d1 = Matrix::identity(n);
  const Matrix dg = dg_at(g(y), y);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t l = 0; l < n - p; ++l) d1(i, p + l) = dg(i, l);
  return cert_.rotation * d1 * inverse(d2);
}

double SplitChart::alpha(std::span<const double> y) const {
  return rotated_->value(concat(g(y), y))[0] - cert_.fx0;
}

Vector SplitChart::alpha_gradient(std::span<const double> y) const {
  const std::size_t p = cert_.p;
  const Vector grad = rotated_->jacobian(concat(g(y), y)).row(0);
  return Vector(grad.begin() + p, grad.end());
}

double SplitChart::normal_form(std::span<const double> w) const {
  double v = cert_.fx0;
  for (std::size_t i = 0; i < cert_.p; ++i) v += cert_.signs[i] * w[i] * w[i];
  return v + alpha(w.subspan(cert_.p));
}

SplitChart build_split_chart(OraclePtr f, std::span<const double> x0, const CkNormBound& kbound, int k,
                             const SplitOptions& options) {
  const std::size_t n = f->dims_in();
  if (f->dims_out() != 1) throw Error(ErrorCode::InvalidArgument, "splitting needs a scalar function");
  if (x0.size() != n) throw Error(ErrorCode::InvalidArgument, "x0 dimension mismatch");
  if (k < 3) throw Error(ErrorCode::InvalidArgument, "splitting needs k >= 3");
  if (kbound.order < k) throw Error(ErrorCode::InvalidArgument, "C^k bound order is below k");
  if (f->max_order() < 3) throw Error(ErrorCode::InvalidArgument, "oracle must provide third derivatives");
  const double grad = norm(f->jacobian(x0).row(0));
  if (grad > options.critical_tol) throw Error(ErrorCode::NotCritical, "|Df(x0)| = " + format_double(grad));

  Matrix h = f->hessian(x0);
  h = (h + h.transpose()) * 0.5;
  const SymmetricEigen eig = symmetric_eigen(h);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(eig.values[a]) > std::abs(eig.values[b]); });
  const double sigma1 = std::abs(eig.values[order[0]]);
  std::size_t p = 0;
  while (p < n && std::abs(eig.values[order[p]]) > options.rank_tol * sigma1 && sigma1 > 0) ++p;
  if (p == 0) throw Error(ErrorCode::DegenerateBeyondRank, "the Hessian vanishes at x0");

  SplitCertificate c;
  c.x0.assign(x0.begin(), x0.end());
  c.n = n;
  c.p = p;
  c.k = k;
  c.K = kbound.value;
  c.sigma_p = std::abs(eig.values[order[p - 1]]);
  c.rotation = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector v = eig.vectors.column(order[j]);
    std::size_t big = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[big]) + 1e-14) big = i;
    const double s = v[big] < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) c.rotation(i, j) = s * v[i];
  }

  const SplitRadii radii = split_radii(c.K, c.sigma_p, p);
  if (!kbound.ball.contains_ball(x0, radii.implicit_r)) {
    throw Error(ErrorCode::DomainTooSmall, "the C^k bound's ball does not contain B_r(x0)");
  }
  c.delta_theorem = radii.theorem;
  c.delta_internal = radii.internal;
  c.delta = radii.chart;
  c.implicit_r = radii.implicit_r;
  c.delta1 = radii.delta1;
  c.delta2 = radii.delta2;
  c.delta3 = radii.delta3;
  c.r3 = radii.r3;
  c.kbar = radii.kbar;
  c.dphi_bound = splitting_dphi_bound(c.K, c.sigma_p);
  c.ck_phi_bound = splitting_ck_bound(c.K, c.sigma_p, p, k);
  c.fx0 = f->value(x0)[0];
  return SplitChart(std::move(f), std::move(c));
}

double normal_form_residual(const JetOracle& f, const SplitChart& chart, std::size_t samples, unsigned long long seed,
                            double radius_fraction) {
  const auto& c = chart.certificate();
  const auto ws = ball_samples(Ball{Vector(c.n, 0.0), c.delta * radius_fraction}, samples, seed);
  const auto chk = max_norm_check("normal_form", 0.0, ws, [&](std::span<const double> w) {
    return Vector{f.value(chart.phi(w))[0] - chart.normal_form(w)};
  });
  return chk.worst;
}

VerificationReport verify_split(const JetOracle& f, const SplitChart& chart, const SplitVerifyOptions& options) {
  VerificationReport report;
  const auto& c = chart.certificate();
  const std::size_t p = c.p, q = c.n - c.p;
  const auto ws = ball_samples(Ball{Vector(c.n, 0.0), c.delta}, options.samples, options.seed);

  report.checks.push_back(max_norm_check("normal_form", 1e-9, ws, [&](std::span<const double> w) {
    return Vector{f.value(chart.phi(w))[0] - chart.normal_form(w)};
  }));

  {
    auto chk = start_check("alpha_jet", 1e-8);
    if (q > 0) {
      const Vector zero(q, 0.0);
      const double h = std::min(1e-5, c.delta1 / 4);
      Matrix hess(q, q);
      Vector yp = zero, ym = zero;
      for (std::size_t l = 0; l < q; ++l) {
        yp[l] = h;
        ym[l] = -h;
        const Vector col = subtract(chart.alpha_gradient(yp), chart.alpha_gradient(ym));
        for (std::size_t i = 0; i < q; ++i) hess(i, l) = col[i] / (2 * h);
        yp[l] = ym[l] = 0.0;
      }
      chk.worst = std::max({std::abs(chart.alpha(zero)), norm(chart.alpha_gradient(zero)), hess.frobenius_norm()});
      chk.witness = zero;
      chk.samples = 2 * q + 2;
    }
    chk.passed = chk.worst <= chk.threshold;
    report.checks.push_back(chk);
  }

  report.checks.push_back(max_norm_check("dphi_bound", c.dphi_bound, ws, [&](std::span<const double> w) {
    return Vector{operator_norm(chart.dphi(w))};
  }));
  report.checks.push_back(max_norm_check("reconstruction", 1e-10, ws, [&](std::span<const double> w) {
    return matrix_entries(reconstruct(chart.q(w), c.signs) - chart.bbar(w));
  }));
  report.checks.push_back(max_norm_check("quadratic_identity", 1e-10, ws, [&](std::span<const double> w) {
    const Matrix bm = chart.b(w);
    const auto x = w.first(p);
    return Vector{dot(x, bm.apply(x)) - chart.f2(w)};
  }));
  return report;
}

}  // namespace singcert
