#include "singcert/certified_implicit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "singcert/error.hpp"
#include "singcert/newton.hpp"
#include "singcert/parallel.hpp"
#include "singcert/spectral.hpp"

namespace singcert {

namespace {

Matrix partial_y(const Matrix& j, std::size_t m) { return j.block(0, m, j.rows(), j.cols() - m); }
Matrix partial_x(const Matrix& j, std::size_t m) { return j.block(0, 0, j.rows(), m); }

}  // namespace

double implicit_delta(double K, double m2_inv_norm) {
  if (!(K >= 0.0)) throw Error(ErrorCode::InvalidArgument, "K must be nonnegative");
  if (!(m2_inv_norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "|M2^{-1}| must be positive");
  return 1.0 / (2.0 * std::sqrt(1.0 + (1.0 + K) * (1.0 + K) * m2_inv_norm * m2_inv_norm));
}

ImplicitCertificate lipschitz_implicit_certificate(std::span<const double> x0, std::span<const double> y0, double K,
                                                   double m2_inv_norm, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "r must be positive");
  ImplicitCertificate c;
  c.x0.assign(x0.begin(), x0.end());
  c.y0.assign(y0.begin(), y0.end());
  c.K = K;
  c.partial_inv_norm = m2_inv_norm;
  c.delta = implicit_delta(K, m2_inv_norm);
  c.r = r;
  c.rho = r * c.delta / (2.0 * (K + 1.0));
  c.lip_g = K / c.delta;
  return c;
}

ImplicitCertificate smooth_implicit_certificate(const JetOracle& F, std::size_t m, std::span<const double> x0,
                                                std::span<const double> y0, const CkNormBound& kbound, int k) {
  const std::size_t n = F.dims_out();
  if (F.dims_in() != m + n || x0.size() != m || y0.size() != n)
    throw Error(ErrorCode::InvalidArgument, "implicit problem needs F : R^m x R^n -> R^n");
  if (k < 1 || kbound.order < k) throw Error(ErrorCode::InvalidArgument, "C^k bound order is below k");
  const Vector p = concat(x0, y0);
  const double resid = norm(F.value(p));
  if (resid > 1e-10) throw Error(ErrorCode::NotOnZeroSet, "|F(x0, y0)| = " + format_double(resid));
  const Matrix dy = partial_y(F.jacobian(p), m);
  const Vector s = singular_values(dy);
  if (s.back() <= 1e-12 * std::max(1.0, s.front())) throw Error(ErrorCode::SingularPartial, "dF/dy(x0, y0) is singular");
  if (!(kbound.value > 0.0)) throw Error(ErrorCode::InvalidArgument, "K must be positive");
  ImplicitCertificate c;
  c.x0.assign(x0.begin(), x0.end());
  c.y0.assign(y0.begin(), y0.end());
  c.K = kbound.value;
  c.k = k;
  c.partial_inv_norm = 1.0 / s.back();
  c.delta = implicit_delta(c.K, c.partial_inv_norm);
  c.r = c.delta / c.K;
  if (!kbound.ball.contains_ball(p, c.r)) throw Error(ErrorCode::DomainTooSmall, "the C^k bound's ball does not contain B_r(x0, y0)");
  c.rho = c.r * c.delta / (2.0 * (c.K + 1.0));
  c.lip_g = c.K / c.delta;
  if (k >= 2) c.ck_g = std::pow(2.0, k - 1) * inverse_bound(c.K, c.K / c.delta, k - 1) * c.K;
  return c;
}

ImplicitSolution continue_implicit(const JetOracle& F, std::size_t m, std::span<const double> x0,
                                   std::span<const double> y0, std::span<const double> x, double guard_radius) {
  if (x.size() != m || x0.size() != m) throw Error(ErrorCode::InvalidArgument, "x dimension mismatch");
  const Vector base = concat(x0, y0);
  for (int steps = 8; steps <= 256; steps *= 2) {
    Vector y(y0.begin(), y0.end());
    bool ok = true;
    double resid = norm(F.value(base));
    for (int j = 1; j <= steps && ok; ++j) {
      const double t = static_cast<double>(j) / steps;
      Vector xt(m);
      for (std::size_t i = 0; i < m; ++i) xt[i] = x0[i] + t * (x[i] - x0[i]);
      NewtonOptions opt;
      opt.tol = 1e-13;
      opt.max_iter = 50;
      const auto res = newton_solve([&](std::span<const double> yy) { return F.value(concat(xt, yy)); },
                                    [&](std::span<const double> yy) { return partial_y(F.jacobian(concat(xt, yy)), m); }, y, opt);
      if (!res.converged) {
        ok = false;
        break;
      }
      y = res.x;
      resid = res.residual;
      if (distance(concat(xt, y), base) > guard_radius * (1.0 + 1e-9)) {
        throw Error(ErrorCode::PathLeftDomain, "continuation path left the guard ball around (x0, y0)");
      }
    }
    if (ok) return {y, steps, resid};
  }
  throw Error(ErrorCode::NoConvergence, "continuation failed with 256 steps");
}

ImplicitSolution solve_implicit(const JetOracle& F, const ImplicitCertificate& cert, std::span<const double> x) {
  if (x.size() != cert.x0.size()) throw Error(ErrorCode::InvalidArgument, "x dimension mismatch");
  if (distance(x, cert.x0) > cert.rho * (1.0 + 1e-12)) throw Error(ErrorCode::OutsideCertifiedBall, "x lies outside B_rho(x0)");
  return continue_implicit(F, cert.x0.size(), cert.x0, cert.y0, x, cert.r);
}

Matrix implicit_derivative(const JetOracle& F, std::size_t m, std::span<const double> x, std::span<const double> y) {
  const Matrix j = F.jacobian(concat(x, y));
  const Matrix dyinv = inverse(partial_y(j, m));
  return -1.0 * (dyinv * partial_x(j, m));
}

std::vector<TaylorJet> implicit_jets(const JetOracle& F, std::size_t m, std::span<const double> x,
                                     std::span<const double> y, int order) {
  const std::size_t n = y.size();
  const auto space = JetSpace::get(m, order);
  const Vector p = concat(x, y);
  const Matrix ainv = inverse(partial_y(F.jacobian(p), m));
  std::vector<TaylorJet> h;
  for (std::size_t i = 0; i < m; ++i) h.push_back(TaylorJet::variable(space, i, 0.0));
  for (std::size_t i = 0; i < n; ++i) h.emplace_back(space, 0.0);
  // H <- H - A^{-1} F(x + dx, y + H), one order per pass
  for (int pass = 0; pass <= order; ++pass) {
    const auto fx = taylor_compose(F, p, h);
    for (std::size_t i = 0; i < n; ++i) {
      TaylorJet acc = h[m + i];
      for (std::size_t j = 0; j < n; ++j) acc -= fx[j] * ainv(i, j);
      acc.coefficient(0) = 0.0;
      h[m + i] = std::move(acc);
    }
  }
  std::vector<TaylorJet> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back(h[m + i] + y[i]);
  return g;
}

VerificationReport verify_implicit(const JetOracle& F, const ImplicitCertificate& cert, const ImplicitVerifyOptions& options) {
  VerificationReport report;
  const std::size_t m = cert.x0.size();
  std::mt19937_64 rng(options.seed);
  const Ball dom{cert.x0, cert.rho};

  const auto points = ball_samples(dom, options.points, rng());
  std::vector<Vector> gy(points.size());
  std::vector<double> resid(points.size(), INFINITY);
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      const auto s = solve_implicit(F, cert, points[i]);
      gy[i] = s.y;
      resid[i] = norm(F.value(concat(points[i], s.y)));
    } catch (const Error&) {
    }
  });
  {
    auto c = start_check("residual", 1e-10);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (resid[i] >= c.worst) {
        c.worst = resid[i];
        c.witness = points[i];
      }
    }
    c.samples = points.size();
    c.passed = c.worst <= c.threshold;
    report.checks.push_back(std::move(c));
  }
  {
    // consecutive sample pairs plus close pairs around each sample
    auto c = start_check("lipschitz_g", cert.lip_g * (1.0 + 1e-9));
    std::vector<double> ratio(options.pairs, 0.0);
    std::vector<Vector> where(options.pairs);
    const auto near = ball_samples(Ball{Vector(m, 0.0), 1.0}, options.pairs, rng());
    parallel_for(options.pairs, [&](std::size_t i) {
      const std::size_t a = i % points.size();
      if (!std::isfinite(resid[a])) {
        ratio[i] = INFINITY;
        return;
      }
      Vector xb;
      Vector yb;
      if (i % 2 == 0) {
        const std::size_t b = (a + 1 + i / points.size()) % points.size();
        if (b == a || !std::isfinite(resid[b])) return;
        xb = points[b];
        yb = gy[b];
      } else {
        xb = points[a];
        for (std::size_t j = 0; j < m; ++j) xb[j] += near[i][j] * cert.rho * 1e-3;
        if (distance(xb, cert.x0) > cert.rho) return;
        try {
          yb = solve_implicit(F, cert, xb).y;
        } catch (const Error&) {
          ratio[i] = INFINITY;
          return;
        }
      }
      const double dx = distance(points[a], xb);
      if (dx > 0) ratio[i] = distance(gy[a], yb) / dx;
      where[i] = points[a];
    });
    for (std::size_t i = 0; i < options.pairs; ++i) {
      if (ratio[i] >= c.worst) {
        c.worst = ratio[i];
        c.witness = where[i];
      }
    }
    c.samples = options.pairs;
    c.passed = c.worst <= c.threshold;
    report.checks.push_back(std::move(c));
  }
  {
    // interior points so the difference stencil stays inside B_rho
    auto c = start_check("derivative_formula", 1e-6);
    const auto xs = ball_samples(Ball{cert.x0, 0.9 * cert.rho}, options.derivative_points, rng());
    std::vector<double> err(xs.size(), INFINITY);
    parallel_for(xs.size(), [&](std::size_t i) {
      try {
        const Vector& x = xs[i];
        const Matrix formula = implicit_derivative(F, m, x, solve_implicit(F, cert, x).y);
        const double h = 1e-5 * cert.rho;
        Matrix fd(formula.rows(), m);
        for (std::size_t j = 0; j < m; ++j) {
          Vector xp = x, xm = x;
          xp[j] += h;
          xm[j] -= h;
          const Vector yp = solve_implicit(F, cert, xp).y, ym = solve_implicit(F, cert, xm).y;
          for (std::size_t r = 0; r < fd.rows(); ++r) fd(r, j) = (yp[r] - ym[r]) / (2 * h);
        }
        err[i] = (fd - formula).max_abs() / std::max(1.0, formula.max_abs());
      } catch (const Error&) {
      }
    });
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (err[i] >= c.worst) {
        c.worst = err[i];
        c.witness = xs[i];
      }
    }
    c.samples = xs.size();
    c.passed = c.worst <= c.threshold;
    report.checks.push_back(std::move(c));
  }
  if (options.check_ck && cert.ck_g) {
    auto c = start_check("ck_g", *cert.ck_g);
    const std::size_t count = std::min(options.ck_samples, points.size());
    std::vector<double> val(count, INFINITY);
    const int order = std::min(cert.k, F.max_order());
    parallel_for(count, [&](std::size_t i) {
      if (!std::isfinite(resid[i])) return;
      const auto g = implicit_jets(F, m, points[i], gy[i], order);
      double b = 0.0;
      for (int p = 1; p <= order; ++p) b = std::max(b, tensor_norm_bound(tensor_from_jets(g, p)));
      val[i] = b;
    });
    for (std::size_t i = 0; i < count; ++i) {
      if (val[i] >= c.worst) {
        c.worst = val[i];
        c.witness = points[i];
      }
    }
    c.samples = count;
    c.passed = c.worst <= c.threshold;
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace singcert
