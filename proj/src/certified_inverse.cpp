#include "singcert/certified_inverse.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "singcert/error.hpp"
#include "singcert/parallel.hpp"
#include "singcert/spectral.hpp"

namespace singcert {

InverseRadii inverse_radii(double K, double delta, double r) {
  if (!(K > 0.0) || !(delta > 0.0) || !(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "K, delta and r must be positive");
  return {r * delta / (2.0 * K), r * delta / 2.0, 1.0 / delta};
}

InverseCertificate smooth_inverse_certificate(const JetOracle& f, std::span<const double> x0,
                                              const CkNormBound& kbound, int k, const InverseOptions& options) {
  if (f.dims_in() != f.dims_out()) throw Error(ErrorCode::InvalidArgument, "inverse certificate needs a square map");
  if (x0.size() != f.dims_in()) throw Error(ErrorCode::InvalidArgument, "x0 dimension mismatch");
  if (k < 1 || kbound.order < k) throw Error(ErrorCode::InvalidArgument, "C^k bound order is below k");
  const Vector s = singular_values(f.jacobian(x0));
  const double sigma_n = s.back();
  if (sigma_n <= options.singular_tol * std::max(1.0, s.front())) {
    throw Error(ErrorCode::SingularJacobian, "Df(x0) is singular (sigma_n = " + format_double(sigma_n) + ")");
  }
  if (!(kbound.value > 0.0)) throw Error(ErrorCode::InvalidArgument, "K must be positive");
  InverseCertificate c;
  c.x0.assign(x0.begin(), x0.end());
  c.fx0 = f.value(x0);
  c.K = kbound.value;
  c.k = k;
  c.delta = sigma_n / 2.0;
  if (options.delta) {
    if (!(*options.delta > 0.0) || *options.delta > c.delta)
      throw Error(ErrorCode::InvalidArgument, "a user delta must lie in (0, sigma_n(Df(x0))/2]");
    c.delta = *options.delta;
  }
  c.r = c.delta / c.K;
  if (!kbound.ball.contains_ball(x0, c.r)) {
    throw Error(ErrorCode::DomainTooSmall, "the C^k bound's ball does not contain B_r(x0)");
  }
  const InverseRadii radii = inverse_radii(c.K, c.delta, c.r);
  c.rho1 = radii.rho1;
  c.rho2 = radii.rho2;
  c.lip_inverse = radii.lip_inverse;
  if (k >= 2) {
    c.ck_inverse = inverse_bound(c.K, 1.0 / c.delta, k);
    const double alt = inverse_bound_from_one(c.K, 1.0 / c.delta, k);
    if (alt != *c.ck_inverse) c.ck_inverse_from_one = alt;
  }
  return c;
}

NewtonResult evaluate_inverse(const JetOracle& f, const InverseCertificate& cert, std::span<const double> y,
                              bool strict_domain) {
  if (distance(y, cert.fx0) > cert.rho2 * (1.0 + 1e-12)) {
    throw Error(ErrorCode::OutsideCertifiedBall, "target lies outside B_rho2(f(x0))");
  }
  NewtonOptions opt;
  opt.tol = 1e-12 * (1.0 + norm(y));
  // f has modulus delta on B_r(x0), so the preimage lies within |y - f(x0)| / delta <= r/2
  opt.domain = Ball{cert.x0, cert.r};
  const Vector target(y.begin(), y.end());
  NewtonResult res = newton_solve([&](std::span<const double> x) { return subtract(f.value(x), target); },
                                  [&](std::span<const double> x) { return f.jacobian(x); }, cert.x0, opt);
  if (!res.converged) throw Error(ErrorCode::NoConvergence, "Newton did not converge for the inverse");
  if (strict_domain && res.clamped_steps > 0) throw Error(ErrorCode::StepLeftDomain, "a Newton iterate left B_r(x0)");
  const double reach = distance(y, cert.fx0) / cert.delta;
  if (distance(res.x, cert.x0) > reach * (1.0 + 1e-9) + 1e-15) {
    throw Error(ErrorCode::StepLeftDomain, "preimage farther from x0 than |y - f(x0)|/delta");
  }
  return res;
}

std::vector<TaylorJet> inverse_jets(const JetOracle& f, std::span<const double> x, std::span<const double> y, int order) {
  const std::size_t n = x.size();
  const auto space = JetSpace::get(n, order);
  const Matrix a = f.jacobian(x);
  const Matrix ainv = inverse(a);
  // G = x + H, fixed point H <- H + A^{-1}(Y - f(x + H)); one order per pass
  std::vector<TaylorJet> target = seed_jets(y, order);
  std::vector<TaylorJet> h(n, TaylorJet(space, 0.0));
  for (int pass = 0; pass <= order; ++pass) {
    const auto fx = taylor_compose(f, x, h);
    std::vector<TaylorJet> r(n, TaylorJet(space, 0.0));
    for (std::size_t i = 0; i < n; ++i) r[i] = target[i] - fx[i];
    for (std::size_t i = 0; i < n; ++i) {
      TaylorJet acc = h[i];
      for (std::size_t j = 0; j < n; ++j) acc += r[j] * ainv(i, j);
      h[i] = std::move(acc);
    }
    for (auto& hi : h) hi.coefficient(0) = 0.0;  // keep the base point at x
  }
  std::vector<TaylorJet> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back(h[i] + x[i]);
  return g;
}

VerificationReport verify_inverse(const JetOracle& f, const InverseCertificate& cert, const InverseVerifyOptions& options) {
  VerificationReport report;
  const std::size_t n = cert.x0.size();
  std::mt19937_64 rng(options.seed);

  {
    // half the pairs are independent, half are close pairs probing the local modulus
    auto c = start_check("injectivity_modulus");
    c.threshold = cert.delta * (1.0 - 1e-9);
    c.lower_bound = true;
    c.worst = INFINITY;
    const auto base = ball_samples(Ball{cert.x0, cert.rho1}, options.pairs, rng());
    const auto other = ball_samples(Ball{cert.x0, cert.rho1}, options.pairs, rng());
    std::vector<double> ratio(options.pairs, INFINITY);
    std::vector<Vector> partner(options.pairs);
    for (std::size_t i = 0; i < options.pairs; ++i) {
      if (i % 2 == 0) {
        partner[i] = other[i];
      } else {
        Vector d = subtract(other[i], cert.x0);
        const double len = norm(d);
        partner[i] = base[i];
        if (len > 0)
          for (std::size_t j = 0; j < n; ++j) partner[i][j] += d[j] / len * cert.rho1 * 1e-3;
        if (distance(partner[i], cert.x0) > cert.rho1) partner[i] = other[i];
      }
    }
    parallel_for(options.pairs, [&](std::size_t i) {
      const double dx = distance(base[i], partner[i]);
      if (dx == 0.0) return;
      ratio[i] = distance(f.value(base[i]), f.value(partner[i])) / dx;
    });
    for (std::size_t i = 0; i < options.pairs; ++i) {
      if (ratio[i] < c.worst) {
        c.worst = ratio[i];
        c.witness = base[i];
      }
    }
    c.samples = options.pairs;
    c.passed = c.worst >= c.threshold;
    report.checks.push_back(std::move(c));
  }

  {
    auto c = start_check("surjectivity");
    c.threshold = 1e-10;
    const auto targets = ball_samples(Ball{cert.fx0, cert.rho2}, options.targets, rng());
    std::vector<double> resid(targets.size(), INFINITY);
    std::vector<int> ok(targets.size(), 0);
    parallel_for(targets.size(), [&](std::size_t i) {
      try {
        const NewtonResult r = evaluate_inverse(f, cert, targets[i]);
        resid[i] = distance(f.value(r.x), targets[i]);
        ok[i] = 1;
      } catch (const Error&) {
      }
    });
    std::size_t failures = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (!ok[i]) ++failures;
      if (!ok[i] || resid[i] > c.worst) {
        if (resid[i] >= c.worst) c.witness = targets[i];
        c.worst = std::max(c.worst, resid[i]);
      }
    }
    c.samples = targets.size();
    c.passed = failures == 0 && c.worst <= c.threshold;
    if (failures) c.note = std::to_string(failures) + " targets failed to converge or left the modulus ball";
    report.checks.push_back(std::move(c));
  }

  {
    auto c = start_check("derivative_variation");
    c.threshold = cert.delta * (1.0 + 1e-9);
    const Matrix j0 = f.jacobian(cert.x0);
    auto points = ball_samples(Ball{cert.x0, cert.r}, options.variation_samples, rng());
    // include points on the sphere where the variation is usually largest
    for (std::size_t i = 0; i < std::min<std::size_t>(points.size(), 400); ++i) {
      Vector d = subtract(points[i], cert.x0);
      const double len = norm(d);
      if (len > 0)
        for (std::size_t j = 0; j < n; ++j) points[i][j] = cert.x0[j] + d[j] / len * cert.r;
    }
    std::vector<double> var(points.size());
    parallel_for(points.size(), [&](std::size_t i) { var[i] = operator_norm(f.jacobian(points[i]) - j0); });
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (var[i] >= c.worst) {
        c.worst = var[i];
        c.witness = points[i];
      }
    }
    c.samples = points.size();
    c.passed = c.worst <= c.threshold;
    report.checks.push_back(std::move(c));
  }

  if (options.check_ck && cert.ck_inverse) {
    auto c = start_check("ck_inverse");
    c.threshold = *cert.ck_inverse;
    const int order = std::min(cert.k, f.max_order());
    const auto targets = ball_samples(Ball{cert.fx0, cert.rho2}, options.ck_samples, rng());
    std::vector<double> val(targets.size(), 0.0);
    parallel_for(targets.size(), [&](std::size_t i) {
      try {
        const NewtonResult r = evaluate_inverse(f, cert, targets[i]);
        const auto g = inverse_jets(f, r.x, targets[i], order);
        double best = 0.0;
        for (int p = 1; p <= order; ++p) best = std::max(best, tensor_norm_bound(tensor_from_jets(g, p)));
        val[i] = best;
      } catch (const Error&) {
        val[i] = INFINITY;
      }
    });
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (val[i] >= c.worst) {
        c.worst = val[i];
        c.witness = targets[i];
      }
    }
    c.samples = targets.size();
    c.passed = c.worst <= c.threshold;
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace singcert
