#include "singcert/ck_norm.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "singcert/error.hpp"
#include "singcert/parallel.hpp"

namespace singcert {

bool Ball::contains(std::span<const double> x, double slack) const {
  return distance(x, center) <= radius * (1.0 + slack);
}

bool Ball::contains_ball(std::span<const double> c, double r) const {
  return distance(c, center) + r <= radius * (1.0 + 1e-12);
}

CkNormBound CkNormBound::shrink(double new_radius) const {
  if (!(new_radius > 0.0) || new_radius > ball.radius) throw Error(ErrorCode::InvalidArgument, "shrink needs a radius in (0, current]");
  CkNormBound out = *this;
  out.ball.radius = new_radius;
  return out;
}

std::vector<Vector> ball_grid(const Ball& ball, int density) {
  if (density < 2) throw Error(ErrorCode::InvalidArgument, "grid density must be at least 2");
  const std::size_t n = ball.center.size();
  std::vector<Vector> out;
  out.push_back(ball.center);
  std::vector<int> idx(n, 0);
  const double h = 2.0 * ball.radius / (density - 1);
  Vector p(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) p[i] = ball.center[i] - ball.radius + h * idx[i];
    if (distance(p, ball.center) <= ball.radius * (1.0 + 1e-12)) out.push_back(p);
    std::size_t i = 0;
    while (i < n && ++idx[i] == density) idx[i++] = 0;
    if (i == n) break;
  }
  return out;
}

std::vector<Vector> ball_samples(const Ball& ball, std::size_t count, unsigned long long seed) {
  const std::size_t n = ball.center.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif;
  std::vector<Vector> out;
  out.reserve(count);
  Vector dir(n);
  for (std::size_t s = 0; s < count; ++s) {
    double len = 0.0;
    do {
      for (double& v : dir) v = gauss(rng);
      len = norm(dir);
    } while (len == 0.0);
    const double rad = ball.radius * std::pow(unif(rng), 1.0 / static_cast<double>(n));
    Vector p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = ball.center[i] + rad * dir[i] / len;
    out.push_back(std::move(p));
  }
  return out;
}

double sampled_ck_norm(const JetOracle& f, const std::vector<Vector>& points, int k, bool include_value) {
  if (k < 1 || k > f.max_order()) throw Error(ErrorCode::InvalidArgument, "order k out of the oracle's range");
  std::vector<double> best(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t i) {
    double b = include_value ? norm(f.value(points[i])) : 0.0;
    for (int p = 1; p <= k; ++p) b = std::max(b, tensor_norm_bound(f.derivative(points[i], p)));
    best[i] = b;
  });
  double out = 0.0;
  for (double b : best) out = std::max(out, b);
  return out;
}

CkNormBound estimate_ck_norm(const JetOracle& f, const Ball& ball, int k, int grid_density) {
  if (ball.center.size() != f.dims_in()) throw Error(ErrorCode::InvalidArgument, "ball dimension mismatch");
  if (!(ball.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be positive");
  CkNormBound out;
  out.value = sampled_ck_norm(f, ball_grid(ball, grid_density), k);
  out.order = k;
  out.ball = ball;
  out.certified = false;
  return out;
}

double compose_bound(double kf, double kg, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "compose_bound needs k >= 1");
  double s = 0.0;
  for (int i = 1; i <= k; ++i) s += std::pow(static_cast<double>(i), k);
  return s * kg * std::max(kf, std::pow(kf, k));
}

namespace {

double inverse_recurrence(double K, double L, int k, int first_p) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "inverse_bound needs k >= 1");
  if (k == 1) return L;
  double factorial = 1.0, mx = 0.0;
  for (int p = 0; p <= k - 1; ++p) {
    if (p > 0) factorial *= p;
    if (p >= first_p) mx = std::max(mx, factorial * std::pow(L, p + 1));
  }
  const double m0 = compose_bound(K, mx, k - 1);
  double mp = L;
  for (int p = 2; p <= k; ++p) mp = compose_bound(mp, m0, p - 1);
  return mp;
}

}  // namespace

double inverse_bound(double K, double L, int k) { return inverse_recurrence(K, L, k, 0); }

double inverse_bound_from_one(double K, double L, int k) { return inverse_recurrence(K, L, k, 1); }

}  // namespace singcert
