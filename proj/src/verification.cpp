#include "singcert/verification.hpp"

#include <algorithm>

#include "singcert/error.hpp"

namespace singcert {

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

const PropertyCheck& VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(ErrorCode::InvalidArgument, "no check named " + name);
}

}  // namespace singcert

#include <cmath>

#include "singcert/parallel.hpp"

namespace singcert {

PropertyCheck lipschitz_check(std::string name, double bound, const Ball& ball, std::size_t pairs,
                              unsigned long long seed, const PointMap& map) {
  auto c = start_check(std::move(name), bound * (1.0 + 1e-9));
  const std::size_t n = ball.center.size();
  const auto a = ball_samples(ball, pairs, seed);
  const auto b = ball_samples(ball, pairs, seed + 0x9e3779b97f4a7c15ULL);
  std::vector<double> ratio(pairs, 0.0);
  parallel_for(pairs, [&](std::size_t i) {
    Vector other = b[i];
    if (i % 2 == 1) {
      Vector d = subtract(b[i], ball.center);
      const double len = norm(d);
      other = a[i];
      if (len > 0)
        for (std::size_t j = 0; j < n; ++j) other[j] += d[j] / len * ball.radius * 1e-3;
      if (!ball.contains(other)) other = b[i];
    }
    const double dx = distance(a[i], other);
    if (dx == 0.0) return;
    try {
      ratio[i] = distance(map(a[i]), map(other)) / dx;
    } catch (const std::exception&) {
      ratio[i] = INFINITY;
    }
  });
  for (std::size_t i = 0; i < pairs; ++i) {
    if (ratio[i] >= c.worst) {
      c.worst = ratio[i];
      c.witness = a[i];
    }
  }
  c.samples = pairs;
  c.passed = c.worst <= c.threshold;
  return c;
}

PropertyCheck max_norm_check(std::string name, double threshold, const std::vector<Vector>& points, const PointMap& map) {
  auto c = start_check(std::move(name), threshold);
  std::vector<double> val(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      const Vector v = map(points[i]);
      double worst = 0.0;
      for (double x : v) worst = std::max(worst, std::abs(x));
      val[i] = std::isnan(worst) ? INFINITY : worst;
    } catch (const std::exception&) {
      val[i] = INFINITY;
    }
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (val[i] >= c.worst) {
      c.worst = val[i];
      c.witness = points[i];
    }
  }
  c.samples = points.size();
  c.passed = c.worst <= c.threshold;
  return c;
}

}  // namespace singcert
