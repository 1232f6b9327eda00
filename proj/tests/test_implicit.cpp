#include <cmath>

#include "doctest.h"
#include "singcert/catalog.hpp"
#include "singcert/certified_implicit.hpp"
#include "singcert/error.hpp"

using namespace singcert;

namespace {

CkNormBound sampled_bound(const JetOracle& f, const Vector& p, int k, double radius = 1.0) {
  const int density = f.dims_in() <= 2 ? 21 : f.dims_in() == 3 ? 11 : 7;
  return estimate_ck_norm(f, Ball{p, radius}, k, density);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::InvalidArgument;
}

// bisection for the real root of y^3 + y - x
double cubic_root(double x) {
  double lo = -2, hi = 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * mid + mid - x > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("implicit delta formula") {
  CHECK(implicit_delta(0, 1) == doctest::Approx(1 / (2 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK(implicit_delta(1, 1) == doctest::Approx(1 / (2 * std::sqrt(5.0))).epsilon(1e-15));
  for (double K = 0; K < 5; K += 0.25) CHECK(implicit_delta(K + 0.25, 0.7) < implicit_delta(K, 0.7));
  CHECK_THROWS(implicit_delta(1, 0));
}

TEST_CASE("linear graph certificate") {
  const auto F = parse_oracle("x2 - x1", 2);
  const auto c = smooth_implicit_certificate(*F, 1, Vector{0.0}, Vector{0.0}, sampled_bound(*F, {0, 0}, 2), 2);
  CHECK(c.K == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));  // |(-1, 1)|
  // with the spec's K = 1
  const auto c1 = smooth_implicit_certificate(*F, 1, Vector{0.0}, Vector{0.0}, CkNormBound{1.0, 2, Ball{{0, 0}, 1}, true}, 2);
  const double d = 1 / (2 * std::sqrt(5.0));
  CHECK(c1.delta == doctest::Approx(d).epsilon(1e-15));
  CHECK(c1.r == c1.delta);
  CHECK(c1.rho == doctest::Approx(d * d / 4).epsilon(1e-15));
  CHECK(c1.lip_g == doctest::Approx(1 / d).epsilon(1e-15));
  const double x = 0.9 * c1.rho;
  CHECK(solve_implicit(*F, c1, Vector{x}).y[0] == doctest::Approx(x).epsilon(1e-13));
  CHECK(solve_implicit(*F, c1, Vector{0.0}).y[0] == 0.0);
}

TEST_CASE("circle certificate and branch") {
  const auto F = parse_oracle("x1^2 + x2^2 - 1", 2);
  const auto kb = sampled_bound(*F, {0, 1}, 2, 0.5);
  const auto c = smooth_implicit_certificate(*F, 1, Vector{0.0}, Vector{1.0}, kb, 2);
  CHECK(c.partial_inv_norm == 0.5);
  CHECK(c.delta == doctest::Approx(1 / (2 * std::sqrt(1 + (1 + kb.value) * (1 + kb.value) / 4))).epsilon(1e-15));
  const double x = c.rho;
  const auto s = solve_implicit(*F, c, Vector{x});
  CHECK(std::abs(s.y[0] - std::sqrt(1 - x * x)) < 1e-14);
  CHECK(s.path_steps >= 8);
  CHECK(code_of([&] { solve_implicit(*F, c, Vector{0.1}); }) == ErrorCode::OutsideCertifiedBall);
  // x = 0.1 is beyond rho; the bare continuation still follows the branch
  const auto far = continue_implicit(*F, 1, Vector{0.0}, Vector{1.0}, Vector{0.1}, 1.0);
  CHECK(std::abs(far.y[0] - std::sqrt(0.99)) < 1e-12);
  CHECK(std::abs(0.01 + far.y[0] * far.y[0] - 1) <= 1e-12);
}

TEST_CASE("cubic branch against bisection") {
  const auto F = parse_oracle("x2^3 + x2 - x1", 2);
  const auto c = smooth_implicit_certificate(*F, 1, Vector{0.0}, Vector{0.0}, sampled_bound(*F, {0, 0}, 2), 2);
  for (double x : {-c.rho, -0.3 * c.rho, 0.7 * c.rho}) CHECK(std::abs(solve_implicit(*F, c, Vector{x}).y[0] - cubic_root(x)) < 1e-14);
  const auto far = continue_implicit(*F, 1, Vector{0.0}, Vector{0.0}, Vector{0.2}, 1.0);
  CHECK(std::abs(far.y[0] - cubic_root(0.2)) < 1e-13);
  CHECK(std::abs(far.y[0] - 0.1928) < 1e-4);
}

TEST_CASE("trivial zero graph") {
  const auto F = parse_oracle("x2", 2);
  const auto c = smooth_implicit_certificate(*F, 1, Vector{0.0}, Vector{0.0}, sampled_bound(*F, {0, 0}, 2), 2);
  CHECK(c.lip_g == c.K / c.delta);
  CHECK(solve_implicit(*F, c, Vector{c.rho}).y[0] == 0.0);
}

TEST_CASE("implicit refusals") {
  const auto F = parse_oracle("x1^2 + x2^2 - 1", 2);
  const auto kb = sampled_bound(*F, {0, 0.5}, 2);
  CHECK(code_of([&] { smooth_implicit_certificate(*F, 1, Vector{0.0}, Vector{0.5}, kb, 2); }) == ErrorCode::NotOnZeroSet);
  const auto kb2 = sampled_bound(*F, {1, 0}, 2);
  CHECK(code_of([&] { smooth_implicit_certificate(*F, 1, Vector{1.0}, Vector{0.0}, kb2, 2); }) == ErrorCode::SingularPartial);
}

TEST_CASE("lipschitz formula-only certificate") {
  const auto c = lipschitz_implicit_certificate(Vector{0.0}, Vector{0.0}, 2.0, 0.5, 0.1);
  CHECK(c.delta == implicit_delta(2.0, 0.5));
  CHECK(c.rho == 0.1 * c.delta / 6.0);
  CHECK(c.lip_g == 2.0 / c.delta);
  CHECK_FALSE(c.ck_g);
}

TEST_CASE("implicit jets match the circle branch") {
  const auto F = parse_oracle("x1^2 + x2^2 - 1", 2);
  const double x = 0.3, y = std::sqrt(1 - x * x);
  const auto g = implicit_jets(*F, 1, Vector{x}, Vector{y}, 3);
  CHECK(g[0].partial({1}) == doctest::Approx(-x / y).epsilon(1e-13));
  CHECK(g[0].partial({2}) == doctest::Approx(-1 / (y * y * y)).epsilon(1e-12));
  CHECK(g[0].partial({3}) == doctest::Approx(-3 * x / std::pow(y, 5)).epsilon(1e-12));
}

TEST_CASE("catalog implicit certificates pass verification") {
  ImplicitVerifyOptions opt;
  opt.points = 300;
  opt.pairs = 600;
  opt.derivative_points = 30;
  opt.ck_samples = 30;
  for (const auto& e : catalog_of(CatalogKind::Implicit)) {
    CAPTURE(e.name);
    const auto F = oracle_of(e);
    const Vector x0(e.at.begin(), e.at.begin() + e.m), y0(e.at.begin() + e.m, e.at.end());
    const auto c = smooth_implicit_certificate(*F, e.m, x0, y0, sampled_bound(*F, e.at, 2), 2);
    const auto rep = verify_implicit(*F, c, opt);
    for (const auto& chk : rep.checks) {
      CAPTURE(chk.name);
      CAPTURE(chk.worst);
      CHECK(chk.passed);
    }
  }
}
