#include <cmath>
#include <random>

#include "doctest.h"
#include "singcert/catalog.hpp"
#include "singcert/error.hpp"
#include "singcert/quadrature.hpp"
#include "singcert/splitting.hpp"

using namespace singcert;

namespace {

CkNormBound sampled_bound(const JetOracle& f, const Vector& p, int k, double radius = 1.0) {
  const int density = f.dims_in() <= 2 ? 21 : 11;
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

// x sqrt(1 + x) = u near 0, by bisection
double square_cubic_chart(double u) {
  double lo = -0.5, hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::sqrt(1 + mid) > u ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("gauss legendre rule on [0,1]") {
  const auto r = gauss_legendre(12);
  double sum = 0, m23 = 0;
  for (std::size_t i = 0; i < 12; ++i) {
    sum += r.weights[i];
    m23 += r.weights[i] * std::pow(r.nodes[i], 23);
    CHECK(r.nodes[i] + r.nodes[11 - i] == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m23 == doctest::Approx(1.0 / 24).epsilon(1e-14));
  const auto one = gauss_legendre(1);
  CHECK(one.nodes[0] == doctest::Approx(0.5));
  CHECK(one.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("diagonalization radius") {
  CHECK(diag_delta(0, 1) == doctest::Approx(1.0 / 80).epsilon(1e-15));
  CHECK(diag_delta(1, 2) == doctest::Approx(1.0 / 1440).epsilon(1e-15));
  for (double kb = 0; kb < 4; kb += 0.5)
    for (std::size_t n = 1; n < 6; ++n) {
      CHECK(diag_delta(kb + 0.5, n) < diag_delta(kb, n));
      CHECK(diag_delta(kb, n + 1) < diag_delta(kb, n));
    }
  CHECK(diag_dq_bound(1, 2) == 2 * (1 + 3 * 6));
  CHECK(diag_dq_bound_squared(1, 2) == 2 * (1 + 9 * 6));
}

TEST_CASE("signed cholesky examples") {
  for (double x : {-0.3, 0.0, 0.01, 0.4}) {
    const Matrix q = signed_cholesky(Matrix{{1 + x}}, Vector{1.0});
    CHECK(q(0, 0) == doctest::Approx(std::sqrt(1 + x)).epsilon(1e-15));
  }
  const double x = diag_delta(1, 2) / 2;
  const Matrix b{{1 + x, x}, {x, -1 + x}};
  const Vector s{1.0, -1.0};
  const Matrix q = signed_cholesky(b, s);
  CHECK(q(0, 0) == doctest::Approx(std::sqrt(1 + x)).epsilon(1e-15));
  CHECK(q(0, 1) == doctest::Approx(x / std::sqrt(1 + x)).epsilon(1e-15));
  CHECK(q(1, 0) == 0.0);
  CHECK(q(1, 1) == doctest::Approx(std::sqrt(1 - x + x * x / (1 + x))).epsilon(1e-15));
  CHECK((q.transpose() * Matrix::diagonal(s) * q - b).max_abs() <= 1e-12);
  CHECK(code_of([] { signed_cholesky(Matrix{{-1.0}}, Vector{1.0}); }) == ErrorCode::SignBreakdown);
}

TEST_CASE("signed cholesky derivative matches differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  const Vector s{1, -1, 1, -1};
  Matrix b = Matrix::diagonal(s), bdot(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i; j < 4; ++j) {
      const double e = u(rng), d = u(rng);
      b(i, j) += e;
      b(j, i) = b(i, j);
      bdot(i, j) = bdot(j, i) = d;
    }
  const Matrix q = signed_cholesky(b, s);
  const double h = 1e-6;
  const Matrix fd = (signed_cholesky(b + bdot * h, s) - signed_cholesky(b - bdot * h, s)) * (0.5 / h);
  CHECK((signed_cholesky_derivative(q, s, bdot) - fd).max_abs() < 1e-8);
}

TEST_CASE("constant and affine families") {
  const auto c = diagonalize_family(parse_oracle("1; 0; 0; -1", 2), 2, 0.0, 2);
  CHECK(c.signs() == Vector{1, -1});
  CHECK((c.q(Vector{0.3, 0.1}) - Matrix::identity(2)).max_abs() == 0.0);
  const auto f = diagonalize_family(parse_oracle("1 + x1; x1; x1; -1 + x1", 1), 2, 1.0, 2);
  CHECK(f.delta_diag() == diag_delta(1.0, 2));
  const auto rep = verify_family(f);
  for (const auto& chk : rep.checks) {
    CAPTURE(chk.name);
    CAPTURE(chk.worst);
    CHECK(chk.passed);
  }
  CHECK(code_of([] { diagonalize_family(parse_oracle("2; 0; 0; 1", 1), 2, 1.0, 2); }) == ErrorCode::NotDiagonalAtOrigin);
}

TEST_CASE("splitting radius") {
  CHECK(splitting_delta(1, 1, 1) == doctest::Approx(1 / (192 * std::pow(2.0, 4.5))).epsilon(1e-14));
  CHECK(std::abs(splitting_delta(1, 1, 1) - 2.3018e-4) < 1e-8);
  CHECK(splitting_delta(2, 1, 1) < splitting_delta(1, 1, 1));
  CHECK(splitting_delta(1, 1, 2) < splitting_delta(1, 1, 1));
  CHECK(code_of([] { splitting_delta(1, 2, 1); }) == ErrorCode::InvalidArgument);
  CHECK(splitting_dphi_bound(1, 1) == 32 * 32);
  CHECK(std::isfinite(splitting_ck_bound(2, 1, 1, 3)));
  CHECK(splitting_ck_bound(2, 1, 1, 4) >= splitting_ck_bound(2, 1, 1, 3));
}

TEST_CASE("closed-form radius can exceed the construction radius") {
  // K = 2, sigma = 2, p = 1: delta2 = 1/456 dominates
  const auto f = parse_oracle("x1^2", 1);
  const auto ch = build_split_chart(f, Vector{0.0}, CkNormBound{2.0, 3, Ball{{0.0}, 1.0}, true}, 3);
  const auto& c = ch.certificate();
  CHECK(c.delta2 == doctest::Approx(1.0 / 456).epsilon(1e-14));
  CHECK(c.delta_theorem > c.delta_internal);
  CHECK(c.delta == c.delta_internal);
}

TEST_CASE("square is already normal") {
  const auto f = parse_oracle("x1^2", 1);
  const auto ch = build_split_chart(f, Vector{0.0}, sampled_bound(*f, {0}, 3), 3);
  const auto& c = ch.certificate();
  CHECK(c.p == 1);
  CHECK(c.signs == Vector{1.0});
  for (double u : {-c.delta, 0.3 * c.delta, c.delta}) {
    const double x = ch.phi(Vector{u})[0];
    CHECK(std::abs(x * x - u * u) <= 1e-18);
  }
}

TEST_CASE("fold: g vanishes and alpha is the cubic") {
  const auto f = parse_oracle("x1^2 + x2^3", 2);
  const auto ch = build_split_chart(f, Vector{0, 0}, sampled_bound(*f, {0, 0}, 3), 3);
  const auto& c = ch.certificate();
  CHECK(c.p == 1);
  CHECK(c.signs == Vector{1.0});
  CHECK(ch.g(Vector{0.01})[0] == 0.0);
  CHECK(ch.alpha(Vector{0.01}) == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(ch.alpha(Vector{0.0}) == 0.0);
  const Vector w{0.4 * c.delta, -0.5 * c.delta};
  CHECK(std::abs(f->value(ch.phi(w))[0] - ch.normal_form(w)) < 1e-15);
}

TEST_CASE("morse chart of x^2 + x^3 against the closed form") {
  const auto f = parse_oracle("x1^2 + x1^3", 1);
  const auto ch = build_split_chart(f, Vector{0.0}, sampled_bound(*f, {0}, 3), 3);
  const auto& c = ch.certificate();
  CHECK(c.delta == std::min(c.delta_theorem, c.delta_internal));
  for (double t : {-1.0, -0.5, 0.2, 0.9}) {
    const double u = t * c.delta;
    CHECK(std::abs(ch.phi(Vector{u})[0] - square_cubic_chart(u)) < 1e-15);
  }
  CHECK(normal_form_residual(*f, ch, 200) <= 1e-9);
  CHECK(normal_form_residual(*f, ch, 200, 1, 0.1) <= std::max(normal_form_residual(*f, ch, 200), 1e-15));
}

TEST_CASE("splitting refusals") {
  const auto lin = parse_oracle("x1 + x1^2", 1);
  CHECK(code_of([&] { build_split_chart(lin, Vector{0.0}, sampled_bound(*lin, {0}, 3), 3); }) == ErrorCode::NotCritical);
  const auto cube = parse_oracle("x1^3", 1);
  CHECK(code_of([&] { build_split_chart(cube, Vector{0.0}, sampled_bound(*cube, {0}, 3), 3); }) == ErrorCode::DegenerateBeyondRank);
  const auto sq = parse_oracle("x1^2", 1);
  CHECK(code_of([&] { build_split_chart(sq, Vector{0.0}, sampled_bound(*sq, {0}, 2), 3); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { build_split_chart(sq, Vector{0.0}, CkNormBound{2.0, 3, Ball{{0.0}, 1e-4}, true}, 3); }) == ErrorCode::DomainTooSmall);
  const auto ch = build_split_chart(sq, Vector{0.0}, sampled_bound(*sq, {0}, 3), 3);
  CHECK(code_of([&] { ch.phi(Vector{1.0}); }) == ErrorCode::OutsideCertifiedBall);
}

TEST_CASE("catalog splitting charts pass verification") {
  SplitVerifyOptions opt;
  opt.samples = 60;
  for (const auto& e : catalog_of(CatalogKind::Split)) {
    CAPTURE(e.name);
    const auto f = oracle_of(e);
    const auto ch = build_split_chart(f, e.at, sampled_bound(*f, e.at, 3), 3);
    const auto& c = ch.certificate();
    CAPTURE(c.delta);
    CAPTURE(c.delta_internal);
    CHECK(c.delta == std::min(c.delta_theorem, c.delta_internal));
    CHECK(c.delta_theorem == splitting_delta(c.K, c.sigma_p, c.p));
    const auto rep = verify_split(*f, ch, opt);
    for (const auto& chk : rep.checks) {
      CAPTURE(chk.name);
      CAPTURE(chk.worst);
      CHECK(chk.passed);
    }
  }
}
