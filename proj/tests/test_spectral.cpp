#include <cmath>
#include <random>

#include "doctest.h"
#include "singcert/error.hpp"
#include "singcert/spectral.hpp"

using namespace singcert;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t m, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(m, n);
  for (double& v : a.data()) v = u(rng);
  return a;
}

Matrix random_symmetric(std::mt19937_64& rng, std::size_t n) {
  Matrix a = random_matrix(rng, n, n);
  return 0.5 * (a + a.transpose());
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

}  // namespace

TEST_CASE("singular values of small matrices") {
  auto s = singular_values(Matrix::identity(3));
  REQUIRE(s.size() == 3);
  for (double v : s) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  s = singular_values(Matrix{{3, 0}, {0, -4}});
  CHECK(s[0] == doctest::Approx(4.0));
  CHECK(s[1] == doctest::Approx(3.0));

  const double phi = (1 + std::sqrt(5.0)) / 2;
  s = singular_values(Matrix{{1, 1}, {0, 1}});
  CHECK(std::abs(s[0] - phi) < 1e-14);
  CHECK(std::abs(s[1] - 1 / phi) < 1e-14);

  s = singular_values(Matrix{{1, 2, 3}});
  REQUIRE(s.size() == 1);
  CHECK(s[0] == doctest::Approx(std::sqrt(14.0)));
}

TEST_CASE("singular values of the inverse are reversed reciprocals") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const Matrix a = random_matrix(rng, n, n);
    const auto s = singular_values(a);
    const auto si = singular_values(inverse(a));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(si[i] * s[n - 1 - i] - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("operator norm realises the maximal stretch") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const Matrix a = random_matrix(rng, 4, 3);
  const double s1 = operator_norm(a);
  double best = 0.0;
  for (int i = 0; i < 20000; ++i) {
    Vector x{g(rng), g(rng), g(rng)};
    const double nx = norm(x);
    best = std::max(best, norm(a.apply(x)) / nx);
  }
  CHECK(best <= s1 * (1 + 1e-12));
  CHECK(best >= s1 * 0.99);
}

TEST_CASE("distance to singular matrices") {
  CHECK(distance_to_singular(Matrix::identity(2)) == doctest::Approx(1.0));
  CHECK(distance_to_singular(Matrix{{2, 0}, {0, 0.1}}) == doctest::Approx(0.1));
  CHECK(distance_to_singular(Matrix{{1, 2}, {2, 4}}) < 1e-15);

  // Monte-Carlo Eckart-Young: rank-deficient S = A - (A v) v^T for unit v
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const Matrix a = random_matrix(rng, 4, 4);
  const double d = distance_to_singular(a);
  CHECK(d == doctest::Approx(1.0 / operator_norm(inverse(a))).epsilon(1e-10));
  // 2000 uniform directions, then a shrinking random walk around the best one
  auto gap = [&](const Vector& v) {
    const Vector av = a.apply(v);
    Matrix s = a;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) s(r, c) -= av[r] * v[c];
    return operator_norm(a - s);
  };
  double best = 1e300;
  Vector best_v;
  for (int i = 0; i < 10000; ++i) {
    Vector v{g(rng), g(rng), g(rng), g(rng)};
    if (i >= 2000) {
      const double step = 0.5 * std::pow(1e-4, (i - 2000) / 8000.0);
      for (std::size_t j = 0; j < 4; ++j) v[j] = best_v[j] + step * v[j];
    }
    v = scale(v, 1.0 / norm(v));
    const double e = gap(v);
    if (e < best) {
      best = e;
      best_v = v;
    }
  }
  CHECK(best >= d * (1 - 1e-12));
  CHECK(best <= d * 1.05);
}

TEST_CASE("eigenvalues lie between the extreme singular values") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const Matrix a = random_symmetric(rng, n);
    const auto eig = symmetric_eigen(a);
    const auto s = singular_values(a);
    for (double lambda : eig.values) {
      CHECK(std::abs(lambda) <= s.front() * (1 + 1e-12));
      CHECK(std::abs(lambda) >= s.back() * (1 - 1e-10) - 1e-14);
    }
    Matrix recon = eig.vectors * Matrix::diagonal(eig.values) * eig.vectors.transpose();
    CHECK(max_abs_diff(recon, a) < 1e-12);
  }
}

TEST_CASE("signature diagonalization") {
  auto f = signature_diagonalize(Matrix{{4, 0}, {0, -9}});
  CHECK(f.q0(0, 0) == doctest::Approx(0.5));
  CHECK(f.q0(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(f.q0(0, 1)) < 1e-15);
  CHECK(f.signs == Vector{1, -1});

  f = signature_diagonalize(Matrix::identity(3));
  CHECK(max_abs_diff(f.q0.transpose() * f.q0, Matrix::identity(3)) < 1e-15);
  CHECK(f.signs == Vector{1, 1, 1});

  const Matrix a{{2, 1}, {1, 2}};
  f = signature_diagonalize(a);
  CHECK(f.signs == Vector{1, 1});
  CHECK(max_abs_diff(f.q0.transpose() * a * f.q0, Matrix::identity(2)) < 1e-12);
  const double q = operator_norm(f.q0);
  CHECK(q * q == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(signature_diagonalize(Matrix{{1, 0}, {0, 0}}), Error);
  try {
    signature_diagonalize(Matrix{{1, 0}, {0, 1e-14}});
    FAIL("expected NearSingular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NearSingular);
  }
}

TEST_CASE("signature diagonalization on random nondegenerate matrices") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const Matrix a = random_symmetric(rng, n);
    const auto f = signature_diagonalize(a);
    const double anorm = operator_norm(a);
    CHECK(max_abs_diff(f.q0.transpose() * a * f.q0, f.d0()) <= 1e-10 * anorm);
    const double q = operator_norm(f.q0);
    const double qi = operator_norm(inverse(f.q0));
    CHECK(std::abs(q * q * f.sigma.back() - 1.0) < 1e-10);
    CHECK(std::abs(qi * qi / f.sigma.front() - 1.0) < 1e-10);
  }
}
