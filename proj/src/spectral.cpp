#include "singcert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "singcert/error.hpp"

namespace singcert {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSweeps = 100;

double off_diagonal_sq(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return s;
}

}  // namespace

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (!a.is_square()) return false;
  const double scale = std::max(1.0, a.max_abs());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > rel_tol * scale) return false;
  return true;
}

SymmetricEigen symmetric_eigen(const Matrix& input, bool sort_descending) {
  if (!input.is_square()) throw Error(ErrorCode::InvalidArgument, "eigen of non-square matrix");
  const std::size_t n = input.rows();
  Matrix a = input;
  // symmetrize to kill representation noise
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);

  const double frob = a.frobenius_norm();
  const double stop = (kEps * frob) * (kEps * frob);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_sq(a) <= stop) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  out.vectors = std::move(v);
  if (sort_descending) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return out.values[i] > out.values[j];
    });
    SymmetricEigen sorted{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
      sorted.values[k] = out.values[order[k]];
      for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, k) = out.vectors(i, order[k]);
    }
    return sorted;
  }
  return out;
}

Vector singular_values(const Matrix& input) {
  Matrix u = input.rows() >= input.cols() ? input : input.transpose();
  const std::size_t m = u.rows();
  const std::size_t n = u.cols();
  if (n == 0) return {};
  const double tol = kEps;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          alpha += u(k, i) * u(k, i);
          beta += u(k, j) * u(k, j);
          gamma += u(k, i) * u(k, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double ui = u(k, i), uj = u(k, j);
          u(k, i) = c * ui - s * uj;
          u(k, j) = s * ui + c * uj;
        }
      }
    }
    if (!rotated) break;
  }
  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm(u.column(j));
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

double operator_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  return singular_values(a).front();
}

double distance_to_singular(const Matrix& a) {
  if (!a.is_square()) throw Error(ErrorCode::InvalidArgument, "distance_to_singular needs a square matrix");
  if (a.rows() == 0) return 0.0;
  return singular_values(a).back();
}

SignatureFactorization signature_diagonalize(const Matrix& a, std::optional<double> tol) {
  if (!is_symmetric(a, 1e-10)) throw Error(ErrorCode::InvalidArgument, "signature_diagonalize needs a symmetric matrix");
  const SymmetricEigen eig = symmetric_eigen(a);
  const std::size_t n = a.rows();
  Vector sigma(n);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = std::abs(eig.values[i]);
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  const double threshold = tol.value_or(1e-12 * (n ? sigma.front() : 0.0));
  if (n == 0 || sigma.back() <= threshold) {
    throw Error(ErrorCode::NearSingular, "symmetric matrix too close to singular for a signature");
  }
  SignatureFactorization out{Matrix(n, n), Vector(n), sigma};
  for (std::size_t j = 0; j < n; ++j) {
    const double lambda = eig.values[j];
    out.signs[j] = lambda > 0.0 ? 1.0 : -1.0;
    const double s = 1.0 / std::sqrt(std::abs(lambda));
    for (std::size_t i = 0; i < n; ++i) out.q0(i, j) = eig.vectors(i, j) * s;
  }
  return out;
}

}  // namespace singcert
