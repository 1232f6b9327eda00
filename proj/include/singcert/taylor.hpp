#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "singcert/polynomial.hpp"

namespace singcert {

// Monomials of total degree <= order in n variables plus their product table.
class JetSpace {
 public:
  static std::shared_ptr<const JetSpace> get(std::size_t n, int order);

  JetSpace(std::size_t n, int order);

  std::size_t n() const noexcept { return n_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return monomials_.size(); }
  const MultiIndex& monomial(std::size_t i) const { return monomials_[i]; }
  int degree(std::size_t i) const { return degrees_[i]; }
  std::size_t index_of(const MultiIndex& alpha) const;

  struct Product {
    std::size_t a, b, c;
  };
  const std::vector<Product>& products() const noexcept { return products_; }

 private:
  std::size_t n_;
  int order_;
  std::vector<MultiIndex> monomials_;
  std::vector<int> degrees_;
  std::vector<Product> products_;
};

// Truncated multivariate Taylor polynomial: coefficients of (x - x0)^alpha.
class TaylorJet {
 public:
  TaylorJet() = default;
  explicit TaylorJet(std::shared_ptr<const JetSpace> space, double value = 0.0);

  static TaylorJet variable(std::shared_ptr<const JetSpace> space, std::size_t i, double value);

  const JetSpace& space() const { return *space_; }
  std::shared_ptr<const JetSpace> space_ptr() const { return space_; }
  double value() const { return coef_.empty() ? 0.0 : coef_[0]; }
  double coefficient(std::size_t i) const { return coef_[i]; }
  double& coefficient(std::size_t i) { return coef_[i]; }
  // beta! * coefficient, i.e. the partial derivative d^beta at the base point.
  double partial(const MultiIndex& beta) const;

  TaylorJet& operator+=(const TaylorJet& o);
  TaylorJet& operator-=(const TaylorJet& o);
  TaylorJet& operator+=(double c);
  TaylorJet& operator*=(double c);

  friend TaylorJet operator+(TaylorJet a, const TaylorJet& b) { return a += b; }
  friend TaylorJet operator-(TaylorJet a, const TaylorJet& b) { return a -= b; }
  friend TaylorJet operator+(TaylorJet a, double c) { return a += c; }
  friend TaylorJet operator+(double c, TaylorJet a) { return a += c; }
  friend TaylorJet operator-(TaylorJet a, double c) { return a += -c; }
  friend TaylorJet operator-(double c, TaylorJet a) { return (a *= -1.0) += c; }
  friend TaylorJet operator-(TaylorJet a) { return a *= -1.0; }
  friend TaylorJet operator*(TaylorJet a, double c) { return a *= c; }
  friend TaylorJet operator*(double c, TaylorJet a) { return a *= c; }
  friend TaylorJet operator*(const TaylorJet& a, const TaylorJet& b);
  friend TaylorJet operator/(const TaylorJet& a, const TaylorJet& b);

  // h(a) where derivs[j] = h^(j)(a.value()), j = 0..order.
  TaylorJet compose(std::span<const double> derivs) const;

 private:
  std::shared_ptr<const JetSpace> space_;
  std::vector<double> coef_;
};

TaylorJet sqrt(const TaylorJet& a);
TaylorJet reciprocal(const TaylorJet& a);
TaylorJet pow(const TaylorJet& a, int e);

// Seeds x_i + dx_i in a jet space of the given order.
std::vector<TaylorJet> seed_jets(std::span<const double> x, int order);

}  // namespace singcert
