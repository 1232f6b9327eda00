#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "singcert/linalg.hpp"

namespace singcert {

using MultiIndex = std::vector<int>;

struct Term {
  double coefficient = 0.0;
  MultiIndex exponents;

  friend bool operator==(const Term&, const Term&) = default;
};

using Polynomial = std::vector<Term>;

// Canonical form: graded order (highest total degree first, then
// lexicographically descending), merged, no zero coefficients.
void canonicalize(Polynomial& p);

Polynomial differentiate(const Polynomial& p, const MultiIndex& beta);
int total_degree(const MultiIndex& alpha);

// A map R^n -> R^m, one polynomial per output coordinate.
class PolynomialMap {
 public:
  PolynomialMap() = default;
  PolynomialMap(std::size_t n, std::vector<Polynomial> components);

  std::size_t dims_in() const noexcept { return n_; }
  std::size_t dims_out() const noexcept { return components_.size(); }
  const std::vector<Polynomial>& components() const noexcept { return components_; }
  int degree() const;
  bool is_zero() const;

  Vector evaluate(std::span<const double> x) const;

  // Works for any ring-like T (doubles, Taylor jets).
  template <class T>
  std::vector<T> evaluate_as(std::span<const T> x, const T& one) const;

  friend bool operator==(const PolynomialMap&, const PolynomialMap&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Polynomial> components_;
};

// Grammar: components separated by ';'. Each is an expression over x1..xn
// with real literals, + - * ( ), '/' by a nonzero constant and '^' with a
// nonnegative integer literal exponent.
PolynomialMap parse_polynomial_map(std::string_view text, std::size_t n);

// Largest variable index used in the text (0 when there is none).
std::size_t infer_dimension(std::string_view text);

std::string to_string(const Polynomial& p);
std::string to_string(const PolynomialMap& f);

std::string format_double(double v);

template <class T>
std::vector<T> PolynomialMap::evaluate_as(std::span<const T> x, const T& one) const {
  std::vector<T> out;
  out.reserve(components_.size());
  for (const Polynomial& poly : components_) {
    T acc = one * 0.0;
    for (const Term& t : poly) {
      T mono = one * t.coefficient;
      for (std::size_t i = 0; i < n_; ++i)
        for (int e = 0; e < t.exponents[i]; ++e) mono = mono * x[i];
      acc = acc + mono;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace singcert
