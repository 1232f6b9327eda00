#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "singcert/linalg.hpp"
#include "singcert/polynomial.hpp"
#include "singcert/taylor.hpp"

namespace singcert {

// D^p f(x): m x n^p array, flat index ((i*n + j1)*n + j2)... .
class DerivativeTensor {
 public:
  DerivativeTensor() = default;
  DerivativeTensor(std::size_t m, std::size_t n, int order);

  std::size_t dims_out() const noexcept { return m_; }
  std::size_t dims_in() const noexcept { return n_; }
  int order() const noexcept { return order_; }
  std::size_t slice_size() const noexcept { return slice_; }

  double& at(std::size_t i, std::size_t flat) { return data_[i * slice_ + flat]; }
  double at(std::size_t i, std::size_t flat) const { return data_[i * slice_ + flat]; }
  double operator()(std::size_t i, std::span<const std::size_t> idx) const;

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  // Multi-index counts of a flat index (beta_j = occurrences of j).
  MultiIndex counts(std::size_t flat) const;

  Matrix as_matrix() const;           // order 1
  Matrix hessian(std::size_t i) const;  // order 2, component i
  double frobenius_norm() const;
  double max_symmetry_defect() const;

 private:
  std::size_t m_ = 0, n_ = 0, slice_ = 1;
  int order_ = 0;
  std::vector<double> data_;
};

// Sound upper bound on the operator norm of D^p f: exact for p = 1 and for
// the Hessian of a scalar function, Frobenius norm otherwise.
double tensor_norm_bound(const DerivativeTensor& t);

class JetOracle {
 public:
  virtual ~JetOracle() = default;
  virtual std::size_t dims_in() const = 0;
  virtual std::size_t dims_out() const = 0;
  virtual int max_order() const = 0;
  virtual DerivativeTensor derivative(std::span<const double> x, int order) const = 0;
  virtual std::string describe() const { return "oracle"; }

  Vector value(std::span<const double> x) const;
  Matrix jacobian(std::span<const double> x) const;
  Matrix hessian(std::span<const double> x, std::size_t component = 0) const;
};

using OraclePtr = std::shared_ptr<const JetOracle>;

class PolynomialOracle final : public JetOracle {
 public:
  explicit PolynomialOracle(PolynomialMap f, int max_order = 8);
  std::size_t dims_in() const override { return f_.dims_in(); }
  std::size_t dims_out() const override { return f_.dims_out(); }
  int max_order() const override { return max_order_; }
  DerivativeTensor derivative(std::span<const double> x, int order) const override;
  std::string describe() const override { return to_string(f_); }
  const PolynomialMap& map() const { return f_; }

 private:
  PolynomialMap f_;
  int max_order_;
};

// Mixed central differences; step eps^(1/(p+2)) * max(1, |x|_inf), which is
// the cube root of machine epsilon for first derivatives. Accuracy is
// O(h^2) truncation plus O(eps/h^p) rounding.
class FiniteDifferenceOracle final : public JetOracle {
 public:
  using Function = std::function<Vector(std::span<const double>)>;
  FiniteDifferenceOracle(std::size_t n, std::size_t m, Function f, int max_order = 3, std::string name = "fd");
  std::size_t dims_in() const override { return n_; }
  std::size_t dims_out() const override { return m_; }
  int max_order() const override { return max_order_; }
  DerivativeTensor derivative(std::span<const double> x, int order) const override;
  std::string describe() const override { return name_; }

 private:
  std::size_t n_, m_;
  Function f_;
  int max_order_;
  std::string name_;
};

// Derivatives read off truncated Taylor expansions; exact up to rounding.
class TaylorOracle final : public JetOracle {
 public:
  using Function = std::function<std::vector<TaylorJet>(std::span<const TaylorJet>)>;
  TaylorOracle(std::size_t n, std::size_t m, Function f, int max_order = 4, std::string name = "taylor");
  std::size_t dims_in() const override { return n_; }
  std::size_t dims_out() const override { return m_; }
  int max_order() const override { return max_order_; }
  DerivativeTensor derivative(std::span<const double> x, int order) const override;
  std::string describe() const override { return name_; }

 private:
  std::size_t n_, m_;
  Function f_;
  int max_order_;
  std::string name_;
};

// sum_i w_i f_i for oracles of equal shape.
class SumOracle final : public JetOracle {
 public:
  SumOracle(std::vector<OraclePtr> parts, std::vector<double> weights);
  std::size_t dims_in() const override { return parts_.front()->dims_in(); }
  std::size_t dims_out() const override { return parts_.front()->dims_out(); }
  int max_order() const override;
  DerivativeTensor derivative(std::span<const double> x, int order) const override;
  std::string describe() const override;

 private:
  std::vector<OraclePtr> parts_;
  std::vector<double> weights_;
};

// w -> f(x0 + R w).
class LinearPullbackOracle final : public JetOracle {
 public:
  LinearPullbackOracle(OraclePtr f, Vector x0, Matrix r);
  std::size_t dims_in() const override { return r_.cols(); }
  std::size_t dims_out() const override { return f_->dims_out(); }
  int max_order() const override { return f_->max_order(); }
  DerivativeTensor derivative(std::span<const double> w, int order) const override;
  std::string describe() const override { return "pullback(" + f_->describe() + ")"; }

 private:
  OraclePtr f_;
  Vector x0_;
  Matrix r_;
};

OraclePtr make_polynomial_oracle(const PolynomialMap& f);
OraclePtr parse_oracle(std::string_view text, std::size_t n);

}  // namespace singcert

namespace singcert {

// f(x + h) as Taylor jets, from the derivative tensors of f at x up to the
// jet order. The h jets must have zero constant term.
std::vector<TaylorJet> taylor_compose(const JetOracle& f, std::span<const double> x, std::span<const TaylorJet> h);

// Derivative tensor of the given order read off a vector of jets.
DerivativeTensor tensor_from_jets(std::span<const TaylorJet> y, int order);

}  // namespace singcert
