#include "singcert/jet_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "singcert/error.hpp"
#include "singcert/spectral.hpp"

namespace singcert {

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// digits of flat in base n, most significant first
void unflatten(std::size_t flat, std::size_t n, int order, std::vector<std::size_t>& idx) {
  idx.assign(order, 0);
  for (int k = order - 1; k >= 0; --k) {
    idx[k] = flat % n;
    flat /= n;
  }
}

void check_order(const JetOracle& f, std::span<const double> x, int order) {
  if (order < 0 || order > f.max_order()) throw Error(ErrorCode::InvalidArgument, "derivative order out of range");
  if (x.size() != f.dims_in()) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
}

}  // namespace

DerivativeTensor::DerivativeTensor(std::size_t m, std::size_t n, int order)
    : m_(m), n_(n), slice_(ipow(n, order)), order_(order), data_(m * ipow(n, order), 0.0) {}

double DerivativeTensor::operator()(std::size_t i, std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (std::size_t j : idx) flat = flat * n_ + j;
  return at(i, flat);
}

MultiIndex DerivativeTensor::counts(std::size_t flat) const {
  MultiIndex beta(n_, 0);
  for (int k = 0; k < order_; ++k) {
    ++beta[flat % n_];
    flat /= n_;
  }
  return beta;
}

Matrix DerivativeTensor::as_matrix() const {
  if (order_ != 1) throw Error(ErrorCode::InvalidArgument, "as_matrix needs an order-1 tensor");
  return Matrix(m_, n_, data_);
}

Matrix DerivativeTensor::hessian(std::size_t i) const {
  if (order_ != 2) throw Error(ErrorCode::InvalidArgument, "hessian needs an order-2 tensor");
  Matrix h(n_, n_);
  for (std::size_t a = 0; a < n_; ++a)
    for (std::size_t b = 0; b < n_; ++b) h(a, b) = at(i, a * n_ + b);
  return h;
}

double DerivativeTensor::frobenius_norm() const { return norm(data_); }

double DerivativeTensor::max_symmetry_defect() const {
  double worst = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t flat = 0; flat < slice_; ++flat) {
      unflatten(flat, n_, order_, idx);
      std::sort(idx.begin(), idx.end());
      std::size_t sorted = 0;
      for (std::size_t j : idx) sorted = sorted * n_ + j;
      worst = std::max(worst, std::abs(at(i, flat) - at(i, sorted)));
    }
  }
  return worst;
}

double tensor_norm_bound(const DerivativeTensor& t) {
  if (t.order() == 1) return operator_norm(t.as_matrix());
  if (t.order() == 2 && t.dims_out() == 1) {
    const SymmetricEigen e = symmetric_eigen(t.hessian(0));
    double best = 0.0;
    for (double v : e.values) best = std::max(best, std::abs(v));
    return best;
  }
  return t.frobenius_norm();
}

Vector JetOracle::value(std::span<const double> x) const { return derivative(x, 0).data(); }

Matrix JetOracle::jacobian(std::span<const double> x) const { return derivative(x, 1).as_matrix(); }

Matrix JetOracle::hessian(std::span<const double> x, std::size_t component) const {
  return derivative(x, 2).hessian(component);
}

PolynomialOracle::PolynomialOracle(PolynomialMap f, int max_order) : f_(std::move(f)), max_order_(max_order) {}

DerivativeTensor PolynomialOracle::derivative(std::span<const double> x, int order) const {
  check_order(*this, x, order);
  const std::size_t n = dims_in(), m = dims_out();
  DerivativeTensor out(m, n, order);
  if (order > f_.degree()) return out;
  std::map<MultiIndex, Vector> cache;
  for (std::size_t flat = 0; flat < out.slice_size(); ++flat) {
    const MultiIndex beta = out.counts(flat);
    auto it = cache.find(beta);
    if (it == cache.end()) {
      Vector vals(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (const Term& t : f_.components()[i]) {
          double c = t.coefficient;
          for (std::size_t j = 0; j < n && c != 0.0; ++j) {
            const int a = t.exponents[j], b = beta[j];
            if (a < b) {
              c = 0.0;
              break;
            }
            for (int q = 0; q < b; ++q) c *= a - q;
            if (a > b) c *= std::pow(x[j], a - b);
          }
          acc += c;
        }
        vals[i] = acc;
      }
      it = cache.emplace(beta, std::move(vals)).first;
    }
    for (std::size_t i = 0; i < m; ++i) out.at(i, flat) = it->second[i];
  }
  return out;
}

FiniteDifferenceOracle::FiniteDifferenceOracle(std::size_t n, std::size_t m, Function f, int max_order, std::string name)
    : n_(n), m_(m), f_(std::move(f)), max_order_(max_order), name_(std::move(name)) {}

DerivativeTensor FiniteDifferenceOracle::derivative(std::span<const double> x, int order) const {
  check_order(*this, x, order);
  DerivativeTensor out(m_, n_, order);
  if (order == 0) {
    out.data() = f_(x);
    return out;
  }
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 2)) * scale;
  const double denom = std::pow(2.0 * h, order);
  std::map<std::vector<std::size_t>, Vector> cache;
  std::vector<std::size_t> idx;
  Vector point(n_);
  for (std::size_t flat = 0; flat < out.slice_size(); ++flat) {
    unflatten(flat, n_, order, idx);
    std::sort(idx.begin(), idx.end());
    auto it = cache.find(idx);
    if (it == cache.end()) {
      Vector acc(m_, 0.0);
      for (unsigned mask = 0; mask < (1u << order); ++mask) {
        std::copy(x.begin(), x.end(), point.begin());
        double sign = 1.0;
        for (int k = 0; k < order; ++k) {
          const double s = (mask >> k) & 1u ? -1.0 : 1.0;
          sign *= s;
          point[idx[k]] += s * h;
        }
        const Vector fx = f_(point);
        for (std::size_t i = 0; i < m_; ++i) acc[i] += sign * fx[i];
      }
      for (double& v : acc) v /= denom;
      it = cache.emplace(idx, std::move(acc)).first;
    }
    for (std::size_t i = 0; i < m_; ++i) out.at(i, flat) = it->second[i];
  }
  return out;
}

TaylorOracle::TaylorOracle(std::size_t n, std::size_t m, Function f, int max_order, std::string name)
    : n_(n), m_(m), f_(std::move(f)), max_order_(max_order), name_(std::move(name)) {}

DerivativeTensor TaylorOracle::derivative(std::span<const double> x, int order) const {
  check_order(*this, x, order);
  const std::vector<TaylorJet> in = seed_jets(x, order);
  const std::vector<TaylorJet> y = f_(in);
  if (y.size() != m_) throw Error(ErrorCode::InvalidArgument, "taylor function returned wrong output size");
  DerivativeTensor out(m_, n_, order);
  std::map<MultiIndex, Vector> cache;
  for (std::size_t flat = 0; flat < out.slice_size(); ++flat) {
    const MultiIndex beta = out.counts(flat);
    auto it = cache.find(beta);
    if (it == cache.end()) {
      Vector vals(m_);
      for (std::size_t i = 0; i < m_; ++i) vals[i] = y[i].partial(beta);
      it = cache.emplace(beta, std::move(vals)).first;
    }
    for (std::size_t i = 0; i < m_; ++i) out.at(i, flat) = it->second[i];
  }
  return out;
}

SumOracle::SumOracle(std::vector<OraclePtr> parts, std::vector<double> weights)
    : parts_(std::move(parts)), weights_(std::move(weights)) {
  if (parts_.empty() || parts_.size() != weights_.size()) throw Error(ErrorCode::InvalidArgument, "sum oracle needs matching parts and weights");
  for (const auto& p : parts_)
    if (p->dims_in() != parts_.front()->dims_in() || p->dims_out() != parts_.front()->dims_out())
      throw Error(ErrorCode::InvalidArgument, "sum oracle parts differ in shape");
}

int SumOracle::max_order() const {
  int k = parts_.front()->max_order();
  for (const auto& p : parts_) k = std::min(k, p->max_order());
  return k;
}

DerivativeTensor SumOracle::derivative(std::span<const double> x, int order) const {
  DerivativeTensor out(dims_out(), dims_in(), order);
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    const DerivativeTensor t = parts_[i]->derivative(x, order);
    for (std::size_t j = 0; j < out.data().size(); ++j) out.data()[j] += weights_[i] * t.data()[j];
  }
  return out;
}

std::string SumOracle::describe() const {
  std::string s;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) s += " + ";
    s += format_double(weights_[i]) + "*(" + parts_[i]->describe() + ")";
  }
  return s;
}

LinearPullbackOracle::LinearPullbackOracle(OraclePtr f, Vector x0, Matrix r)
    : f_(std::move(f)), x0_(std::move(x0)), r_(std::move(r)) {
  if (r_.rows() != f_->dims_in() || x0_.size() != f_->dims_in())
    throw Error(ErrorCode::InvalidArgument, "pullback shape mismatch");
}

DerivativeTensor LinearPullbackOracle::derivative(std::span<const double> w, int order) const {
  if (w.size() != dims_in()) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
  const Vector x = add(x0_, r_.apply(w));
  DerivativeTensor t = f_->derivative(x, order);
  const std::size_t m = t.dims_out(), n = r_.rows(), q = r_.cols();
  // contract one differentiation slot at a time, last slot first
  std::vector<double> cur = t.data();
  std::size_t lead = m * ipow(n, order - 1);  // count of index tuples before the slot
  std::size_t tail = 1;                       // already-contracted slots (size q each)
  for (int k = order - 1; k >= 0; --k) {
    std::vector<double> next(lead * q * tail, 0.0);
    for (std::size_t a = 0; a < lead; ++a)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t b = 0; b < q; ++b) {
          const double rjb = r_(j, b);
          if (rjb == 0.0) continue;
          const double* src = &cur[(a * n + j) * tail];
          double* dst = &next[(a * q + b) * tail];
          for (std::size_t c = 0; c < tail; ++c) dst[c] += rjb * src[c];
        }
    cur = std::move(next);
    tail *= q;
    if (k > 0) lead /= n;
  }
  DerivativeTensor out(m, q, order);
  out.data() = std::move(cur);
  return out;
}

OraclePtr make_polynomial_oracle(const PolynomialMap& f) { return std::make_shared<PolynomialOracle>(f); }

OraclePtr parse_oracle(std::string_view text, std::size_t n) {
  return make_polynomial_oracle(parse_polynomial_map(text, n));
}

}  // namespace singcert

namespace singcert {

std::vector<TaylorJet> taylor_compose(const JetOracle& f, std::span<const double> x, std::span<const TaylorJet> h) {
  if (h.size() != f.dims_in()) throw Error(ErrorCode::InvalidArgument, "taylor_compose dimension mismatch");
  const auto space = h[0].space_ptr();
  const int order = std::min(space->order(), f.max_order());
  const std::size_t n = f.dims_in(), m = f.dims_out();
  std::vector<TaylorJet> out(m, TaylorJet(space, 0.0));
  std::vector<std::size_t> idx;
  double factorial = 1.0;
  for (int p = 0; p <= order; ++p) {
    if (p > 0) factorial *= p;
    const DerivativeTensor t = f.derivative(x, p);
    if (p == 0) {
      for (std::size_t i = 0; i < m; ++i) out[i] += t.at(i, 0);
      continue;
    }
    // iterate sorted index tuples once, weighted by their multiplicity
    for (std::size_t flat = 0; flat < t.slice_size(); ++flat) {
      unflatten(flat, n, p, idx);
      if (!std::is_sorted(idx.begin(), idx.end())) continue;
      const MultiIndex beta = t.counts(flat);
      double mult = factorial;
      for (int b : beta)
        for (int q = 2; q <= b; ++q) mult /= q;
      bool any = false;
      for (std::size_t i = 0; i < m && !any; ++i) any = t.at(i, flat) != 0.0;
      if (!any) continue;
      TaylorJet mono(space, 1.0);
      for (std::size_t j : idx) mono = mono * h[j];
      for (std::size_t i = 0; i < m; ++i) {
        const double c = t.at(i, flat);
        if (c != 0.0) out[i] += mono * (c * mult / factorial);
      }
    }
  }
  return out;
}

DerivativeTensor tensor_from_jets(std::span<const TaylorJet> y, int order) {
  if (y.empty()) throw Error(ErrorCode::InvalidArgument, "no jets");
  DerivativeTensor out(y.size(), y[0].space().n(), order);
  for (std::size_t flat = 0; flat < out.slice_size(); ++flat) {
    const MultiIndex beta = out.counts(flat);
    for (std::size_t i = 0; i < y.size(); ++i) out.at(i, flat) = y[i].partial(beta);
  }
  return out;
}

}  // namespace singcert
