#include "singcert/taylor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <mutex>

#include "singcert/error.hpp"

namespace singcert {

namespace {

void enumerate(std::size_t n, int max_degree, std::vector<MultiIndex>& out) {
  for (int d = 0; d <= max_degree; ++d) {
    MultiIndex alpha(n, 0);
    // all compositions of d into n parts, lexicographically descending
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
      if (i + 1 == n) {
        alpha[i] = left;
        out.push_back(alpha);
        return;
      }
      for (int v = left; v >= 0; --v) {
        alpha[i] = v;
        self(self, i + 1, left - v);
      }
    };
    if (n == 0) {
      if (d == 0) out.push_back(alpha);
    } else {
      rec(rec, 0, d);
    }
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

std::shared_ptr<const JetSpace> JetSpace::get(std::size_t n, int order) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, order}];
  if (!slot) slot = std::make_shared<JetSpace>(n, order);
  return slot;
}

JetSpace::JetSpace(std::size_t n, int order) : n_(n), order_(order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "negative jet order");
  enumerate(n, order, monomials_);
  degrees_.reserve(monomials_.size());
  for (const auto& m : monomials_) degrees_.push_back(total_degree(m));
  MultiIndex sum(n);
  for (std::size_t a = 0; a < monomials_.size(); ++a) {
    for (std::size_t b = 0; b < monomials_.size(); ++b) {
      if (degrees_[a] + degrees_[b] > order_) continue;
      for (std::size_t i = 0; i < n; ++i) sum[i] = monomials_[a][i] + monomials_[b][i];
      products_.push_back({a, b, index_of(sum)});
    }
  }
}

std::size_t JetSpace::index_of(const MultiIndex& alpha) const {
  const int d = total_degree(alpha);
  if (d > order_) throw Error(ErrorCode::InvalidArgument, "monomial exceeds jet order");
  // monomials of one degree are contiguous and sorted descending
  auto first = std::find_if(degrees_.begin(), degrees_.end(), [d](int x) { return x == d; });
  auto begin = monomials_.begin() + (first - degrees_.begin());
  auto end = begin;
  while (end != monomials_.end() && total_degree(*end) == d) ++end;
  auto it = std::lower_bound(begin, end, alpha, [](const MultiIndex& a, const MultiIndex& b) { return a > b; });
  assert(it != end && *it == alpha);
  return static_cast<std::size_t>(it - monomials_.begin());
}

TaylorJet::TaylorJet(std::shared_ptr<const JetSpace> space, double value)
    : space_(std::move(space)), coef_(space_->size(), 0.0) {
  coef_[0] = value;
}

TaylorJet TaylorJet::variable(std::shared_ptr<const JetSpace> space, std::size_t i, double value) {
  TaylorJet out(space, value);
  if (space->order() >= 1) {
    MultiIndex e(space->n(), 0);
    e[i] = 1;
    out.coef_[space->index_of(e)] = 1.0;
  }
  return out;
}

double TaylorJet::partial(const MultiIndex& beta) const {
  double f = 1.0;
  for (int b : beta) f *= factorial(b);
  return f * coef_[space_->index_of(beta)];
}

TaylorJet& TaylorJet::operator+=(const TaylorJet& o) {
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
  return *this;
}

TaylorJet& TaylorJet::operator-=(const TaylorJet& o) {
  for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
  return *this;
}

TaylorJet& TaylorJet::operator+=(double c) {
  coef_[0] += c;
  return *this;
}

TaylorJet& TaylorJet::operator*=(double c) {
  for (double& v : coef_) v *= c;
  return *this;
}

TaylorJet operator*(const TaylorJet& a, const TaylorJet& b) {
  TaylorJet out(a.space_, 0.0);
  for (const auto& p : a.space_->products()) out.coef_[p.c] += a.coef_[p.a] * b.coef_[p.b];
  return out;
}

TaylorJet operator/(const TaylorJet& a, const TaylorJet& b) { return a * reciprocal(b); }

TaylorJet TaylorJet::compose(std::span<const double> derivs) const {
  const int order = space_->order();
  TaylorJet nil = *this;
  nil.coef_[0] = 0.0;
  TaylorJet out(space_, derivs[0]);
  TaylorJet power(space_, 1.0);
  double fact = 1.0;
  for (int j = 1; j <= order && j < static_cast<int>(derivs.size()); ++j) {
    power = power * nil;
    fact *= j;
    TaylorJet term = power;
    term *= derivs[j] / fact;
    out += term;
  }
  return out;
}

TaylorJet sqrt(const TaylorJet& a) {
  const double v = a.value();
  if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "sqrt jet at a nonpositive value");
  const int order = a.space().order();
  std::vector<double> d(order + 1);
  double c = 1.0, e = 0.5;
  for (int j = 0; j <= order; ++j) {
    d[j] = c * std::pow(v, e);
    c *= e;
    e -= 1.0;
  }
  return a.compose(d);
}

TaylorJet reciprocal(const TaylorJet& a) {
  const double v = a.value();
  if (v == 0.0) throw Error(ErrorCode::InvalidArgument, "reciprocal jet at zero");
  const int order = a.space().order();
  std::vector<double> d(order + 1);
  double c = 1.0;
  for (int j = 0; j <= order; ++j) {
    d[j] = c * std::pow(v, -1 - j);
    c *= -(j + 1);
  }
  return a.compose(d);
}

TaylorJet pow(const TaylorJet& a, int e) {
  TaylorJet out(a.space_ptr(), 1.0);
  for (int i = 0; i < e; ++i) out = out * a;
  return out;
}

std::vector<TaylorJet> seed_jets(std::span<const double> x, int order) {
  auto space = JetSpace::get(x.size(), order);
  std::vector<TaylorJet> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(TaylorJet::variable(space, i, x[i]));
  return out;
}

}  // namespace singcert
