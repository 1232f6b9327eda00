#include "singcert/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "singcert/error.hpp"

namespace singcert {

int total_degree(const MultiIndex& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

void canonicalize(Polynomial& p) {
  auto before = [](const MultiIndex& a, const MultiIndex& b) {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;
  };
  std::sort(p.begin(), p.end(),
            [&](const Term& a, const Term& b) { return before(a.exponents, b.exponents); });
  Polynomial merged;
  for (Term& t : p) {
    if (!merged.empty() && merged.back().exponents == t.exponents) {
      merged.back().coefficient += t.coefficient;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coefficient == 0.0; });
  p = std::move(merged);
}

Polynomial differentiate(const Polynomial& p, const MultiIndex& beta) {
  Polynomial out;
  for (const Term& t : p) {
    Term d{t.coefficient, t.exponents};
    bool vanishes = false;
    for (std::size_t i = 0; i < beta.size() && !vanishes; ++i) {
      for (int j = 0; j < beta[i]; ++j) {
        if (d.exponents[i] == 0) {
          vanishes = true;
          break;
        }
        d.coefficient *= d.exponents[i];
        --d.exponents[i];
      }
    }
    if (!vanishes) out.push_back(std::move(d));
  }
  canonicalize(out);
  return out;
}

PolynomialMap::PolynomialMap(std::size_t n, std::vector<Polynomial> components)
    : n_(n), components_(std::move(components)) {
  for (Polynomial& p : components_) {
    for (const Term& t : p)
      if (t.exponents.size() != n_) throw Error(ErrorCode::InvalidArgument, "exponent length does not match dimension");
    canonicalize(p);
  }
}

int PolynomialMap::degree() const {
  int d = 0;
  for (const Polynomial& p : components_)
    for (const Term& t : p) d = std::max(d, total_degree(t.exponents));
  return d;
}

bool PolynomialMap::is_zero() const {
  return std::all_of(components_.begin(), components_.end(), [](const Polynomial& p) { return p.empty(); });
}

Vector PolynomialMap::evaluate(std::span<const double> x) const {
  if (x.size() != n_) throw Error(ErrorCode::InvalidArgument, "point dimension mismatch");
  Vector out(components_.size(), 0.0);
  for (std::size_t c = 0; c < components_.size(); ++c) {
    double acc = 0.0;
    for (const Term& t : components_[c]) {
      double mono = t.coefficient;
      for (std::size_t i = 0; i < n_; ++i)
        if (t.exponents[i] != 0) mono *= std::pow(x[i], t.exponents[i]);
      acc += mono;
    }
    out[c] = acc;
  }
  return out;
}

namespace {

Polynomial constant(double c, std::size_t n) {
  if (c == 0.0) return {};
  return {Term{c, MultiIndex(n, 0)}};
}

Polynomial sum(Polynomial a, const Polynomial& b, double sign) {
  for (const Term& t : b) a.push_back(Term{sign * t.coefficient, t.exponents});
  canonicalize(a);
  return a;
}

Polynomial product(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  out.reserve(a.size() * b.size());
  for (const Term& s : a) {
    for (const Term& t : b) {
      Term u{s.coefficient * t.coefficient, s.exponents};
      for (std::size_t i = 0; i < u.exponents.size(); ++i) u.exponents[i] += t.exponents[i];
      out.push_back(std::move(u));
    }
  }
  canonicalize(out);
  return out;
}

bool constant_value(const Polynomial& p, double& value) {
  if (p.empty()) {
    value = 0.0;
    return true;
  }
  if (p.size() == 1 && total_degree(p.front().exponents) == 0) {
    value = p.front().coefficient;
    return true;
  }
  return false;
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t offset, std::size_t n) : text_(text), offset_(offset), n_(n) {}

  Polynomial parse() {
    skip_space();
    if (at_end()) throw ParseError(ErrorCode::Parse, offset_ + pos_, "empty expression");
    Polynomial p = expr();
    skip_space();
    if (!at_end()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  std::string_view text_;
  std::size_t offset_;
  std::size_t n_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg, ErrorCode code = ErrorCode::Parse) const {
    throw ParseError(code, offset_ + pos_, msg);
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      skip_space();
      const char c = peek();
      if (c != '+' && c != '-') return acc;
      ++pos_;
      acc = sum(std::move(acc), term(), c == '+' ? 1.0 : -1.0);
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      skip_space();
      const char c = peek();
      if (c != '*' && c != '/') return acc;
      const std::size_t op_pos = pos_;
      ++pos_;
      Polynomial rhs = unary();
      if (c == '*') {
        acc = product(acc, rhs);
      } else {
        double divisor = 0.0;
        if (!constant_value(rhs, divisor)) {
          throw ParseError(ErrorCode::Parse, offset_ + op_pos, "division by a non-constant expression");
        }
        if (divisor == 0.0) throw ParseError(ErrorCode::Parse, offset_ + op_pos, "division by zero");
        acc = product(acc, constant(1.0 / divisor, n_));
      }
    }
  }

  Polynomial unary() {
    skip_space();
    if (peek() == '-') {
      ++pos_;
      return product(constant(-1.0, n_), unary());
    }
    if (peek() == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    skip_space();
    if (peek() != '^') return base;
    ++pos_;
    skip_space();
    const std::size_t start = pos_;
    if (peek() == '-') fail("exponent must be a nonnegative integer", ErrorCode::BadExponent);
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ == start) {
      fail("exponent must be a nonnegative integer literal", ErrorCode::BadExponent);
    }
    if (peek() == '.' || peek() == 'e' || peek() == 'E') {
      pos_ = start;
      fail("exponent must be a nonnegative integer", ErrorCode::BadExponent);
    }
    int e = 0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, e);
    if (res.ec != std::errc() || e > 64) {
      pos_ = start;
      fail("exponent too large", ErrorCode::BadExponent);
    }
    Polynomial out = constant(1.0, n_);
    for (int i = 0; i < e; ++i) out = product(out, base);
    return out;
  }

  Polynomial primary() {
    skip_space();
    if (at_end()) fail("unexpected end of expression");
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      skip_space();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return variable();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Polynomial number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
    if (peek() == 'e' || peek() == 'E') {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return constant(v, n_);
  }

  Polynomial variable() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    std::size_t index = 0;
    bool ok = name.size() >= 2 && name[0] == 'x' && name[1] != '0';
    if (ok) {
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      ok = res.ec == std::errc() && res.ptr == name.data() + name.size();
    }
    if (!ok || index < 1 || index > n_) {
      throw ParseError(ErrorCode::UnknownVariable, offset_ + start, "unknown variable '" + std::string(name) + "'");
    }
    MultiIndex alpha(n_, 0);
    alpha[index - 1] = 1;
    return {Term{1.0, alpha}};
  }
};

}  // namespace

PolynomialMap parse_polynomial_map(std::string_view text, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "input dimension must be positive");
  std::vector<Polynomial> components;
  std::size_t start = 0;
  for (;;) {
    const std::size_t stop = text.find(';', start);
    const std::string_view piece = text.substr(start, stop == std::string_view::npos ? std::string_view::npos : stop - start);
    components.push_back(Parser(piece, start, n).parse());
    if (stop == std::string_view::npos) break;
    start = stop + 1;
  }
  return PolynomialMap(n, std::move(components));
}

std::size_t infer_dimension(std::string_view text) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'x') continue;
    if (i > 0 && (std::isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '_')) continue;
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    std::size_t index = 0;
    if (j > i + 1 && std::from_chars(text.data() + i + 1, text.data() + j, index).ec == std::errc())
      best = std::max(best, index);
  }
  return best;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_string(const Polynomial& p) {
  if (p.empty()) return "0";
  std::string out;
  bool first = true;
  for (const Term& t : p) {
    double c = t.coefficient;
    if (first) {
      if (c < 0) {
        out += "-";
        c = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      c = std::abs(c);
    }
    first = false;
    const bool is_const = total_degree(t.exponents) == 0;
    bool need_star = false;
    if (is_const || c != 1.0) {
      out += format_double(c);
      need_star = true;
    }
    for (std::size_t i = 0; i < t.exponents.size(); ++i) {
      if (t.exponents[i] == 0) continue;
      if (need_star) out += "*";
      out += "x" + std::to_string(i + 1);
      if (t.exponents[i] > 1) out += "^" + std::to_string(t.exponents[i]);
      need_star = true;
    }
  }
  return out;
}

std::string to_string(const PolynomialMap& f) {
  std::string out;
  for (std::size_t i = 0; i < f.components().size(); ++i) {
    if (i) out += "; ";
    out += to_string(f.components()[i]);
  }
  return out;
}

}  // namespace singcert
