#pragma once

// Sparse multivariate polynomials with exact rational coefficients.
//
// Every symbolic operation (ring arithmetic, differentiation, division) is
// exact. Doubles only enter through eval() and NumericPoly, which are the
// evaluation boundary used by the numerical modules.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "germflow/rational.hpp"

namespace germflow {

inline constexpr std::size_t kMaxDimension = 8;
inline constexpr unsigned kMaxParseDegree = 64;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : std::runtime_error("parse error at position " + std::to_string(position) + ": " + message),
        position_(position),
        message_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

/// Exponent vector of a monomial; doubles as a multi-index for derivatives.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t n) : exps_(n, 0) {}
  explicit Monomial(std::vector<unsigned> exps) : exps_(std::move(exps)) {}
  Monomial(std::initializer_list<unsigned> exps) : exps_(exps) {}

  std::size_t size() const noexcept { return exps_.size(); }
  unsigned operator[](std::size_t i) const { return exps_[i]; }
  unsigned& operator[](std::size_t i) { return exps_[i]; }
  const std::vector<unsigned>& exponents() const noexcept { return exps_; }

  unsigned degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0u); }

  bool divides(const Monomial& other) const {
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (exps_[i] > other.exps_[i]) return false;
    return true;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.exps_[i] = a.exps_[i] + b.exps_[i];
    return out;
  }

  /// Quotient a/b; requires b.divides(a).
  friend Monomial operator/(const Monomial& a, const Monomial& b) {
    Monomial out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.exps_[i] = a.exps_[i] - b.exps_[i];
    return out;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<unsigned> exps_;
};

/// Graded lexicographic order: total degree first, ties broken
/// lexicographically with x_1 > x_2 > ... > x_n.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const unsigned da = a.degree();
    const unsigned db = b.degree();
    if (da != db) return da < db;
    return a.exponents() < b.exponents();
  }
};

/// All multi-indices of length n with total degree exactly m, in
/// lexicographically decreasing order.
inline std::vector<Monomial> multi_indices_of_degree(std::size_t n, unsigned m) {
  std::vector<Monomial> out;
  Monomial cur(n);
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i + 1 == n) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (unsigned e = left + 1; e-- > 0;) {
      cur[i] = e;
      self(self, i + 1, left - e);
    }
  };
  if (n == 0) {
    if (m == 0) out.emplace_back(0);
    return out;
  }
  rec(rec, 0, m);
  return out;
}

/// All multi-indices of length n with total degree at most m, by degree.
inline std::vector<Monomial> multi_indices_up_to(std::size_t n, unsigned m) {
  std::vector<Monomial> out;
  for (unsigned k = 0; k <= m; ++k) {
    auto level = multi_indices_of_degree(n, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

class MultiPoly {
 public:
  using TermMap = std::map<Monomial, Rational, GrlexLess>;

  explicit MultiPoly(std::size_t n = 0) : n_(n) {}

  static MultiPoly constant(std::size_t n, const Rational& c) {
    MultiPoly p(n);
    p.add_term(Monomial(n), c);
    return p;
  }

  static MultiPoly variable(std::size_t n, std::size_t i) {
    if (i >= n) throw std::out_of_range("MultiPoly::variable: index out of range");
    Monomial m(n);
    m[i] = 1;
    MultiPoly p(n);
    p.add_term(m, Rational(1));
    return p;
  }

  static MultiPoly term(const Monomial& m, const Rational& c) {
    MultiPoly p(m.size());
    p.add_term(m, c);
    return p;
  }

  std::size_t dim() const noexcept { return n_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t term_count() const noexcept { return terms_.size(); }

  /// Total degree; 0 for the zero polynomial.
  unsigned degree() const { return terms_.empty() ? 0u : terms_.rbegin()->first.degree(); }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const { return coefficient(Monomial(n_)); }

  /// Largest term under grlex; requires !is_zero().
  const TermMap::value_type& leading_term() const {
    if (terms_.empty()) throw std::logic_error("leading_term of zero polynomial");
    return *terms_.rbegin();
  }

  /// Accumulates c*m into the polynomial, dropping cancelled terms.
  void add_term(const Monomial& m, const Rational& c) {
    if (m.size() != n_) throw DimensionMismatch("monomial length does not match polynomial dimension");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }

  MultiPoly& operator-=(const MultiPoly& o) {
    check_dim(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }

  friend MultiPoly operator-(const MultiPoly& a) {
    MultiPoly out(a.n_);
    for (const auto& [m, c] : a.terms_) out.terms_.emplace_hint(out.terms_.end(), m, -c);
    return out;
  }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_dim(b);
    MultiPoly out(a.n_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  void check_dim(const MultiPoly& o) const {
    if (o.n_ != n_)
      throw DimensionMismatch("polynomial dimensions differ (" + std::to_string(n_) + " vs " +
                              std::to_string(o.n_) + ")");
  }

  std::size_t n_;
  TermMap terms_;
};

inline MultiPoly add(const MultiPoly& a, const MultiPoly& b) { return a + b; }
inline MultiPoly sub(const MultiPoly& a, const MultiPoly& b) { return a - b; }
inline MultiPoly mul(const MultiPoly& a, const MultiPoly& b) { return a * b; }

inline MultiPoly scale(const MultiPoly& p, const Rational& c) {
  MultiPoly out(p.dim());
  if (c == 0) return out;
  for (const auto& [m, coef] : p.terms()) out.add_term(m, coef * c);
  return out;
}

inline MultiPoly pow(const MultiPoly& p, unsigned e) {
  MultiPoly result = MultiPoly::constant(p.dim(), Rational(1));
  MultiPoly base = p;
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

/// Exact partial derivative with respect to variable index i (0-based).
inline MultiPoly partial(const MultiPoly& p, std::size_t i) {
  if (i >= p.dim())
    throw std::out_of_range("partial: variable index " + std::to_string(i) + " out of range for n=" +
                            std::to_string(p.dim()));
  MultiPoly out(p.dim());
  for (const auto& [m, c] : p.terms()) {
    if (m[i] == 0) continue;
    Monomial dm = m;
    dm[i] -= 1;
    out.add_term(dm, c * m[i]);
  }
  return out;
}

/// Iterated partial derivative d^alpha p.
inline MultiPoly higher_partial(const MultiPoly& p, const Monomial& alpha) {
  if (alpha.size() != p.dim()) throw DimensionMismatch("higher_partial: multi-index length differs from n");
  MultiPoly out(p.dim());
  for (const auto& [m, c] : p.terms()) {
    if (!alpha.divides(m)) continue;
    Rational coef = c;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (unsigned k = 0; k < alpha[i]; ++k) coef *= (m[i] - k);
    out.add_term(m / alpha, coef);
  }
  return out;
}

inline std::vector<MultiPoly> gradient(const MultiPoly& p) {
  std::vector<MultiPoly> g;
  g.reserve(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) g.push_back(partial(p, i));
  return g;
}

namespace detail {

inline double ipow(double x, unsigned e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1u) r *= x;
    e >>= 1u;
    if (e > 0) x *= x;
  }
  return r;
}

}  // namespace detail

/// Double-precision value by plain monomial summation.
inline double eval(const MultiPoly& p, std::span<const double> point) {
  if (point.size() != p.dim()) throw DimensionMismatch("eval: point length differs from n");
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double t = to_double(c);
    for (std::size_t i = 0; i < m.size(); ++i) t *= detail::ipow(point[i], m[i]);
    sum += t;
  }
  return sum;
}

inline Rational eval_exact(const MultiPoly& p, std::span<const Rational> point) {
  if (point.size() != p.dim()) throw DimensionMismatch("eval_exact: point length differs from n");
  Rational sum(0);
  for (const auto& [m, c] : p.terms()) {
    Rational t = c;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (unsigned k = 0; k < m[i]; ++k) t *= point[i];
    sum += t;
  }
  return sum;
}

/// Precompiled double evaluator for a MultiPoly, used in numerical hot loops.
class NumericPoly {
 public:
  NumericPoly() = default;
  explicit NumericPoly(const MultiPoly& p) : n_(p.dim()) {
    coeffs_.reserve(p.term_count());
    exps_.reserve(p.term_count() * n_);
    for (const auto& [m, c] : p.terms()) {
      coeffs_.push_back(to_double(c));
      exps_.insert(exps_.end(), m.exponents().begin(), m.exponents().end());
    }
  }

  std::size_t dim() const noexcept { return n_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  double operator()(std::span<const double> x) const {
    if (x.size() != n_) throw DimensionMismatch("NumericPoly: point length differs from n");
    double sum = 0.0;
    const unsigned* e = exps_.data();
    for (double c : coeffs_) {
      double t = c;
      for (std::size_t i = 0; i < n_; ++i, ++e)
        if (*e != 0) t *= detail::ipow(x[i], *e);
      sum += t;
    }
    return sum;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> coeffs_;
  std::vector<unsigned> exps_;
};

inline std::vector<NumericPoly> compile(const std::vector<MultiPoly>& ps) {
  return {ps.begin(), ps.end()};
}

struct DivisionResult {
  MultiPoly quotient;
  MultiPoly remainder;
  bool divisible = false;
};

/// Single-divisor multivariate division under grlex. With one divisor the
/// remainder vanishes exactly when q divides p.
inline DivisionResult divide_exact(const MultiPoly& p, const MultiPoly& q) {
  if (q.is_zero()) throw std::domain_error("divide_exact: division by the zero polynomial");
  if (p.dim() != q.dim()) throw DimensionMismatch("divide_exact: dimensions differ");
  const auto& [lead_m, lead_c] = q.leading_term();
  MultiPoly work = p;
  MultiPoly quotient(p.dim());
  MultiPoly remainder(p.dim());
  while (!work.is_zero()) {
    const auto [m, c] = work.leading_term();
    if (lead_m.divides(m)) {
      const MultiPoly t = MultiPoly::term(m / lead_m, c / lead_c);
      quotient += t;
      work -= t * q;
    } else {
      remainder.add_term(m, c);
      work.add_term(m, -c);
    }
  }
  const bool divisible = remainder.is_zero();
  return {std::move(quotient), std::move(remainder), divisible};
}

namespace detail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class PolyParser {
 public:
  PolyParser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

  MultiPoly parse() {
    MultiPoly result(vars_.size());
    skip_ws();
    if (at_end()) throw ParseError(pos_, "empty polynomial");
    bool first = true;
    while (true) {
      skip_ws();
      if (at_end()) break;
      int sign = 1;
      if (!first) {
        const char c = text_[pos_];
        if (c != '+' && c != '-') throw ParseError(pos_, std::string("expected '+' or '-', found '") + c + "'");
        sign = c == '-' ? -1 : 1;
        ++pos_;
      }
      parse_term(result, sign);
      first = false;
    }
    return result;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek_digit() const { return !at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_])); }

  Integer parse_integer() {
    skip_ws();
    if (!peek_digit()) throw ParseError(pos_, "expected integer");
    const std::size_t start = pos_;
    while (peek_digit()) ++pos_;
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  void parse_term(MultiPoly& out, int sign) {
    const std::size_t term_start = pos_;
    skip_ws();
    if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      if (text_[pos_] == '-') sign = -sign;
      ++pos_;
      skip_ws();
    }
    if (at_end()) throw ParseError(pos_, "expected term");
    Rational coef(sign);
    Monomial mono(vars_.size());
    bool need_factors = true;
    if (peek_digit()) {
      Integer num = parse_integer();
      Integer den(1);
      skip_ws();
      if (!at_end() && text_[pos_] == '/') {
        ++pos_;
        skip_ws();
        const std::size_t den_pos = pos_;
        den = parse_integer();
        if (den == 0) throw ParseError(den_pos, "zero denominator");
      }
      coef *= Rational(num, den);
      skip_ws();
      if (!at_end() && text_[pos_] == '*') {
        ++pos_;
      } else {
        need_factors = false;
      }
    }
    if (need_factors) parse_factors(mono);
    if (mono.degree() > kMaxParseDegree)
      throw ParseError(term_start, "term degree " + std::to_string(mono.degree()) + " exceeds cap " +
                                       std::to_string(kMaxParseDegree));
    out.add_term(mono, coef);
  }

  void parse_factors(Monomial& mono) {
    parse_factor(mono);
    while (true) {
      skip_ws();
      if (at_end()) return;
      if (text_[pos_] == '*') {
        ++pos_;
        parse_factor(mono);
      } else if (is_ident_start(text_[pos_])) {
        parse_factor(mono);
      } else {
        return;
      }
    }
  }

  void parse_factor(Monomial& mono) {
    skip_ws();
    if (at_end()) throw ParseError(pos_, "expected variable");
    // Longest declared name that matches at the cursor.
    std::size_t best = vars_.size();
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      const auto& v = vars_[i];
      if (v.size() > best_len && text_.substr(pos_, v.size()) == v) {
        best = i;
        best_len = v.size();
      }
    }
    if (best == vars_.size()) {
      std::size_t end = pos_;
      while (end < text_.size() && is_ident_char(text_[end])) ++end;
      if (end == pos_ || !is_ident_start(text_[pos_]))
        throw ParseError(pos_, std::string("unexpected character '") + text_[pos_] + "'");
      throw ParseError(pos_, "unknown variable '" + std::string(text_.substr(pos_, end - pos_)) + "'");
    }
    pos_ += best_len;
    skip_ws();
    unsigned e = 1;
    if (!at_end() && text_[pos_] == '^') {
      ++pos_;
      skip_ws();
      if (!at_end() && text_[pos_] == '-') throw ParseError(pos_, "negative exponent");
      const std::size_t exp_pos = pos_;
      const Integer big = parse_integer();
      if (big > kMaxParseDegree)
        throw ParseError(exp_pos, "exponent exceeds cap " + std::to_string(kMaxParseDegree));
      e = big.convert_to<unsigned>();
    }
    mono[best] += e;
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a polynomial over the ordered variable list `vars`.
///
/// Grammar (whitespace-insensitive):
///   poly    := term (('+' | '-') term)*
///   term    := [sign] coeff ['*' factors] | [sign] factors
///   coeff   := integer | integer '/' positive-integer
///   factors := factor (['*'] factor)*
///   factor  := varname ['^' nonneg-integer]
inline MultiPoly parse_poly(std::string_view text, const std::vector<std::string>& vars) {
  if (vars.size() > kMaxDimension)
    throw ParseError(0, "dimension " + std::to_string(vars.size()) + " exceeds cap " +
                            std::to_string(kMaxDimension));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto& v = vars[i];
    if (v.empty() || !detail::is_ident_start(v[0]) ||
        !std::all_of(v.begin(), v.end(), detail::is_ident_char))
      throw ParseError(0, "invalid variable name '" + v + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (vars[j] == v) throw ParseError(0, "duplicate variable name '" + v + "'");
  }
  return detail::PolyParser(text, vars).parse();
}

/// Renders p in the parser's grammar, terms in decreasing grlex order.
inline std::string to_string(const MultiPoly& p, const std::vector<std::string>& vars) {
  if (vars.size() != p.dim()) throw DimensionMismatch("to_string: variable list length differs from n");
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string factors;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!factors.empty()) factors += "*";
      factors += vars[i];
      if (m[i] > 1) factors += "^" + std::to_string(m[i]);
    }
    if (factors.empty()) {
      out += to_string(mag);
    } else if (mag == 1) {
      out += factors;
    } else {
      out += to_string(mag) + "*" + factors;
    }
  }
  return out;
}

}  // namespace germflow
