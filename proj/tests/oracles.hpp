#pragma once

// Independent reference computations used by the tests. Nothing here goes
// through the numerical paths under test.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "germflow/germ.hpp"
#include "germflow/poly.hpp"

namespace oracle {

using germflow::Monomial;
using germflow::MultiPoly;
using germflow::Rational;

/// X(xi, x) = d grad F / |grad F|^2 in exact rational arithmetic.
inline std::vector<Rational> exact_X(const germflow::GermCase& c, const Rational& xi, const std::vector<Rational>& x) {
  const MultiPoly d = c.g - c.f;
  std::vector<Rational> grad(c.n() + 1);
  grad[0] = germflow::eval_exact(d, x);
  for (std::size_t i = 0; i < c.n(); ++i)
    grad[i + 1] = germflow::eval_exact(germflow::partial(c.f, i), x) + xi * germflow::eval_exact(germflow::partial(d, i), x);
  Rational norm2(0);
  for (const auto& v : grad) norm2 += v * v;
  std::vector<Rational> X(grad.size(), Rational(0));
  if (norm2 == 0) return X;
  for (std::size_t i = 0; i < grad.size(); ++i) X[i] = grad[0] * grad[i] / norm2;
  return X;
}

/// Root of g(y) = target near y0 by safeguarded Newton in long double.
inline double newton_1d(const std::function<long double(long double)>& g, const std::function<long double(long double)>& dg,
                        long double target, long double y0) {
  long double y = y0;
  for (int it = 0; it < 100; ++it) {
    const long double r = g(y) - target;
    const long double s = dg(y);
    if (r == 0 || s == 0) break;
    const long double step = r / s;
    y -= step;
    if (std::fabs(step) <= 1e-19L * (1 + std::fabs(y))) break;
  }
  return static_cast<double>(y);
}

/// Newton solve of g(y) = f(x) for one-variable polynomial cases, y0 = x.
inline double newton_phi_1d(const MultiPoly& f, const MultiPoly& g, double x) {
  auto eval_ld = [](const MultiPoly& p, long double t) {
    long double s = 0;
    for (const auto& [m, c] : p.terms()) s += static_cast<long double>(germflow::to_double(c)) * std::pow(t, m[0]);
    return s;
  };
  const MultiPoly dg = germflow::partial(g, 0);
  const long double target = eval_ld(f, x);
  if (target == 0) return 0.0;
  return newton_1d([&](long double y) { return eval_ld(g, y); }, [&](long double y) { return eval_ld(dg, y); }, target,
                   x);
}

/// d^k(1/xi) through the Leibniz rule applied to xi * u = 1:
///   d^k u = -(1/xi) sum_{beta < k} C(k, beta) d^{k-beta} xi d^beta u,
/// with d^beta u = N_beta / xi^{|beta|+1}. Returns N_k.
inline MultiPoly leibniz_inverse_numerator(const MultiPoly& xi, const Monomial& k) {
  const std::size_t n = xi.dim();
  std::function<MultiPoly(const Monomial&)> N = [&](const Monomial& b) -> MultiPoly {
    if (b.degree() == 0) return MultiPoly::constant(n, Rational(1));
    // N_k = -sum_{beta < k} C(k,beta) d^{k-beta} xi * N_beta * xi^{|k|-|beta|-1}
    MultiPoly acc(n);
    std::vector<unsigned> cur(n, 0);
    while (true) {
      Monomial beta{std::vector<unsigned>(cur)};
      if (!(beta == b)) {
        Rational binom(1);
        for (std::size_t i = 0; i < n; ++i)
          for (unsigned j = 1; j <= beta[i]; ++j) binom = binom * (b[i] - beta[i] + j) / j;
        const MultiPoly term = germflow::higher_partial(xi, b / beta) * N(beta) *
                               germflow::pow(xi, b.degree() - beta.degree() - 1);
        acc += germflow::scale(term, binom);
      }
      std::size_t i = 0;
      while (i < n && ++cur[i] > b[i]) cur[i++] = 0;
      if (i == n) break;
    }
    return -acc;
  };
  return N(k);
}

/// Random polynomial with small integer coefficients.
inline MultiPoly random_poly(std::mt19937_64& rng, std::size_t n, unsigned max_degree, int terms, int coef_range = 5) {
  std::uniform_int_distribution<int> coef(-coef_range, coef_range);
  std::uniform_int_distribution<unsigned> deg(0, max_degree);
  MultiPoly p(n);
  for (int t = 0; t < terms; ++t) {
    Monomial m(n);
    unsigned left = deg(rng);
    for (std::size_t i = 0; i < n && left > 0; ++i) {
      std::uniform_int_distribution<unsigned> part(0, left);
      m[i] = (i + 1 == n) ? left : part(rng);
      left -= m[i];
    }
    p.add_term(m, Rational(coef(rng)));
  }
  return p;
}

}  // namespace oracle
