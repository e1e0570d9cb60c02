#pragma once

// Problem instances (f, g, r) and the hypothesis gate
//   grad f(0) = 0  and  g - f in (f)^{r+2}.
// Membership in a power of the principal ideal (f) is decided by exact
// polynomial divisibility by f^{r+2}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "germflow/poly.hpp"
#include "germflow/sample_grid.hpp"

namespace germflow {

/// g = f + h * f^{r+2}; equivalently g = f (h f^{r+1} + 1).
inline MultiPoly build_g(const MultiPoly& f, const MultiPoly& h, unsigned r) {
  if (f.dim() != h.dim()) throw DimensionMismatch("build_g: f and h have different dimensions");
  if (f.constant_term() != 0) throw std::invalid_argument("build_g: f(0) must vanish");
  return f + h * pow(f, r + 2);
}

struct GermCase {
  std::vector<std::string> vars;
  MultiPoly f;
  MultiPoly g;
  unsigned r = 1;
  std::optional<MultiPoly> h;
  std::string label;

  std::size_t n() const noexcept { return f.dim(); }

  /// Case given by its witness h; g is derived.
  static GermCase from_witness(std::vector<std::string> vars, MultiPoly f, MultiPoly h, unsigned r,
                               std::string label = {}) {
    check_common(vars, f, r);
    GermCase c;
    c.g = build_g(f, h, r);
    c.vars = std::move(vars);
    c.f = std::move(f);
    c.h = std::move(h);
    c.r = r;
    c.label = std::move(label);
    return c;
  }

  /// Case given directly by g. The hypotheses are not checked here.
  static GermCase from_target(std::vector<std::string> vars, MultiPoly f, MultiPoly g, unsigned r,
                              std::string label = {}) {
    check_common(vars, f, r);
    if (g.dim() != f.dim()) throw DimensionMismatch("GermCase: f and g have different dimensions");
    GermCase c;
    c.vars = std::move(vars);
    c.f = std::move(f);
    c.g = std::move(g);
    c.r = r;
    c.label = std::move(label);
    return c;
  }

  /// Both g and h given: they must satisfy g = f + h f^{r+2} exactly.
  static GermCase from_both(std::vector<std::string> vars, MultiPoly f, MultiPoly g, MultiPoly h, unsigned r,
                            std::string label = {}) {
    GermCase c = from_witness(std::move(vars), std::move(f), std::move(h), r, std::move(label));
    if (!(c.g == g)) throw std::invalid_argument("GermCase: g differs from f + h*f^(r+2)");
    return c;
  }

 private:
  static void check_common(const std::vector<std::string>& vars, const MultiPoly& f, unsigned r) {
    if (r < 1) throw std::invalid_argument("GermCase: r must be >= 1");
    if (vars.size() != f.dim()) throw DimensionMismatch("GermCase: variable list length differs from n");
  }
};

struct HypothesisReport {
  bool f_vanishes = false;
  bool g_vanishes = false;
  bool grad_f_vanishes = false;
  bool membership = false;
  std::optional<MultiPoly> quotient;
  std::vector<std::string> messages;

  bool passed() const { return f_vanishes && g_vanishes && grad_f_vanishes && membership; }
};

inline HypothesisReport check_hypotheses(const GermCase& c) {
  HypothesisReport rep;
  const std::size_t n = c.n();
  rep.f_vanishes = c.f.constant_term() == 0;
  rep.g_vanishes = c.g.constant_term() == 0;
  if (!rep.f_vanishes) rep.messages.push_back("f(0) != 0");
  if (!rep.g_vanishes) rep.messages.push_back("g(0) != 0");

  rep.grad_f_vanishes = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (partial(c.f, i).constant_term() != 0) {
      rep.grad_f_vanishes = false;
      rep.messages.push_back("df/d" + c.vars[i] + "(0) = " + to_string(partial(c.f, i).constant_term()));
    }
  }

  if (c.f.is_zero()) {
    // (0)^{r+2} = (0): membership means g == f.
    rep.membership = c.g.is_zero();
    if (rep.membership) rep.quotient = MultiPoly(n);
    else rep.messages.push_back("f = 0 and g != 0");
    return rep;
  }
  const MultiPoly power = pow(c.f, c.r + 2);
  auto div = divide_exact(c.g - c.f, power);
  rep.membership = div.divisible;
  if (div.divisible) {
    rep.quotient = std::move(div.quotient);
  } else {
    rep.messages.push_back("g - f is not divisible by f^" + std::to_string(c.r + 2));
  }
  return rep;
}

struct Lemma1Entry {
  Monomial alpha;
  bool divisible = false;
};

struct Lemma1Report {
  std::vector<Lemma1Entry> part_i;
  bool part_i_ok = false;
  double C_hat = 0.0;
  std::size_t samples = 0;
  bool part_ii_ok = false;

  bool passed() const { return part_i_ok && part_ii_ok; }
};

inline constexpr double kLemma1Floor = 1e-30;

/// Checks both parts of the derivative/size lemma for p in (f)^M:
///  (i)  d^alpha p in (f)^{M-|alpha|} for all |alpha| <= r (exact division);
///  (ii) |p(x)| <= C |f(x)|^M on the grid, C fitted as the max ratio.
inline Lemma1Report lemma1_check(const MultiPoly& p, const MultiPoly& f, unsigned M, unsigned r,
                                 const SampleGrid& grid) {
  if (M <= r) throw std::invalid_argument("lemma1_check: requires M > r");
  if (f.is_zero()) throw std::invalid_argument("lemma1_check: f must be nonzero");
  if (!divide_exact(p, pow(f, M)).divisible)
    throw std::invalid_argument("lemma1_check: p is not in (f)^" + std::to_string(M));

  Lemma1Report rep;
  rep.part_i_ok = true;
  for (const auto& alpha : multi_indices_up_to(p.dim(), r)) {
    const bool ok = divide_exact(higher_partial(p, alpha), pow(f, M - alpha.degree())).divisible;
    rep.part_i.push_back({alpha, ok});
    rep.part_i_ok = rep.part_i_ok && ok;
  }

  const NumericPoly pn(p);
  const NumericPoly fn(f);
  for (const auto& x : grid.ball_points(p.dim())) {
    const double fm = std::pow(std::abs(fn(x)), static_cast<double>(M));
    if (std::abs(fn(x)) <= kLemma1Floor || fm == 0.0) continue;
    rep.C_hat = std::max(rep.C_hat, std::abs(pn(x)) / fm);
    ++rep.samples;
  }
  rep.part_ii_ok = rep.samples > 0 && std::isfinite(rep.C_hat);
  return rep;
}

}  // namespace germflow
