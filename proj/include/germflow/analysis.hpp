#pragma once

// Numerical checks of the estimates behind the construction:
// gradient inequality scans, |f| <= C dist(x, V_f), derivatives of 1/xi,
// gradient comparability, and the decay of X and its derivatives towards
// the critical set.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "germflow/homotopy.hpp"
#include "germflow/poly.hpp"
#include "germflow/sample_grid.hpp"
#include "germflow/zero_set.hpp"

namespace germflow {

/// A scan could not be carried out (no admissible samples, too few shells).
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Refinement of the grid may grow an empirical constant by less than this.
inline constexpr double kRefinementGrowth = 2.0;
/// Allowed relative drift of C1_hat and C3_hat under refinement.
inline constexpr double kComparabilityDrift = 1.25;
/// Slack on fitted log-log slopes.
inline constexpr double kSlopeSlack = 0.25;

namespace detail {

/// Ordinary least-squares slope of y against x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t m = x.size();
  if (m < 2) throw VerificationError("regression needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw VerificationError("regression abscissae are degenerate");
  return sxy / sxx;
}

inline void require_vanishing_at_origin(const MultiPoly& f, const char* what) {
  if (f.constant_term() != 0) throw std::invalid_argument(std::string(what) + ": f(0) must vanish");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gradient inequality |grad f| >= C |f|^eta

struct LojaReport {
  double C_hat = 0.0;
  double eta_hat = 0.0;
  std::size_t sample_count = 0;
  double radius = 0.0;

  bool passed() const { return C_hat > 0.0 && std::isfinite(C_hat) && eta_hat >= 0.0 && eta_hat < 1.0; }
};

/// C_hat = min |grad f|/|f| (the eta = 1 constant); eta_hat is the OLS slope of
/// log|grad f| against log|f|. Samples lie in the Euclidean ball.
inline LojaReport loja_gradient_scan(const MultiPoly& f, const SampleGrid& grid) {
  detail::require_vanishing_at_origin(f, "loja_gradient_scan");
  const NumericPoly fn(f);
  const auto grad = compile(gradient(f));
  LojaReport rep;
  rep.radius = grid.radius;
  rep.C_hat = std::numeric_limits<double>::infinity();
  std::vector<double> lf, lg;
  for (const auto& x : grid.ball_points(f.dim())) {
    const double fv = std::abs(fn(x));
    double gv = 0.0;
    for (const auto& gi : grad) gv += gi(x) * gi(x);
    gv = std::sqrt(gv);
    if (fv <= grid.exclusion || fv == 0.0 || gv == 0.0) continue;
    rep.C_hat = std::min(rep.C_hat, gv / fv);
    lf.push_back(std::log(fv));
    lg.push_back(std::log(gv));
  }
  rep.sample_count = lf.size();
  if (rep.sample_count < 2) throw VerificationError("loja_gradient_scan: no admissible samples");
  rep.eta_hat = detail::ols_slope(lf, lg);
  return rep;
}

// ---------------------------------------------------------------------------
// |f(x)| <= C dist(x, V_f)

struct Lemma2Report {
  double C_hat = 0.0;
  double C_hat_refined = 0.0;
  std::size_t variety_samples = 0;
  bool pass = false;
};

inline double lemma2_constant(const MultiPoly& f, const SampleGrid& grid, std::size_t* variety_samples = nullptr) {
  const PointSet v = zero_sample({f}, grid);
  if (variety_samples) *variety_samples = v.size();
  const NumericPoly fn(f);
  double c = 0.0;
  for (const auto& x : grid.ball_points(f.dim())) {
    const double dist = distance_to_samples(x, v);
    const double fv = std::abs(fn(x));
    if (dist > 0.0) c = std::max(c, fv / dist);
  }
  return c;
}

/// Fits C = max |f|/dist(x, V_f) with V_f sampled; passes when the constant
/// is finite and grows by less than 2x when the grid spacing is halved.
inline Lemma2Report lemma2_scan(const MultiPoly& f, const SampleGrid& grid) {
  detail::require_vanishing_at_origin(f, "lemma2_scan");
  Lemma2Report rep;
  rep.C_hat = lemma2_constant(f, grid, &rep.variety_samples);
  rep.C_hat_refined = lemma2_constant(f, grid.refined());
  rep.pass = std::isfinite(rep.C_hat) && std::isfinite(rep.C_hat_refined) &&
             rep.C_hat_refined < kRefinementGrowth * std::max(rep.C_hat, std::numeric_limits<double>::min());
  return rep;
}

// ---------------------------------------------------------------------------
// Derivatives of 1/xi

struct InvPowerExpansion {
  MultiPoly numerator;
  unsigned denom_power = 0;
};

/// d^k (1/xi) = numerator / xi^{|k|+1}, built by the quotient rule with the
/// denominator kept a pure power of xi:
///   d_i (N / xi^p) = (d_i N * xi - p N d_i xi) / xi^{p+1}.
inline InvPowerExpansion inv_power_expand(const MultiPoly& xi, const Monomial& k) {
  if (xi.is_zero()) throw std::domain_error("inv_power_expand: xi is the zero polynomial");
  if (k.size() != xi.dim()) throw DimensionMismatch("inv_power_expand: multi-index length differs from n");
  if (k.degree() < 1) throw std::invalid_argument("inv_power_expand: requires |k| >= 1");
  InvPowerExpansion e{MultiPoly::constant(xi.dim(), Rational(1)), 1};
  for (std::size_t i = 0; i < k.size(); ++i) {
    const MultiPoly dxi = partial(xi, i);
    for (unsigned rep = 0; rep < k[i]; ++rep) {
      e.numerator = partial(e.numerator, i) * xi - scale(e.numerator * dxi, Rational(e.denom_power));
      ++e.denom_power;
    }
  }
  return e;
}

struct RationalFunction {
  MultiPoly num;
  MultiPoly den;
};

/// d^k (1/xi) by the plain quotient rule (a/b)' = (a'b - ab')/b^2 without any
/// normalization; an independent route for checking inv_power_expand.
inline RationalFunction quotient_rule_inverse_derivative(const MultiPoly& xi, const Monomial& k) {
  if (xi.is_zero()) throw std::domain_error("quotient_rule_inverse_derivative: xi is zero");
  if (k.size() != xi.dim()) throw DimensionMismatch("quotient_rule_inverse_derivative: dimension mismatch");
  RationalFunction rf{MultiPoly::constant(xi.dim(), Rational(1)), xi};
  for (std::size_t i = 0; i < k.size(); ++i)
    for (unsigned rep = 0; rep < k[i]; ++rep)
      rf = {partial(rf.num, i) * rf.den - rf.num * partial(rf.den, i), rf.den * rf.den};
  return rf;
}

/// numerator / xi^p == rf exactly, by cross-multiplication.
inline bool same_rational_function(const InvPowerExpansion& e, const MultiPoly& xi, const RationalFunction& rf) {
  return e.numerator * rf.den == rf.num * pow(xi, e.denom_power);
}

using PointFunction = std::function<double(std::span<const double>)>;

struct LemtechReport {
  double B_hat = 0.0;
  double B_hat_refined = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double A3 = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

namespace detail {

struct LemtechScan {
  double B = 0.0, A1 = std::numeric_limits<double>::infinity(), A2 = 0.0, A3 = 0.0;
  std::size_t samples = 0;
};

inline LemtechScan lemtech_scan_once(const MultiPoly& xi, const PointFunction& eta, const InvPowerExpansion& e,
                                     unsigned order, const SampleGrid& grid) {
  const NumericPoly xin(xi);
  const NumericPoly numn(e.numerator);
  const auto grad = compile(gradient(xi));
  LemtechScan s;
  for (const auto& x : grid.ball_points(xi.dim())) {
    const double et = std::abs(eta(x));
    if (!(et > grid.exclusion) || et == 0.0) continue;
    const double xv = xin(x);
    double gx = 0.0;
    for (const auto& gi : grad) gx += gi(x) * gi(x);
    gx = std::sqrt(gx);
    s.A1 = std::min(s.A1, std::abs(xv) / (et * et));
    s.A2 = std::max(s.A2, std::abs(xv) / (et * et));
    s.A3 = std::max(s.A3, gx / et);
    if (xv == 0.0) continue;
    const double deriv = numn(x) / std::pow(xv, static_cast<double>(e.denom_power));
    s.B = std::max(s.B, std::abs(deriv) * std::pow(et, static_cast<double>(order) + 2.0));
    ++s.samples;
  }
  return s;
}

}  // namespace detail

/// Fits the hypothesis constants A1 |eta|^2 <= |xi| <= A2 |eta|^2,
/// |grad xi| <= A3 |eta| and the conclusion constant
/// B = max |d^k(1/xi)| |eta|^{|k|+2}. Throws std::domain_error when A1 fits to 0.
inline LemtechReport lemtech_bound_scan(const MultiPoly& xi, const PointFunction& eta, const Monomial& k,
                                        const SampleGrid& grid) {
  if (k.degree() < 1) throw std::invalid_argument("lemtech_bound_scan: requires |k| >= 1");
  const auto e = inv_power_expand(xi, k);
  const auto coarse = detail::lemtech_scan_once(xi, eta, e, k.degree(), grid);
  if (coarse.samples == 0) throw VerificationError("lemtech_bound_scan: no admissible samples");
  if (!(coarse.A1 > 0.0)) throw std::domain_error("lemtech_bound_scan: hypothesis failure, A1 fits to 0");
  const auto fine = detail::lemtech_scan_once(xi, eta, e, k.degree(), grid.refined());
  LemtechReport rep;
  rep.B_hat = coarse.B;
  rep.B_hat_refined = fine.B;
  rep.A1 = coarse.A1;
  rep.A2 = coarse.A2;
  rep.A3 = coarse.A3;
  rep.samples = coarse.samples;
  rep.pass = std::isfinite(coarse.B) && std::isfinite(fine.B) && fine.A1 > 0.0 &&
             fine.B < kRefinementGrowth * std::max(coarse.B, std::numeric_limits<double>::min());
  return rep;
}

inline LemtechReport lemtech_bound_scan(const MultiPoly& xi, const MultiPoly& eta, const Monomial& k,
                                        const SampleGrid& grid) {
  const NumericPoly etan(eta);
  return lemtech_bound_scan(xi, PointFunction([etan](std::span<const double> x) { return std::abs(etan(x)); }), k,
                            grid);
}

// ---------------------------------------------------------------------------
// Gradient comparability C3 |grad F| <= |grad f| <= C1 |grad F|

struct ComparabilityReport {
  double C1_hat = 0.0;
  double C3_hat = 0.0;
  double C1_hat_refined = 0.0;
  double C3_hat_refined = 0.0;
  bool pass = false;
};

namespace detail {

inline std::pair<double, double> comparability_once(const HomotopyField& field, const SampleGrid& grid) {
  double c1 = 0.0;
  double c3 = std::numeric_limits<double>::infinity();
  const auto xis = SampleGrid::axis(-1.0, 1.0, grid.points_per_axis);
  for (const auto& x : grid.points(field.n())) {
    const double gf = norm2(field.grad_f_at(x));
    for (double xi : xis) {
      const double gF = norm2(field.gradF(xi, x));
      if (gF * gF <= field.eps_sing()) continue;
      c1 = std::max(c1, gf / gF);
      c3 = std::min(c3, gf / gF);
    }
  }
  return {c1, c3};
}

}  // namespace detail

/// Samples |xi| <= 1 and the grid in x. Passes when C1_hat is finite, C3_hat
/// is positive and neither moves by a factor of 1.25 or more when the grid is
/// refined.
inline ComparabilityReport grad_comparability_scan(const HomotopyField& field, const SampleGrid& grid) {
  grid.validate();
  ComparabilityReport rep;
  std::tie(rep.C1_hat, rep.C3_hat) = detail::comparability_once(field, grid);
  std::tie(rep.C1_hat_refined, rep.C3_hat_refined) = detail::comparability_once(field, grid.refined());
  rep.pass = std::isfinite(rep.C1_hat) && rep.C1_hat > 0.0 && std::isfinite(rep.C3_hat) && rep.C3_hat > 0.0 &&
             rep.C1_hat_refined < kComparabilityDrift * rep.C1_hat &&
             rep.C3_hat_refined * kComparabilityDrift > rep.C3_hat;
  return rep;
}

// ---------------------------------------------------------------------------
// Decay of d^alpha X towards the critical set

struct ScalingPoint {
  double dist = 0.0;
  double magnitude = 0.0;
};

struct ScalingReport {
  Monomial alpha;  ///< over (xi, x_1, ..., x_n)
  double fitted_slope = 0.0;
  double required = 0.0;
  bool pass = false;
  bool identically_zero = false;
  std::vector<ScalingPoint> points;  ///< shell maxima used in the fit
  std::vector<ScalingPoint> cloud;   ///< every evaluated sample
};

struct ScalingOptions {
  int shells = 8;
  /// Samples closer to Z than radius * inner_fraction are ignored.
  double inner_fraction = 1.0 / 32.0;
  int xi_samples = 5;
  /// Magnitudes at or below this count as zero.
  double zero_floor = 1e-300;
};

namespace detail {

inline double binomial(unsigned n, unsigned k) {
  double r = 1.0;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// max_i |d^alpha X_i(xi, x)| by tensor-product central differences with step h.
inline double fd_max_derivative(const HomotopyField& field, const Monomial& alpha, double xi,
                                std::span<const double> x, double h) {
  const std::size_t dim = alpha.size();  // n + 1
  std::vector<double> acc(dim, 0.0);
  std::vector<unsigned> m(dim, 0);  // current stencil index per axis
  std::vector<double> pt(x.begin(), x.end());
  while (true) {
    double weight = 1.0;
    double sxi = xi;
    for (std::size_t j = 0; j < dim; ++j) {
      const double offset = (0.5 * alpha[j] - m[j]) * h;
      weight *= ((m[j] % 2) ? -1.0 : 1.0) * binomial(alpha[j], m[j]);
      if (j == 0) sxi = xi + offset;
      else pt[j - 1] = x[j - 1] + offset;
    }
    const auto X = field.X(sxi, pt);
    for (std::size_t i = 0; i < dim; ++i) acc[i] += weight * X[i];
    std::size_t j = 0;
    while (j < dim && ++m[j] > alpha[j]) m[j++] = 0;
    if (j == dim) break;
  }
  const double scale = std::pow(h, static_cast<double>(alpha.degree()));
  double best = 0.0;
  for (double a : acc) best = std::max(best, std::abs(a) / scale);
  return best;
}

}  // namespace detail

/// Fits log max_i |d^alpha X_i| against log dist(x, Z) over logarithmic
/// shells; passes when the slope reaches r + 1 - |alpha| minus 0.25.
/// Derivatives are central differences with step max(1e-6, 1e-3 dist).
inline ScalingReport step_scaling_check(const HomotopyField& field, const Monomial& alpha, const SampleGrid& grid,
                                        const PointSet& z_samples, const ScalingOptions& opts = {}) {
  if (alpha.size() != field.n() + 1)
    throw DimensionMismatch("step_scaling_check: alpha must have length n + 1 (xi first)");
  const unsigned r = field.germ().r;
  if (alpha.degree() > r) throw std::invalid_argument("step_scaling_check: requires |alpha| <= r");
  grid.validate();

  ScalingReport rep;
  rep.alpha = alpha;
  rep.required = static_cast<double>(r + 1) - alpha.degree();

  // Without sampled zeros, |grad f| / A (A the gradient's Lipschitz bound
  // on the grid) stands in as a lower bound for the distance.
  double lipschitz = 0.0;
  if (z_samples.empty()) {
    for (const auto& x : grid.ball_points(field.n())) {
      const double nx = norm2(x);
      if (nx > 0.0) lipschitz = std::max(lipschitz, norm2(field.grad_f_at(x)) / nx);
    }
  }
  auto dist_of = [&](std::span<const double> x) {
    if (!z_samples.empty()) return dist_to_Z_proxy(field, x, z_samples);
    return lipschitz > 0.0 ? norm2(field.grad_f_at(x)) / lipschitz : 0.0;
  };

  const double inner = grid.radius * opts.inner_fraction;
  const auto xis = SampleGrid::axis(-1.0, 1.0, opts.xi_samples);
  for (const auto& x : grid.ball_points(field.n())) {
    const double dist = dist_of(x);
    if (!(dist >= inner)) continue;
    const double h = std::max(1e-6, 1e-3 * dist);
    double mag = 0.0;
    for (double xi : xis) mag = std::max(mag, detail::fd_max_derivative(field, alpha, xi, x, h));
    rep.cloud.push_back({dist, mag});
  }
  if (rep.cloud.empty()) throw VerificationError("step_scaling_check: no samples outside the inner shell");

  double dmax = 0.0;
  for (const auto& p : rep.cloud) dmax = std::max(dmax, p.dist);
  const double lo = std::log(inner);
  const double width = (std::log(dmax) - lo) / opts.shells;
  std::vector<ScalingPoint> best(static_cast<std::size_t>(opts.shells));
  bool any_nonzero = false;
  for (const auto& p : rep.cloud) {
    auto b = width > 0.0 ? static_cast<int>((std::log(p.dist) - lo) / width) : 0;
    b = std::clamp(b, 0, opts.shells - 1);
    if (p.magnitude > best[static_cast<std::size_t>(b)].magnitude) best[static_cast<std::size_t>(b)] = p;
    any_nonzero = any_nonzero || p.magnitude > opts.zero_floor;
  }
  if (!any_nonzero) {
    rep.identically_zero = true;
    rep.fitted_slope = std::numeric_limits<double>::infinity();
    rep.pass = true;
    return rep;
  }
  std::vector<double> lx, ly;
  for (const auto& p : best) {
    if (p.magnitude <= opts.zero_floor) continue;
    rep.points.push_back(p);
    lx.push_back(std::log(p.dist));
    ly.push_back(std::log(p.magnitude));
  }
  if (rep.points.size() < 3) throw VerificationError("step_scaling_check: insufficient shell coverage");
  rep.fitted_slope = detail::ols_slope(lx, ly);
  rep.pass = rep.fitted_slope >= rep.required - kSlopeSlack;
  return rep;
}

/// Every alpha over (xi, x) with |alpha| <= max_order.
inline std::vector<Monomial> scaling_multi_indices(std::size_t n, unsigned max_order) {
  return multi_indices_up_to(n + 1, max_order);
}

}  // namespace germflow
