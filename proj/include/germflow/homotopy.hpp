#pragma once

// The homotopy F(xi, x) = f(x) + xi * d(x), d = g - f, and the fields built
// from it:
//
//   X(xi, x) = d(x) * grad F / |grad F|^2     (0 where |grad F|^2 <= eps_sing)
//   W(xi, x) = (X_2, ..., X_{n+1}) / (X_1 - 1)
//
// Along solutions of dy/dt = W(t, y) the value F(t, y(t)) is constant, since
// <grad_x F, X_x> = d (1 - X_1).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "germflow/germ.hpp"
#include "germflow/poly.hpp"
#include "germflow/sample_grid.hpp"
#include "germflow/zero_set.hpp"

namespace germflow {

inline constexpr double kDefaultEpsSing = 1e-24;
inline constexpr double kSlabHalfWidth = 3.0;
inline constexpr double kGapThreshold = 0.5;

/// Raised when |X_1 - 1| <= 1/2, i.e. W leaves the region where it is
/// guaranteed to be defined.
class GapViolation : public std::runtime_error {
 public:
  GapViolation(double xi, std::vector<double> x, double gap)
      : std::runtime_error(describe(xi, x, gap)), xi_(xi), x_(std::move(x)), gap_(gap) {}

  double xi() const noexcept { return xi_; }
  const std::vector<double>& x() const noexcept { return x_; }
  double gap() const noexcept { return gap_; }

 private:
  static std::string describe(double xi, const std::vector<double>& x, double gap) {
    std::ostringstream os;
    os.precision(6);
    os << "gap violation |X1 - 1| = " << gap << " <= 1/2 at xi = " << xi << ", x = (";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
  }

  double xi_;
  std::vector<double> x_;
  double gap_;
};

struct FieldSample {
  double xi = 0.0;
  std::vector<double> x;
  double F = 0.0;
  std::vector<double> gradF;
  std::vector<double> X;
  std::optional<std::vector<double>> W;
  bool on_cutoff = false;
};

class HomotopyField {
 public:
  explicit HomotopyField(GermCase germ, double eps_sing = kDefaultEpsSing)
      : germ_(std::move(germ)),
        d_(germ_.g - germ_.f),
        grad_f_(gradient(germ_.f)),
        grad_d_(gradient(d_)),
        eps_sing_(eps_sing),
        fn_(germ_.f),
        gn_(germ_.g),
        dn_(d_),
        grad_fn_(compile(grad_f_)),
        grad_dn_(compile(grad_d_)) {
    if (!(eps_sing > 0.0)) throw std::invalid_argument("HomotopyField: eps_sing must be positive");
  }

  const GermCase& germ() const noexcept { return germ_; }
  std::size_t n() const noexcept { return germ_.n(); }
  const MultiPoly& d() const noexcept { return d_; }
  const std::vector<MultiPoly>& grad_f() const noexcept { return grad_f_; }
  const std::vector<MultiPoly>& grad_d() const noexcept { return grad_d_; }
  double eps_sing() const noexcept { return eps_sing_; }
  double delta() const noexcept { return kSlabHalfWidth; }

  double f(std::span<const double> x) const { return fn_(check(x)); }
  double g(std::span<const double> x) const { return gn_(check(x)); }
  double d(std::span<const double> x) const { return dn_(check(x)); }

  std::vector<double> grad_f_at(std::span<const double> x) const {
    check(x);
    std::vector<double> out(n());
    for (std::size_t i = 0; i < n(); ++i) out[i] = grad_fn_[i](x);
    return out;
  }

  double F(double xi, std::span<const double> x) const { return fn_(check(x)) + xi * dn_(x); }

  std::vector<double> gradF(double xi, std::span<const double> x) const {
    check(x);
    std::vector<double> out(n() + 1);
    out[0] = dn_(x);
    for (std::size_t i = 0; i < n(); ++i) out[i + 1] = grad_fn_[i](x) + xi * grad_dn_[i](x);
    return out;
  }

  std::vector<double> X(double xi, std::span<const double> x) const { return X_from(gradF(xi, x)); }

  /// Throws GapViolation when |X_1 - 1| <= 1/2.
  std::vector<double> W(double xi, std::span<const double> x) const {
    return W_from(xi, x, X(xi, x));
  }

  FieldSample sample(double xi, std::span<const double> x) const {
    FieldSample s;
    s.xi = xi;
    s.x.assign(x.begin(), x.end());
    s.F = F(xi, x);
    s.gradF = gradF(xi, x);
    s.on_cutoff = squared_norm(s.gradF) <= eps_sing_;
    s.X = X_from(s.gradF);
    if (std::abs(s.X[0] - 1.0) > kGapThreshold) s.W = W_from(xi, x, s.X);
    return s;
  }

 private:
  std::span<const double> check(std::span<const double> x) const {
    if (x.size() != n())
      throw DimensionMismatch("homotopy: point has length " + std::to_string(x.size()) + ", expected " +
                              std::to_string(n()));
    return x;
  }

  static double squared_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return s;
  }

  std::vector<double> X_from(std::vector<double> grad) const {
    const double norm2 = squared_norm(grad);
    if (norm2 <= eps_sing_) {
      std::fill(grad.begin(), grad.end(), 0.0);
      return grad;
    }
    const double scale = grad[0] / norm2;  // grad[0] == d(x)
    for (double& c : grad) c *= scale;
    return grad;
  }

  std::vector<double> W_from(double xi, std::span<const double> x, const std::vector<double>& X) const {
    const double gap = std::abs(X[0] - 1.0);
    if (!(gap > kGapThreshold)) throw GapViolation(xi, std::vector<double>(x.begin(), x.end()), gap);
    const double denom = X[0] - 1.0;
    std::vector<double> out(n());
    for (std::size_t i = 0; i < n(); ++i) out[i] = X[i + 1] / denom;
    return out;
  }

  GermCase germ_;
  MultiPoly d_;
  std::vector<MultiPoly> grad_f_;
  std::vector<MultiPoly> grad_d_;
  double eps_sing_;
  NumericPoly fn_, gn_, dn_;
  std::vector<NumericPoly> grad_fn_, grad_dn_;
};

inline double F_eval(const HomotopyField& field, double xi, std::span<const double> x) { return field.F(xi, x); }
inline std::vector<double> gradF_eval(const HomotopyField& field, double xi, std::span<const double> x) {
  return field.gradF(xi, x);
}
inline std::vector<double> X_eval(const HomotopyField& field, double xi, std::span<const double> x) {
  return field.X(xi, x);
}
inline std::vector<double> W_eval(const HomotopyField& field, double xi, std::span<const double> x) {
  return field.W(xi, x);
}

/// Distance proxy to the critical set Z from sampled points of Z.
inline double dist_to_Z_proxy(const HomotopyField& field, std::span<const double> x, const PointSet& z_samples) {
  if (x.size() != field.n()) throw DimensionMismatch("dist_to_Z_proxy: dimension mismatch");
  return distance_to_samples(x, z_samples);
}

/// Samples of Z = {grad f = 0} in the grid's ball. The origin is included
/// whenever grad f(0) = 0 holds exactly.
inline PointSet critical_set_samples(const HomotopyField& field, const SampleGrid& grid) {
  PointSet z = zero_sample(field.grad_f(), grid);
  const bool origin_critical =
      std::all_of(field.grad_f().begin(), field.grad_f().end(), [](const MultiPoly& p) { return p.constant_term() == 0; });
  if (origin_critical) {
    const bool has_origin = std::any_of(z.begin(), z.end(), [](const auto& p) { return norm2(p) == 0.0; });
    if (!has_origin) z.insert(z.begin(), std::vector<double>(field.n(), 0.0));
  }
  return z;
}

struct DomainCertificate {
  double radius = 0.0;
  SampleGrid grid;
  double min_gap = std::numeric_limits<double>::infinity();
  double C1_hat = 0.0;
  double C3_hat = std::numeric_limits<double>::infinity();
  double A_hat = 0.0;
  std::size_t samples = 0;
  bool ok = false;
};

/// Empirical stand-in for shrinking the neighbourhood: samples
/// |xi| <= 1, |x|_inf <= radius and records the gap and the constants of the
/// gradient comparisons.
inline DomainCertificate certify_domain(const HomotopyField& field, double radius, const SampleGrid& grid) {
  if (!(radius > 0.0)) throw std::invalid_argument("certify_domain: radius must be positive");
  DomainCertificate cert;
  cert.radius = radius;
  cert.grid = grid;
  cert.grid.radius = radius;
  cert.grid.validate();

  const auto xs = cert.grid.points(field.n());
  const auto xis = SampleGrid::axis(-1.0, 1.0, cert.grid.points_per_axis);
  for (const auto& x : xs) {
    const double gf = norm2(field.grad_f_at(x));
    for (double xi : xis) {
      const auto grad = field.gradF(xi, x);
      const double gF = norm2(grad);
      const auto X = field.X(xi, x);
      cert.min_gap = std::min(cert.min_gap, std::abs(X[0] - 1.0));
      ++cert.samples;
      if (gF * gF <= field.eps_sing()) continue;
      cert.C1_hat = std::max(cert.C1_hat, gf / gF);
      cert.C3_hat = std::min(cert.C3_hat, gf / gF);
    }
  }

  const PointSet z = critical_set_samples(field, cert.grid);
  for (const auto& x : xs) {
    const double dist = distance_to_samples(x, z);
    if (dist > 0.0) cert.A_hat = std::max(cert.A_hat, norm2(field.grad_f_at(x)) / dist);
  }
  cert.ok = cert.min_gap > kGapThreshold;
  return cert;
}

}  // namespace germflow
