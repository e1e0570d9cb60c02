#pragma once

// Sampling of real zero sets {p_1 = ... = p_k = 0} near the origin. Every
// grid seed is polished by damped Newton steps on the merit |p|^2; the
// minimum-norm step lets seeds slide onto positive-dimensional components
// instead of collapsing onto their singular points.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "germflow/poly.hpp"
#include "germflow/sample_grid.hpp"

namespace germflow {

using PointSet = std::vector<std::vector<double>>;

struct ZeroSampleOptions {
  int max_iterations = 200;
  /// Accept a polished point when |p(z)| falls below this.
  double accept_residual = 1e-20;
};

inline PointSet zero_sample(const std::vector<MultiPoly>& system, const SampleGrid& grid,
                            const ZeroSampleOptions& opts = {}) {
  if (system.empty()) throw std::invalid_argument("zero_sample: empty system");
  const std::size_t n = system.front().dim();
  for (const auto& p : system)
    if (p.dim() != n) throw DimensionMismatch("zero_sample: system polynomials differ in dimension");

  const std::vector<NumericPoly> eqs = compile(system);
  std::vector<std::vector<NumericPoly>> jac;
  for (const auto& p : system) jac.push_back(compile(gradient(p)));

  // Merit S = |p|^2 and its gradient 2 J^T p.
  auto merit = [&](std::span<const double> z) {
    double s = 0.0;
    for (const auto& e : eqs) {
      const double v = e(z);
      s += v * v;
    }
    return s;
  };
  auto merit_grad = [&](std::span<const double> z) {
    std::vector<double> gs(n, 0.0);
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      const double v = eqs[i](z);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) gs[j] += 2.0 * v * jac[i][j](z);
    }
    return gs;
  };

  const double spacing = 2.0 * grid.radius / (grid.points_per_axis - 1);
  const double merge_tol = 1e-3 * spacing;
  const double ball2 = grid.radius * grid.radius * (1.0 + 1e-9);
  const double accept2 = opts.accept_residual * opts.accept_residual;

  PointSet found;
  std::vector<double> trial(n);
  for (auto z : grid.ball_points(n)) {
    double s = merit(z);
    for (int it = 0; it < opts.max_iterations && s > 0.0; ++it) {
      // Minimum-norm Newton step for the scalar equation S(z) = 0.
      const auto gs = merit_grad(z);
      double gg = 0.0;
      for (double c : gs) gg += c * c;
      if (!(gg > 0.0) || !std::isfinite(gg)) break;
      double t = 1.0;
      bool improved = false;
      while (t > 1e-12) {
        for (std::size_t j = 0; j < n; ++j) trial[j] = z[j] - t * s * gs[j] / gg;
        const double st = merit(trial);
        if (st < s) {
          z = trial;
          s = st;
          improved = true;
          break;
        }
        t *= 0.5;
      }
      if (!improved) break;
    }
    if (s > accept2) continue;
    double z2 = 0.0;
    for (double c : z) z2 += c * c;
    if (z2 > ball2) continue;
    const bool duplicate = std::any_of(found.begin(), found.end(), [&](const auto& q) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) d2 += (q[j] - z[j]) * (q[j] - z[j]);
      return d2 <= merge_tol * merge_tol;
    });
    if (!duplicate) found.push_back(std::move(z));
  }
  return found;
}

/// Euclidean distance from x to the nearest sample; 1 for an empty set.
inline double distance_to_samples(std::span<const double> x, const PointSet& samples) {
  if (samples.empty()) return 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : samples) {
    if (z.size() != x.size()) throw DimensionMismatch("distance_to_samples: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) d2 += (x[j] - z[j]) * (x[j] - z[j]);
    best = std::min(best, d2);
  }
  return std::sqrt(best);
}

}  // namespace germflow
