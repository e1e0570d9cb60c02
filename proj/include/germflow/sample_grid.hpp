#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace germflow {

enum class GridPattern { CubeGrid, SphereShells };

inline const char* to_string(GridPattern p) {
  return p == GridPattern::CubeGrid ? "cube-grid" : "sphere-shells";
}

/// Discretization of a neighbourhood of the origin.
///
/// CubeGrid is the tensor lattice with `points_per_axis` nodes on
/// [-radius, radius] per axis. SphereShells places `points_per_axis` shells at
/// radii radius*k/points_per_axis, each carrying the normalized directions of
/// a coarse cube lattice. `exclusion` is a context-dependent floor below which
/// scans skip a sample (|f|, |grad f|, ...).
struct SampleGrid {
  double radius = 0.3;
  int points_per_axis = 21;
  GridPattern pattern = GridPattern::CubeGrid;
  double exclusion = 0.0;

  void validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("SampleGrid: radius must be positive");
    if (points_per_axis < 3) throw std::invalid_argument("SampleGrid: points_per_axis must be >= 3");
  }

  /// Same pattern with the lattice spacing halved.
  SampleGrid refined() const {
    SampleGrid g = *this;
    g.points_per_axis = 2 * (points_per_axis - 1) + 1;
    return g;
  }

  /// Node coordinates of one axis: points_per_axis values spanning [lo, hi].
  static std::vector<double> axis(double lo, double hi, int count) {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
      // Symmetric construction keeps the midpoint exactly zero for odd counts.
      const double s = static_cast<double>(2 * k - (count - 1)) / static_cast<double>(count - 1);
      v[static_cast<std::size_t>(k)] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * s;
    }
    return v;
  }

  /// All sample points in R^n.
  std::vector<std::vector<double>> points(std::size_t n) const {
    validate();
    if (n == 0) throw std::invalid_argument("SampleGrid: dimension must be positive");
    if (pattern == GridPattern::CubeGrid) return lattice(n, radius, points_per_axis);

    std::vector<std::vector<double>> dirs;
    const int dir_count = n == 1 ? 3 : std::max(5, (points_per_axis / 2) | 1);
    for (auto p : lattice(n, 1.0, dir_count)) {
      double norm = 0.0;
      for (double c : p) norm += c * c;
      norm = std::sqrt(norm);
      if (norm == 0.0) continue;
      for (double& c : p) c /= norm;
      dirs.push_back(std::move(p));
    }
    std::vector<std::vector<double>> out;
    for (int k = 1; k <= points_per_axis; ++k) {
      const double rho = radius * k / points_per_axis;
      for (const auto& d : dirs) {
        std::vector<double> p(d);
        for (double& c : p) c *= rho;
        out.push_back(std::move(p));
      }
    }
    return out;
  }

  /// Sample points restricted to the closed Euclidean ball of `radius`.
  std::vector<std::vector<double>> ball_points(std::size_t n) const {
    std::vector<std::vector<double>> out;
    const double limit = radius * radius * (1.0 + 1e-12);
    for (auto& p : points(n)) {
      double r2 = 0.0;
      for (double c : p) r2 += c * c;
      if (r2 <= limit) out.push_back(std::move(p));
    }
    return out;
  }

 private:
  static std::vector<std::vector<double>> lattice(std::size_t n, double radius, int count) {
    const auto ax = axis(-radius, radius, count);
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = ax[idx[i]];
      out.push_back(std::move(p));
      std::size_t i = 0;
      while (i < n && ++idx[i] == ax.size()) idx[i++] = 0;
      if (i == n) break;
    }
    return out;
  }
};

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

}  // namespace germflow
