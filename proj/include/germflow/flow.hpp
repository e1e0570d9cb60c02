#pragma once

// Integration of dy/dt = W(t, y) on [0, 1] with the Dormand-Prince 5(4) pair.
// phi(x) = y_x(1); phi_inverse runs the time-reversed field from t = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "germflow/homotopy.hpp"

namespace germflow {

struct FlowConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_min = 1e-12;
  long max_steps = 100000;

  void validate() const {
    if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("FlowConfig: rtol and atol must be positive");
    if (!(h_min > 0.0) || !(h_min < h_init)) throw std::invalid_argument("FlowConfig: need 0 < h_min < h_init");
    if (max_steps <= 0) throw std::invalid_argument("FlowConfig: max_steps must be positive");
  }
};

enum class FlowStatus { Completed, GapViolation, StepUnderflow, MaxSteps };

inline const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::Completed: return "completed";
    case FlowStatus::GapViolation: return "gap_violation";
    case FlowStatus::StepUnderflow: return "step_underflow";
    case FlowStatus::MaxSteps: return "max_steps";
  }
  return "unknown";
}

struct TrajectoryState {
  double t = 0.0;
  std::vector<double> y;
  double F_value = 0.0;
  double step = 0.0;
};

/// Accepted states of one integration. For a reversed run `t` holds the
/// integration variable s = 1 - t_physical while F_value is F(1 - s, y).
struct Trajectory {
  std::vector<TrajectoryState> states;
  FlowStatus status = FlowStatus::Completed;
  bool reversed = false;
  long attempts = 0;
  long rejected = 0;
  std::string message;

  bool completed() const { return status == FlowStatus::Completed; }
  const std::vector<double>& endpoint() const { return states.back().y; }
};

class FlowError : public std::runtime_error {
 public:
  explicit FlowError(Trajectory traj)
      : std::runtime_error(std::string("flow did not complete: ") + to_string(traj.status) +
                           (traj.message.empty() ? "" : " (" + traj.message + ")")),
        traj_(std::move(traj)) {}
  const Trajectory& trajectory() const noexcept { return traj_; }
  FlowStatus status() const noexcept { return traj_.status; }

 private:
  Trajectory traj_;
};

namespace detail {

// Dormand & Prince (1980), RK5(4)7M.
struct DoPri {
  static constexpr std::array<double, 7> c{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr std::array<double, 7> b{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                                           11.0 / 84, 0.0};
  // b - b_hat (fifth minus fourth order weights).
  static constexpr std::array<double, 7> e{71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                           -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
};

inline constexpr double kSafety = 0.9;
inline constexpr double kMinFactor = 0.2;
inline constexpr double kMaxFactor = 5.0;
inline constexpr double kPiBeta = 0.04;
inline constexpr double kPiAlpha = 0.2 - 0.75 * kPiBeta;

/// Adaptive integration of y' = rhs(t, y) over t in [0, 1]. `record(t, y)`
/// supplies the F value stored with each accepted state.
template <class Rhs, class Record>
Trajectory dopri_integrate(Rhs&& rhs, Record&& record, std::vector<double> y, const FlowConfig& cfg) {
  cfg.validate();
  const std::size_t n = y.size();
  using Vec = std::vector<double>;
  Trajectory traj;
  traj.states.push_back({0.0, y, record(0.0, y), 0.0});

  auto axpy = [n](const Vec& base, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
    Vec out(base);
    for (const auto& [coef, k] : terms)
      if (coef != 0.0)
        for (std::size_t i = 0; i < n; ++i) out[i] += h * coef * (*k)[i];
    return out;
  };

  double t = 0.0;
  double h = cfg.h_init;
  double err_old = 1e-4;
  bool last_rejected = false;
  try {
    Vec k1 = rhs(t, y);
    while (t < 1.0) {
      if (traj.attempts >= cfg.max_steps) {
        traj.status = FlowStatus::MaxSteps;
        return traj;
      }
      const double remaining = 1.0 - t;
      if (h < cfg.h_min && remaining > cfg.h_min) {
        traj.status = FlowStatus::StepUnderflow;
        return traj;
      }
      // Avoid leaving a sliver shorter than h_min for the final step.
      if (h >= remaining || remaining - h < cfg.h_min) h = remaining;
      ++traj.attempts;

      using D = DoPri;
      const Vec k2 = rhs(t + D::c[1] * h, axpy(y, h, {{D::a21, &k1}}));
      const Vec k3 = rhs(t + D::c[2] * h, axpy(y, h, {{D::a31, &k1}, {D::a32, &k2}}));
      const Vec k4 = rhs(t + D::c[3] * h, axpy(y, h, {{D::a41, &k1}, {D::a42, &k2}, {D::a43, &k3}}));
      const Vec k5 =
          rhs(t + D::c[4] * h, axpy(y, h, {{D::a51, &k1}, {D::a52, &k2}, {D::a53, &k3}, {D::a54, &k4}}));
      const Vec k6 = rhs(t + D::c[5] * h,
                         axpy(y, h, {{D::a61, &k1}, {D::a62, &k2}, {D::a63, &k3}, {D::a64, &k4}, {D::a65, &k5}}));
      const double t_new = (h == remaining) ? 1.0 : t + h;
      Vec y_new = axpy(y, h, {{D::b[0], &k1}, {D::b[2], &k3}, {D::b[3], &k4}, {D::b[4], &k5}, {D::b[5], &k6}});
      Vec k7 = rhs(t_new, y_new);

      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double ei = h * (D::e[0] * k1[i] + D::e[2] * k3[i] + D::e[3] * k4[i] + D::e[4] * k5[i] +
                               D::e[5] * k6[i] + D::e[6] * k7[i]);
        const double scale = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err = std::max(err, std::abs(ei) / scale);
      }
      if (!std::isfinite(err)) {
        h *= kMinFactor;
        ++traj.rejected;
        last_rejected = true;
        continue;
      }

      if (err <= 1.0) {
        double factor = err == 0.0 ? kMaxFactor
                                   : kSafety * std::pow(err, -kPiAlpha) * std::pow(err_old, kPiBeta);
        factor = std::clamp(factor, kMinFactor, kMaxFactor);
        if (last_rejected) factor = std::min(factor, 1.0);
        err_old = std::max(err, 1e-4);
        t = t_new;
        y = std::move(y_new);
        k1 = std::move(k7);
        traj.states.push_back({t, y, record(t, y), h});
        h *= factor;
        last_rejected = false;
      } else {
        h *= std::max(kMinFactor, kSafety * std::pow(err, -0.2));
        ++traj.rejected;
        last_rejected = true;
      }
    }
  } catch (const GapViolation& gv) {
    traj.status = FlowStatus::GapViolation;
    traj.message = gv.what();
    return traj;
  }
  traj.status = FlowStatus::Completed;
  return traj;
}

}  // namespace detail

/// Solution of dy/dt = W(t, y), y(0) = x0, on [0, 1].
inline Trajectory integrate(const HomotopyField& field, std::span<const double> x0, const FlowConfig& cfg = {}) {
  if (x0.size() != field.n()) throw DimensionMismatch("integrate: starting point dimension mismatch");
  return detail::dopri_integrate([&](double t, const std::vector<double>& y) { return field.W(t, y); },
                                 [&](double t, const std::vector<double>& y) { return field.F(t, y); },
                                 std::vector<double>(x0.begin(), x0.end()), cfg);
}

/// Backward solution from y(1) = x to t = 0, as ds-integration of -W(1 - s, .).
inline Trajectory integrate_reversed(const HomotopyField& field, std::span<const double> x,
                                     const FlowConfig& cfg = {}) {
  if (x.size() != field.n()) throw DimensionMismatch("integrate_reversed: starting point dimension mismatch");
  auto traj = detail::dopri_integrate(
      [&](double s, const std::vector<double>& y) {
        auto w = field.W(1.0 - s, y);
        for (double& c : w) c = -c;
        return w;
      },
      [&](double s, const std::vector<double>& y) { return field.F(1.0 - s, y); },
      std::vector<double>(x.begin(), x.end()), cfg);
  traj.reversed = true;
  return traj;
}

/// max_k |F_k - F_0| over recorded states.
inline double conservation_drift(const Trajectory& traj) {
  if (traj.states.empty()) return 0.0;
  const double f0 = traj.states.front().F_value;
  double drift = 0.0;
  for (const auto& s : traj.states) drift = std::max(drift, std::abs(s.F_value - f0));
  return drift;
}

struct PhiResult {
  std::vector<double> y;
  double drift = 0.0;
  Trajectory trajectory;
};

/// phi(x) = y_x(1). Throws FlowError if the integration does not complete.
inline PhiResult phi(const HomotopyField& field, std::span<const double> x, const FlowConfig& cfg = {}) {
  Trajectory traj = integrate(field, x, cfg);
  if (!traj.completed()) throw FlowError(std::move(traj));
  PhiResult out;
  out.y = traj.endpoint();
  out.drift = conservation_drift(traj);
  out.trajectory = std::move(traj);
  return out;
}

inline std::vector<double> phi_inverse(const HomotopyField& field, std::span<const double> x,
                                       const FlowConfig& cfg = {}) {
  Trajectory traj = integrate_reversed(field, x, cfg);
  if (!traj.completed()) throw FlowError(std::move(traj));
  return traj.endpoint();
}

/// |g(phi(x)) - f(x)|.
inline double equivalence_residual(const HomotopyField& field, std::span<const double> x,
                                   const FlowConfig& cfg = {}) {
  const auto result = phi(field, x, cfg);
  return std::abs(field.g(result.y) - field.f(x));
}

}  // namespace germflow
