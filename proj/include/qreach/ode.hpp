#pragma once

// Explicit initial-value integrators over Eigen vector states: classical
// fixed-step RK4 and the embedded Dormand-Prince 5(4) pair, both recording a
// trajectory with cubic Hermite dense output.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qreach/errors.hpp"

namespace qreach::ode {

enum class Method { Rk4, DormandPrince };

struct IntegratorConfig {
  Method method = Method::DormandPrince;
  double step = 1e-3;  ///< fixed step for Rk4
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 10'000'000;

  void validate() const {
    if (method == Method::Rk4 && !(step > 0)) throw std::invalid_argument("IntegratorConfig: step must be > 0");
    if (method == Method::DormandPrince && !(abs_tol > 0 && rel_tol > 0))
      throw std::invalid_argument("IntegratorConfig: tolerances must be > 0");
    if (!(max_step > 0)) throw std::invalid_argument("IntegratorConfig: max_step must be > 0");
    if (max_steps == 0) throw std::invalid_argument("IntegratorConfig: max_steps must be > 0");
  }

  static IntegratorConfig fixed(double h) {
    IntegratorConfig c;
    c.method = Method::Rk4;
    c.step = h;
    return c;
  }
  static IntegratorConfig adaptive(double tol) {
    IntegratorConfig c;
    c.abs_tol = c.rel_tol = tol;
    return c;
  }
};

/// Samples of a solution on a strictly increasing time grid starting at 0,
/// with the state derivative stored at every node for Hermite interpolation.
template <class State>
class Trajectory {
 public:
  void push(double t, const State& y, const State& dy) {
    if (times_.empty()) {
      if (t != 0) throw std::invalid_argument("Trajectory: first time must be 0");
    } else if (!(t > times_.back())) {
      throw std::invalid_argument("Trajectory: times must be strictly increasing");
    }
    times_.push_back(t);
    states_.push_back(y);
    derivs_.push_back(dy);
  }

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  double end_time() const { return times_.back(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<State>& states() const noexcept { return states_; }
  const std::vector<State>& derivatives() const noexcept { return derivs_; }
  const State& back() const { return states_.back(); }

  /// Cubic Hermite interpolation between the bracketing nodes.
  State at(double t) const {
    if (times_.empty()) throw std::logic_error("Trajectory::at on empty trajectory");
    if (t <= times_.front()) return states_.front();
    if (t >= times_.back()) return states_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
    return hermite(k, t);
  }

  /// Interpolated derivative (derivative of the Hermite cubic).
  State derivative_at(double t) const {
    if (t <= times_.front()) return derivs_.front();
    if (t >= times_.back()) return derivs_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double h = times_[k + 1] - times_[k];
    const double s = (t - times_[k]) / h;
    const double d00 = (6 * s * s - 6 * s) / h, d10 = 3 * s * s - 4 * s + 1;
    const double d01 = (-6 * s * s + 6 * s) / h, d11 = 3 * s * s - 2 * s;
    return d00 * states_[k] + d10 * derivs_[k] + d01 * states_[k + 1] + d11 * derivs_[k + 1];
  }

 private:
  State hermite(std::size_t k, double t) const {
    const double h = times_[k + 1] - times_[k];
    const double s = (t - times_[k]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * states_[k] + (h10 * h) * derivs_[k] + h01 * states_[k + 1] + (h11 * h) * derivs_[k + 1];
  }

  std::vector<double> times_;
  std::vector<State> states_;
  std::vector<State> derivs_;
};

/// Returned by a step hook after every accepted step.
enum class StepAction { Continue, Modified, Stop };

struct NoHook {
  template <class State>
  StepAction operator()(double, State&) const noexcept {
    return StepAction::Continue;
  }
};

namespace detail {

template <class Rhs, class State>
State eval(Rhs& rhs, double t, const State& y) {
  try {
    State dy = rhs(t, y);
    if (!dy.allFinite()) throw IntegrationError("non-finite derivative at t=" + std::to_string(t), t);
    return dy;
  } catch (const IntegrationError&) {
    throw;
  } catch (const std::exception& e) {
    throw IntegrationError(std::string(e.what()) + " (at t=" + std::to_string(t) + ")", t);
  }
}

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, double atol, double rtol) {
  const auto scale = (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
  return (err.array().abs() / scale).maxCoeff();
}

// Dormand-Prince 5(4) tableau.
struct DP {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

/// Integrates y' = rhs(t, y) on [0, T]. The hook runs after every accepted
/// step; it may modify the state (the derivative is then recomputed) or stop
/// the integration early.
template <class State, class Rhs, class Hook = NoHook>
Trajectory<State> integrate(Rhs&& rhs, const State& y0, double T, const IntegratorConfig& cfg,
                            Hook&& hook = Hook{}) {
  if (!(T > 0)) throw std::invalid_argument("integrate: T must be > 0");
  cfg.validate();

  Trajectory<State> traj;
  double t = 0;
  State y = y0;
  State f = detail::eval(rhs, t, y);
  traj.push(t, y, f);

  auto after_step = [&](double tn, State& yn, State& fn) -> bool {
    const StepAction act = hook(tn, yn);
    if (act == StepAction::Modified) fn = detail::eval(rhs, tn, yn);
    traj.push(tn, yn, fn);
    return act != StepAction::Stop;
  };

  std::size_t steps = 0;
  if (cfg.method == Method::Rk4) {
    while (t < T) {
      if (++steps > cfg.max_steps) throw IntegrationError("step limit exceeded", t);
      double h = std::min(cfg.step, cfg.max_step);
      if (t + h >= T || T - (t + h) < 1e-12 * h) h = T - t;
      const State k1 = f;
      const State k2 = detail::eval(rhs, t + h / 2, (y + (h / 2) * k1).eval());
      const State k3 = detail::eval(rhs, t + h / 2, (y + (h / 2) * k2).eval());
      const State k4 = detail::eval(rhs, t + h, (y + h * k3).eval());
      State yn = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
      const double tn = (h == T - t) ? T : t + h;
      State fn = detail::eval(rhs, tn, yn);
      y = std::move(yn);
      f = std::move(fn);
      t = tn;
      if (!after_step(t, y, f)) break;
    }
    return traj;
  }

  using DP = detail::DP;
  const double atol = cfg.abs_tol, rtol = cfg.rel_tol;
  // Initial step from the derivative scale.
  double h;
  {
    const double d0 = detail::error_norm(y, y, y, atol, rtol);
    const double d1 = detail::error_norm(f, y, y, atol, rtol);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, cfg.max_step, T});
    h = std::max(h, 1e-12 * std::max(1.0, T));
  }
  while (t < T) {
    if (++steps > cfg.max_steps) throw IntegrationError("step limit exceeded", t);
    bool last = false;
    if (t + h >= T || T - (t + h) < 1e-12 * std::max(1.0, T)) {
      h = T - t;
      last = true;
    }
    const State& k1 = f;
    const State k2 = detail::eval(rhs, t + DP::c2 * h, (y + h * (DP::a21 * k1)).eval());
    const State k3 = detail::eval(rhs, t + DP::c3 * h, (y + h * (DP::a31 * k1 + DP::a32 * k2)).eval());
    const State k4 =
        detail::eval(rhs, t + DP::c4 * h, (y + h * (DP::a41 * k1 + DP::a42 * k2 + DP::a43 * k3)).eval());
    const State k5 = detail::eval(
        rhs, t + DP::c5 * h, (y + h * (DP::a51 * k1 + DP::a52 * k2 + DP::a53 * k3 + DP::a54 * k4)).eval());
    const State k6 = detail::eval(
        rhs, t + h,
        (y + h * (DP::a61 * k1 + DP::a62 * k2 + DP::a63 * k3 + DP::a64 * k4 + DP::a65 * k5)).eval());
    State yn = y + h * (DP::b1 * k1 + DP::b3 * k3 + DP::b4 * k4 + DP::b5 * k5 + DP::b6 * k6);
    const double tn = last ? T : t + h;
    State k7 = detail::eval(rhs, tn, yn);
    const State err =
        h * (DP::e1 * k1 + DP::e3 * k3 + DP::e4 * k4 + DP::e5 * k5 + DP::e6 * k6 + DP::e7 * k7);
    const double en = detail::error_norm(err, y, yn, atol, rtol);
    if (!std::isfinite(en)) throw IntegrationError("non-finite error estimate", t);
    if (en <= 1.0) {
      y = std::move(yn);
      f = std::move(k7);
      t = tn;
      if (!after_step(t, y, f)) break;
      const double fac = (en == 0) ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h = std::min(h * fac, cfg.max_step);
    } else {
      h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 1.0);
      if (h < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError("step size underflow", t);
    }
  }
  return traj;
}

}  // namespace qreach::ode
