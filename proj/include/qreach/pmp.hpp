#pragma once

// Time-optimal extremals of the meridian-plane system in rescaled time
// tau = omega t. The costate (p, q) is conjugate to (z, R); the control angle
// theta maximizes the Hamiltonian and is carried as a fifth state variable
// whose derivative follows from differentiating the stationarity condition.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qreach/bloch.hpp"
#include "qreach/ode.hpp"
#include "qreach/schedule.hpp"

namespace qreach {

template <typename Scalar>
using Vec5 = Eigen::Matrix<Scalar, 5, 1>;

template <typename Scalar>
struct ExtremalState {
  Scalar z{0};
  Scalar R{0};
  Scalar p{0};
  Scalar q{0};
  Scalar theta{0};

  Vec5<Scalar> vector() const { return {z, R, p, q, theta}; }
  static ExtremalState from(const Vec5<Scalar>& v) { return {v(0), v(1), v(2), v(3), v(4)}; }
};

/// Maps a state with R < 0 to its mirror (z, -R, p, -q, theta + pi), which the
/// Hamiltonian system carries to the mirrored trajectory. theta is wrapped to [0, 2 pi).
template <typename Scalar>
ExtremalState<Scalar> fold(ExtremalState<Scalar> s) {
  if (s.R < 0) {
    s.R = -s.R;
    s.q = -s.q;
    s.theta += std::numbers::pi_v<Scalar>;
  }
  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  s.theta = std::fmod(s.theta, two_pi);
  if (s.theta < 0) s.theta += two_pi;
  return s;
}

/// (z', R') of the meridian-plane system in rescaled time.
template <typename Scalar>
Vec2<Scalar> scaled_aux_rhs(Scalar z, Scalar R, Scalar theta, Scalar ratio) {
  const Scalar co = std::cos(theta);
  return {-ratio * z / 2 - R * co,
          z * co - ratio * R * (3 - std::cos(2 * theta)) / 4 + ratio * std::sin(theta)};
}

template <typename Scalar>
Scalar hamiltonian(const ExtremalState<Scalar>& s, const SystemParams<Scalar>& params) {
  const Vec2<Scalar> v = scaled_aux_rhs(s.z, s.R, s.theta, params.ratio());
  return s.p * v(0) + s.q * v(1);
}

/// dH/dtheta at fixed (z, R, p, q).
template <typename Scalar>
Scalar hamiltonian_dtheta(const ExtremalState<Scalar>& s, const SystemParams<Scalar>& params) {
  const Scalar e = params.ratio();
  const Scalar st = std::sin(s.theta), ct = std::cos(s.theta);
  return (s.p * s.R - s.q * s.z) * st - e * s.q * s.R * st * ct + e * s.q * ct;
}

/// d2H/dtheta2; negative at a nondegenerate maximum.
template <typename Scalar>
Scalar hamiltonian_dtheta2(const ExtremalState<Scalar>& s, const SystemParams<Scalar>& params) {
  const Scalar e = params.ratio();
  const Scalar st = std::sin(s.theta), ct = std::cos(s.theta);
  return (s.p * s.R - s.q * s.z) * ct - e * s.q * (st + s.R * std::cos(2 * s.theta));
}

/// (p', q') = -grad_{(z,R)} H.
template <typename Scalar>
Vec2<Scalar> costate_rhs(const ExtremalState<Scalar>& s, const SystemParams<Scalar>& params) {
  const Scalar e = params.ratio();
  const Scalar ct = std::cos(s.theta);
  return {e * s.p / 2 - s.q * ct, s.p * ct + e * s.q * (3 - std::cos(2 * s.theta)) / 4};
}

/// theta' from d/dtau (dH/dtheta) = 0 along the flow of (z, R, p, q):
/// theta' = -(grad H_theta . (z', R', p', q')) / H_thetatheta.
template <typename Scalar>
Scalar theta_rhs(const ExtremalState<Scalar>& s, const SystemParams<Scalar>& params,
                 Scalar degenerate_tol = Scalar(1e-10)) {
  const Scalar e = params.ratio();
  const Scalar st = std::sin(s.theta), ct = std::cos(s.theta);
  const Scalar den = hamiltonian_dtheta2(s, params);
  const Scalar scale = std::max(Scalar(1), std::hypot(s.p, s.q));
  if (std::abs(den) <= degenerate_tol * scale)
    throw DegenerateArgmaxError("theta_rhs: second theta-derivative of H vanishes");
  const Vec2<Scalar> x = scaled_aux_rhs(s.z, s.R, s.theta, e);
  const Vec2<Scalar> c = costate_rhs(s, params);
  const Scalar dz = -s.q * st;
  const Scalar dR = s.p * st - e * s.q * st * ct;
  const Scalar dp = s.R * st;
  const Scalar dq = -s.z * st - e * s.R * st * ct + e * ct;
  return -(dz * x(0) + dR * x(1) + dp * c(0) + dq * c(1)) / den;
}

/// Closed-form theta' valid on the stationarity manifold H_theta = 0.
template <typename Scalar>
Scalar theta_rhs_closed_form(const ExtremalState<Scalar>& s, const SystemParams<Scalar>& params) {
  const Scalar e = params.ratio();
  const Scalar st = std::sin(s.theta), ct = std::cos(s.theta);
  const Scalar num = (s.p * s.R + s.q * s.z) * (5 * st + std::sin(3 * s.theta)) - 8 * s.p -
                     4 * e * s.q * ct * ct * ct;
  const Scalar den = (s.p * s.R - s.q * s.z) * ct - e * s.q * (st + s.R * std::cos(2 * s.theta));
  return e / 8 * num / den;
}

/// Full 5-dimensional extremal vector field.
template <typename Scalar>
Vec5<Scalar> extremal_rhs(const ExtremalState<Scalar>& s, const SystemParams<Scalar>& params,
                          Scalar degenerate_tol = Scalar(1e-10)) {
  const Vec2<Scalar> x = scaled_aux_rhs(s.z, s.R, s.theta, params.ratio());
  const Vec2<Scalar> c = costate_rhs(s, params);
  return {x(0), x(1), c(0), c(1), theta_rhs(s, params, degenerate_tol)};
}

/// Cross product of the velocity-curve tangent with its theta-derivative; the
/// admissible-velocity curve turns clockwise wherever this is negative.
template <typename Scalar>
Scalar convexity_margin(Scalar z, Scalar R, Scalar theta, const SystemParams<Scalar>& params) {
  (void)z;
  const Scalar e = params.ratio();
  const Scalar st = std::sin(theta);
  return e * R * (R * st * st * st - 1);
}

/// Global maximizer of H over theta: grid search refined by Newton on H_theta.
template <typename Scalar>
Scalar argmax_theta(ExtremalState<Scalar> s, const SystemParams<Scalar>& params, int grid = 720) {
  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  Scalar best_theta = 0, best = -std::numeric_limits<Scalar>::infinity();
  for (int k = 0; k < grid; ++k) {
    s.theta = two_pi * k / grid;
    const Scalar h = hamiltonian(s, params);
    if (h > best) {
      best = h;
      best_theta = s.theta;
    }
  }
  // Bracketed refinement: H_theta changes sign from + to - across the maximizer.
  const Scalar step = two_pi / grid;
  Scalar lo = best_theta - step, hi = best_theta + step;
  s.theta = lo;
  Scalar flo = hamiltonian_dtheta(s, params);
  s.theta = hi;
  const Scalar fhi = hamiltonian_dtheta(s, params);
  if (!(flo > 0 && fhi < 0)) return best_theta;
  for (int it = 0; it < 200 && hi - lo > Scalar(4) * std::numeric_limits<Scalar>::epsilon() * two_pi; ++it) {
    const Scalar mid = (lo + hi) / 2;
    s.theta = mid;
    const Scalar fm = hamiltonian_dtheta(s, params);
    if (fm > 0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

enum class Branch { Max, Min };

struct ExtremalSeed {
  double psi0 = 0;
  double theta0 = 0;
  Branch branch = Branch::Max;

  /// (z, R, p, q, theta) = (0, 1, cos psi0, sin psi0, theta0).
  ExtremalState<double> initial_state() const { return {0.0, 1.0, std::cos(psi0), std::sin(psi0), theta0}; }
};

/// Left-hand side of the seeding condition H_theta = 0 at (z, R) = (0, 1).
double seeding_residual(double psi0, double theta, const Params& params);

/// Solves the seeding condition on [0, 2 pi) and returns the root that
/// maximizes (Branch::Max) or minimizes H.
ExtremalSeed seed(double psi0, const Params& params, Branch branch = Branch::Max);

/// psi0_k = 2 pi (k + 1/2) / n, k = 0..n-1.
std::vector<double> seed_grid(std::size_t n);

struct ExtremalOptions {
  ode::IntegratorConfig integrator = ode::IntegratorConfig::adaptive(1e-10);
  double reproject_threshold = 1e-6;  ///< |H_theta| above which theta is re-solved
  double degenerate_tol = 1e-10;      ///< guard on |H_thetatheta|
  int branch_check_grid = 36;         ///< theta samples for the global-max check per step; 0 disables
};

/// One integrated extremal. States are stored in signed-R form; fold()
/// gives the R >= 0 representative.
struct ExtremalPath {
  ExtremalSeed seed;
  Params params = Params::scaled(0);
  ode::Trajectory<Vec5<double>> raw;
  std::size_t reprojections = 0;
  std::size_t branch_jumps = 0;

  double end_time() const { return raw.end_time(); }
  ExtremalState<double> signed_at(double tau) const { return ExtremalState<double>::from(raw.at(tau)); }
  ExtremalState<double> folded_at(double tau) const { return fold(signed_at(tau)); }
  /// Folded states at the integrator nodes.
  std::vector<ExtremalState<double>> stored_states() const;
  /// max |H(tau) - H(0)| over the nodes.
  double hamiltonian_drift() const;
  /// max |H_theta| over the nodes.
  double stationarity_residual() const;
};

ExtremalPath integrate_extremal(const ExtremalSeed& seed, double T_scaled, const Params& params,
                                const ExtremalOptions& opts = {});

struct SweepEntry {
  ExtremalSeed seed;
  std::optional<ExtremalPath> path;
  std::string error;  ///< non-empty when the seed failed
};

/// Integrates one extremal per psi0 in parallel; a failing seed is reported
/// in its entry and does not abort the sweep.
std::vector<SweepEntry> sweep_extremals(std::span<const double> psi0s, double T_scaled, const Params& params,
                                        const ExtremalOptions& opts = {});

/// Physical coherent control realizing an extremal:
/// 2 kappa u = dtheta/dt + omega (z/R) sin(theta) + gamma/4 sin(2 theta) - (gamma/R) cos(theta),
/// sampled at the midpoints of a uniform grid of physical step dt on
/// [0, t_end] (t_end <= path end / omega). n is identically zero.
ControlSchedule recover_control(const ExtremalPath& path, const Params& params, double t_end, double dt,
                                double R_min = kDefaultRadiusGuard);

/// Instantaneous control at a signed extremal state.
double control_at(const ExtremalState<double>& s, const Params& params, double R_min = kDefaultRadiusGuard,
                  double degenerate_tol = 1e-10);

}  // namespace qreach
