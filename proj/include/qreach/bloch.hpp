#pragma once

// State representations of the driven qubit and the right-hand sides of its
// dynamics in every coordinate system used by the library: density matrix,
// Bloch vector, cylindrical (z, R, theta) about the r_x axis, the reduced
// meridian-plane system with theta as control, and its polar form.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qreach/errors.hpp"
#include "qreach/params.hpp"

namespace qreach {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

/// Point of the Bloch ball, (r_x, r_y, r_z).
template <typename Scalar>
using BlochVector = Vec3<Scalar>;

template <typename Scalar>
using DensityMatrix = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

template <typename Scalar>
struct CylindricalState {
  Scalar z{0};
  Scalar R{0};
  Scalar theta{0};
};

template <typename Scalar>
struct PolarState {
  Scalar rho{0};
  Scalar phi{0};
};

inline constexpr double kDefaultRadiusGuard = 1e-8;

namespace pauli {
template <typename Scalar>
DensityMatrix<Scalar> identity() {
  return DensityMatrix<Scalar>::Identity();
}
template <typename Scalar>
DensityMatrix<Scalar> x() {
  DensityMatrix<Scalar> m;
  m << 0, 1, 1, 0;
  return m;
}
template <typename Scalar>
DensityMatrix<Scalar> y() {
  using C = std::complex<Scalar>;
  DensityMatrix<Scalar> m;
  m << C(0), C(0, -1), C(0, 1), C(0);
  return m;
}
template <typename Scalar>
DensityMatrix<Scalar> z() {
  DensityMatrix<Scalar> m;
  m << 1, 0, 0, -1;
  return m;
}
/// |0><1|: relaxes towards r = (0, 0, 1).
template <typename Scalar>
DensityMatrix<Scalar> lowering() {
  DensityMatrix<Scalar> m;
  m << 0, 1, 0, 0;
  return m;
}
template <typename Scalar>
DensityMatrix<Scalar> raising() {
  DensityMatrix<Scalar> m;
  m << 0, 0, 1, 0;
  return m;
}
}  // namespace pauli

/// The three affine fields of the Bloch equation: f0 (drift, per unit omega),
/// f1 (coherent control) and f2 (incoherent control).
template <typename Scalar>
Vec3<Scalar> field_f(int index, const BlochVector<Scalar>& r, const SystemParams<Scalar>& params) {
  const Scalar e = params.ratio();
  switch (index) {
    case 0:
      return {-r.y() - e * r.x() / 2, r.x() - e * r.y() / 2, e * (Scalar(1) - r.z())};
    case 1:
      return {Scalar(0), -r.z(), r.y()};
    case 2:
      return {-r.x() / 2, -r.y() / 2, -r.z()};
    default:
      throw std::invalid_argument("field_f: index must be 0, 1 or 2");
  }
}

template <typename Scalar>
Vec3<Scalar> bloch_rhs(const BlochVector<Scalar>& r, Scalar u, Scalar n,
                       const SystemParams<Scalar>& params) {
  if (n < 0) throw std::invalid_argument("bloch_rhs: incoherent control n must be >= 0");
  Vec3<Scalar> v = params.omega() * field_f(0, r, params) + 2 * params.kappa() * u * field_f(1, r, params);
  if (n != 0) v += params.gamma() * n * field_f(2, r, params);
  return v;
}

/// rho = (I + r . sigma) / 2.
template <typename Scalar>
DensityMatrix<Scalar> bloch_to_density(const BlochVector<Scalar>& r) {
  return (pauli::identity<Scalar>() + r.x() * pauli::x<Scalar>() + r.y() * pauli::y<Scalar>() +
          r.z() * pauli::z<Scalar>()) /
         Scalar(2);
}

template <typename Scalar>
BlochVector<Scalar> density_to_bloch(const DensityMatrix<Scalar>& rho, Scalar tol = Scalar(1e-10)) {
  if (std::abs(rho.trace() - std::complex<Scalar>(1)) > tol)
    throw std::invalid_argument("density_to_bloch: trace must be 1");
  return {2 * rho(0, 1).real(), -2 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

namespace detail {
template <typename Scalar>
DensityMatrix<Scalar> dissipator(const DensityMatrix<Scalar>& L, const DensityMatrix<Scalar>& rho) {
  const DensityMatrix<Scalar> LdL = L.adjoint() * L;
  return L * rho * L.adjoint() - (LdL * rho + rho * LdL) / Scalar(2);
}
}  // namespace detail

/// GKSL right-hand side. The Hamiltonian is (omega/2) sigma_z + kappa u sigma_x
/// and the occupation n enters with half weight on both ladder dissipators, the
/// normalization under which this equation and bloch_rhs coincide exactly.
template <typename Scalar>
DensityMatrix<Scalar> lindblad_rhs(const DensityMatrix<Scalar>& rho, Scalar u, Scalar n,
                                   const SystemParams<Scalar>& params, Scalar tol = Scalar(1e-10)) {
  if (n < 0) throw std::invalid_argument("lindblad_rhs: incoherent control n must be >= 0");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("lindblad_rhs: density matrix is not Hermitian");
  using C = std::complex<Scalar>;
  const DensityMatrix<Scalar> H =
      (params.omega() / 2) * pauli::z<Scalar>() + params.kappa() * u * pauli::x<Scalar>();
  DensityMatrix<Scalar> out = C(0, -1) * (H * rho - rho * H);
  const Scalar g = params.gamma();
  out += g * (Scalar(1) + n / 2) * detail::dissipator(pauli::lowering<Scalar>(), rho);
  out += g * (n / 2) * detail::dissipator(pauli::raising<Scalar>(), rho);
  return out;
}

/// r_x = z, r_y = R cos(theta), r_z = R sin(theta); theta = 0 on the axis.
template <typename Scalar>
CylindricalState<Scalar> to_cylindrical(const BlochVector<Scalar>& r) {
  const Scalar R = std::hypot(r.y(), r.z());
  const Scalar theta = (R == 0) ? Scalar(0) : std::atan2(r.z(), r.y());
  return {r.x(), R, theta};
}

template <typename Scalar>
BlochVector<Scalar> from_cylindrical(const CylindricalState<Scalar>& c) {
  return {c.z, c.R * std::cos(c.theta), c.R * std::sin(c.theta)};
}

/// Fields g0, g1, g2: f0, f1, f2 pushed forward to (z, R, theta).
template <typename Scalar>
Vec3<Scalar> cylindrical_field(int index, const CylindricalState<Scalar>& c,
                               const SystemParams<Scalar>& params,
                               Scalar R_min = Scalar(kDefaultRadiusGuard)) {
  const Scalar e = params.ratio();
  const Scalar s = std::sin(c.theta), co = std::cos(c.theta);
  const Scalar s2 = std::sin(2 * c.theta), c2 = std::cos(2 * c.theta);
  const Vec3<Scalar> g2(-c.z / 2, -c.R * (3 - c2) / 4, -s2 / 4);
  switch (index) {
    case 0:
      if (c.R <= R_min) throw SingularityError("cylindrical field g0: R at or below guard");
      return Vec3<Scalar>(-c.R * co, c.z * co, -c.z / c.R * s) + e * g2 +
             e * Vec3<Scalar>(0, s, co / c.R);
    case 1:
      return {0, 0, 1};
    case 2:
      return g2;
    default:
      throw std::invalid_argument("cylindrical_field: index must be 0, 1 or 2");
  }
}

/// (z', R', theta') = omega g0 + 2 kappa g1 u + gamma g2 n.
template <typename Scalar>
Vec3<Scalar> cylindrical_rhs(const CylindricalState<Scalar>& c, Scalar u, Scalar n,
                             const SystemParams<Scalar>& params,
                             Scalar R_min = Scalar(kDefaultRadiusGuard)) {
  if (n < 0) throw std::invalid_argument("cylindrical_rhs: incoherent control n must be >= 0");
  if (c.R <= R_min) throw SingularityError("cylindrical_rhs: R at or below guard");
  return params.omega() * cylindrical_field(0, c, params, R_min) +
         2 * params.kappa() * u * cylindrical_field(1, c, params, R_min) +
         params.gamma() * n * cylindrical_field(2, c, params, R_min);
}

/// Meridian-plane system with the rotation angle theta promoted to a control
/// (physical time). Smooth for every R, including R <= 0.
template <typename Scalar>
Vec2<Scalar> aux_rhs(Scalar z, Scalar R, Scalar theta, const SystemParams<Scalar>& params) {
  const Scalar w = params.omega(), g = params.gamma();
  const Scalar co = std::cos(theta);
  return {-g * z / 2 - w * R * co,
          w * z * co - g * R * (3 - std::cos(2 * theta)) / 4 + g * std::sin(theta)};
}

/// The auxiliary system in polar coordinates z = rho cos(phi), R = rho sin(phi),
/// in rescaled time tau = omega t.
template <typename Scalar>
Vec2<Scalar> polar_rhs(const PolarState<Scalar>& s, Scalar theta, const SystemParams<Scalar>& params,
                       Scalar rho_min = Scalar(kDefaultRadiusGuard)) {
  if (s.rho <= rho_min) throw SingularityError("polar_rhs: rho at or below guard");
  const Scalar e = params.ratio();
  const Scalar sp = std::sin(s.phi), cp = std::cos(s.phi);
  const Scalar st = std::sin(theta), ct = std::cos(theta);
  const Scalar rho_dot = -e / 2 * (s.rho + s.rho * sp * sp * st * st - 2 * sp * st);
  const Scalar phi_dot = ct + e / (2 * s.rho) * cp * st * (2 - s.rho * sp * st);
  return {rho_dot, phi_dot};
}

/// d(|r|^2 / 2)/dt along the Bloch equation; independent of u.
template <typename Scalar>
Scalar ball_norm_derivative(const BlochVector<Scalar>& r, Scalar n, const SystemParams<Scalar>& params) {
  if (n < 0) throw std::invalid_argument("ball_norm_derivative: n must be >= 0");
  const Scalar q = r.x() * r.x() + r.y() * r.y() + 2 * r.z() * r.z();
  return -params.gamma() / 2 * (q - 2 * r.z()) - params.gamma() / 2 * n * q;
}

}  // namespace qreach
