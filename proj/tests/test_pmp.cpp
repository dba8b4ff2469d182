#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qreach/pmp.hpp"

using namespace qreach;
using S = ExtremalState<double>;
constexpr double kPi = std::numbers::pi;

namespace {

S random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1, 1), A(0, 2 * kPi);
  return {U(rng) * 0.7, U(rng) * 0.7, U(rng), U(rng), A(rng)};
}

// Argmax of H over theta along the (z, R, p, q) flow, by central differences.
double argmax_slope(const S& s, const Params& p, double h) {
  const Vec2<double> x = scaled_aux_rhs(s.z, s.R, s.theta, p.ratio());
  const Vec2<double> c = costate_rhs(s, p);
  S a = s, b = s;
  a.z += h * x(0), a.R += h * x(1), a.p += h * c(0), a.q += h * c(1);
  b.z -= h * x(0), b.R -= h * x(1), b.p -= h * c(0), b.q -= h * c(1);
  double ta = argmax_theta(a, p, 4096), tb = argmax_theta(b, p, 4096);
  return std::remainder(ta - tb, 2 * kPi) / (2 * h);
}

}  // namespace

TEST_CASE("hamiltonian") {
  const auto p = Params::scaled(0.1);
  CHECK(std::abs(hamiltonian(S{0, 1, 0, 1, kPi / 2}, p)) < 1e-15);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    S s = random_state(rng);
    const double h = hamiltonian(s, p);
    s.theta += 2 * kPi;
    CHECK(hamiltonian(s, p) == doctest::Approx(h).epsilon(1e-12));
  }
  for (double psi : {0.0, 0.3, 1.9, 4.0})
    for (double th : {0.1, 1.0, 2.5}) {
      const S s{0, 1, std::cos(psi), std::sin(psi), th};
      CHECK(std::abs(hamiltonian_dtheta(s, p) - seeding_residual(psi, th, p)) < 1e-14);
    }
}

TEST_CASE("theta derivatives and costate equations by finite differences") {
  const auto p = Params::scaled(0.3);
  std::mt19937_64 rng(2);
  const double h = 1e-6;
  for (int k = 0; k < 100; ++k) {
    const S s = random_state(rng);
    auto H = [&](S t) { return hamiltonian(t, p); };
    S a = s, b = s;
    a.theta += h, b.theta -= h;
    CHECK(std::abs((H(a) - H(b)) / (2 * h) - hamiltonian_dtheta(s, p)) < 1e-7);
    CHECK(std::abs((hamiltonian_dtheta(a, p) - hamiltonian_dtheta(b, p)) / (2 * h) - hamiltonian_dtheta2(s, p)) < 1e-7);
    a = s, b = s;
    a.z += h, b.z -= h;
    const double dHdz = (H(a) - H(b)) / (2 * h);
    a = s, b = s;
    a.R += h, b.R -= h;
    const double dHdR = (H(a) - H(b)) / (2 * h);
    const Vec2<double> c = costate_rhs(s, p);
    CHECK(std::abs(c(0) + dHdz) < 1e-7);
    CHECK(std::abs(c(1) + dHdR) < 1e-7);
  }
  const S s{0.2, 0.4, 0.7, -0.3, kPi / 2};
  const Vec2<double> c = costate_rhs(s, p);
  CHECK(c(0) == doctest::Approx(0.5 * p.ratio() * s.p));
  CHECK(c(1) == doctest::Approx(p.ratio() * s.q));
}

TEST_CASE("theta dynamics agree with the closed form on the stationarity manifold") {
  const auto p = Params::scaled(0.1);
  std::mt19937_64 rng(3);
  int tested = 0;
  while (tested < 50) {
    S s = random_state(rng);
    s.theta = argmax_theta(s, p);
    if (std::abs(hamiltonian_dtheta2(s, p)) < 1e-3) continue;
    ++tested;
    CHECK(std::abs(hamiltonian_dtheta(s, p)) < 1e-12);
    CHECK(theta_rhs(s, p) == doctest::Approx(theta_rhs_closed_form(s, p)).epsilon(1e-9));
    CHECK(std::abs(theta_rhs(s, p) - argmax_slope(s, p, 1e-5)) < 1e-5);
  }
  // Degenerate second derivative.
  CHECK_THROWS_AS(theta_rhs(S{0, 1, 0, 1, kPi / 2}, p), DegenerateArgmaxError);
}

TEST_CASE("convexity margin") {
  const auto p = Params::scaled(0.2);
  CHECK(convexity_margin(0.0, 1.0, kPi / 2, p) == doctest::Approx(0.0));
  CHECK(convexity_margin(0.3, 0.0, 1.0, p) == 0.0);
  for (double th = 0; th < 2 * kPi; th += 0.1) CHECK(convexity_margin(0.1, 0.5, th, p) <= p.ratio() * 0.5 * (0.5 - 1) + 1e-15);
  // Cross product of the velocity curve with its theta-derivative.
  const double e = p.ratio(), h = 1e-6;
  for (double z : {-0.3, 0.2})
    for (double R : {0.2, 0.8})
      for (double th : {0.4, 2.0, 4.5}) {
        auto xi = [&](double t) { return R * std::sin(t); };
        auto eta = [&](double t) { return e * (std::cos(t) - R * std::sin(t) * std::cos(t)) - z * std::sin(t); };
        const double d_xi = (xi(th + h) - xi(th - h)) / (2 * h), d_eta = (eta(th + h) - eta(th - h)) / (2 * h);
        CHECK(std::abs(xi(th) * d_eta - eta(th) * d_xi - convexity_margin(z, R, th, p)) < 1e-8);
      }
}

TEST_CASE("seeding") {
  const auto p = Params::scaled(0.1);
  for (double psi : {0.0, 0.4, 1.2, kPi / 2, 2.0, kPi, 4.1, 5.5}) {
    const ExtremalSeed s = seed(psi, p);
    CHECK(std::abs(seeding_residual(psi, s.theta0, p)) < 1e-12);
    S st = s.initial_state();
    const double best = hamiltonian(st, p);
    for (int k = 0; k < 720; ++k) {
      st.theta = 2 * kPi * k / 720;
      CHECK(best >= hamiltonian(st, p) - 1e-9);
    }
    const ExtremalSeed m = seed(psi, p, Branch::Min);
    CHECK(hamiltonian(m.initial_state(), p) <= best);
  }
  // psi0 = 0: sin(theta0) = 0, and H = -cos(theta0) favours pi.
  CHECK(std::abs(std::remainder(seed(0.0, p).theta0 - kPi, 2 * kPi)) < 1e-12);
  const auto grid = seed_grid(8);
  CHECK(grid.size() == 8);
  CHECK(grid[0] == doctest::Approx(kPi / 8));
  CHECK(grid[7] == doctest::Approx(2 * kPi - kPi / 8));
}

TEST_CASE("fold") {
  const S s = fold(S{0.1, -0.5, 0.3, -0.2, 5.0});
  CHECK(s.R == 0.5);
  CHECK(s.q == 0.2);
  CHECK(s.theta == doctest::Approx(5.0 + kPi - 2 * kPi));
  const auto p = Params::scaled(0.2);
  const S a{0.1, 0.5, 0.3, 0.2, 1.0};
  const S b{0.1, -0.5, 0.3, -0.2, 1.0 + kPi};
  CHECK(hamiltonian(a, p) == doctest::Approx(hamiltonian(b, p)).epsilon(1e-12));
}

TEST_CASE("extremal health") {
  const auto p = Params::scaled(0.1);
  for (double psi : seed_grid(16)) {
    const ExtremalPath path = integrate_extremal(seed(psi, p), 7.0, p);
    CHECK(path.end_time() == doctest::Approx(7.0));
    CHECK(path.hamiltonian_drift() < 1e-8);
    CHECK(path.stationarity_residual() < 1e-8);
    for (const auto& st : path.stored_states()) {
      CHECK(st.R >= 0);
      CHECK(st.z * st.z + st.R * st.R <= 1 + 1e-9);
      CHECK(std::hypot(st.p, st.q) > 0);
    }
  }
  CHECK_THROWS_AS(integrate_extremal(seed(1.0, p), 0.0, p), std::invalid_argument);
}

TEST_CASE("argmax slope oracle along an extremal") {
  const auto p = Params::scaled(0.1);
  const ExtremalPath path = integrate_extremal(seed(2.3, p), 5.0, p);
  const auto& t = path.raw.times();
  for (std::size_t k = 1; k < t.size(); k += std::max<std::size_t>(1, t.size() / 25)) {
    const S s = path.signed_at(t[k]);
    if (std::abs(hamiltonian_dtheta2(s, p)) < 1e-3) continue;
    CHECK(std::abs(theta_rhs(s, p) - argmax_slope(s, p, 1e-5)) < 1e-5);
  }
}

TEST_CASE("control recovery") {
  const auto p = Params(2.0, 0.75, 0.2);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    S s = random_state(rng);
    if (std::abs(s.R) < 0.1 || std::abs(hamiltonian_dtheta2(s, p)) < 1e-3) continue;
    const double u = control_at(s, p);
    // The theta equation of the cylindrical system reproduces the extremal's theta rate.
    const CylindricalState<double> c{s.z, std::abs(s.R), s.R > 0 ? s.theta : s.theta + kPi};
    const double theta_dot = cylindrical_rhs(c, u, 0.0, p)(2);
    CHECK(theta_dot == doctest::Approx(p.omega() * theta_rhs(s, p)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(control_at(S{0.1, 0.0, 1, 0, 0.3}, p), SingularityError);

  const auto sp = Params::scaled(0.1);
  const ExtremalSeed sd = seed(0.8, sp);
  const ExtremalPath path = integrate_extremal(sd, 2.0, sp);
  const ControlSchedule u = recover_control(path, sp, 1.0, 1e-3);
  for (double n : u.n()) CHECK(n == 0);
  CHECK(u.final_time() == doctest::Approx(1.0));
  const auto traj = simulate(from_cylindrical(CylindricalState<double>{0, 1, sd.theta0}), u, sp);
  double err = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto c = to_cylindrical(traj.states()[k]);
    const S e = path.folded_at(traj.times()[k] * sp.omega());
    err = std::max(err, std::hypot(c.z - e.z, c.R - e.R));
  }
  CHECK(err < 1e-4);
  CHECK_THROWS_AS(recover_control(path, sp, 3.0, 1e-3), std::invalid_argument);
}
