#include "qreach/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qreach/parallel.hpp"

namespace qreach {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

}  // namespace

double seeding_residual(double psi0, double theta, const Params& params) {
  return std::cos(psi0) * std::sin(theta) -
         params.ratio() * std::sin(psi0) * std::cos(theta) * (std::sin(theta) - 1);
}

ExtremalSeed seed(double psi0, const Params& params, Branch branch) {
  constexpr int kScan = 4096;
  auto h = [&](double th) { return seeding_residual(psi0, th, params); };
  std::vector<double> roots;
  double a = 0, fa = h(0);
  for (int k = 1; k <= kScan; ++k) {
    const double b = kTwoPi * k / kScan, fb = h(b);
    if (fa == 0) {
      roots.push_back(a);
    } else if ((fa < 0) != (fb < 0) && fb != 0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi), fm = h(mid);
        if (fm == 0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  if (roots.empty()) throw std::runtime_error("seed: no root of the seeding equation found");

  ExtremalSeed out{psi0, 0.0, branch};
  ExtremalState<double> s{0.0, 1.0, std::cos(psi0), std::sin(psi0), 0.0};
  double best = branch == Branch::Max ? -std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::infinity();
  for (double r : roots) {
    s.theta = r;
    const double val = hamiltonian(s, params);
    if ((branch == Branch::Max && val > best) || (branch == Branch::Min && val < best)) {
      best = val;
      out.theta0 = r;
    }
  }
  return out;
}

std::vector<double> seed_grid(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = kTwoPi * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
  return out;
}

std::vector<ExtremalState<double>> ExtremalPath::stored_states() const {
  std::vector<ExtremalState<double>> out;
  out.reserve(raw.size());
  for (const auto& v : raw.states()) out.push_back(fold(ExtremalState<double>::from(v)));
  return out;
}

double ExtremalPath::hamiltonian_drift() const {
  const double h0 = hamiltonian(ExtremalState<double>::from(raw.states().front()), params);
  double m = 0;
  for (const auto& v : raw.states()) m = std::max(m, std::abs(hamiltonian(ExtremalState<double>::from(v), params) - h0));
  return m;
}

double ExtremalPath::stationarity_residual() const {
  double m = 0;
  for (const auto& v : raw.states())
    m = std::max(m, std::abs(hamiltonian_dtheta(ExtremalState<double>::from(v), params)));
  return m;
}

namespace {

// Newton on H_theta from the current angle; returns false if it fails to
// settle on a maximum.
bool reproject(ExtremalState<double>& s, const Params& params) {
  for (int it = 0; it < 20; ++it) {
    const double g = hamiltonian_dtheta(s, params);
    const double d = hamiltonian_dtheta2(s, params);
    if (!(d < 0)) return false;
    const double step = g / d;
    s.theta -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return hamiltonian_dtheta2(s, params) < 0;
}

}  // namespace

ExtremalPath integrate_extremal(const ExtremalSeed& seedv, double T_scaled, const Params& params,
                                const ExtremalOptions& opts) {
  if (!(T_scaled > 0)) throw std::invalid_argument("integrate_extremal: T must be > 0");
  ExtremalPath path;
  path.seed = seedv;
  path.params = params;

  auto rhs = [&](double, const Vec5<double>& y) {
    return extremal_rhs(ExtremalState<double>::from(y), params, opts.degenerate_tol);
  };
  auto hook = [&](double, Vec5<double>& y) {
    auto s = ExtremalState<double>::from(y);
    bool modified = false;
    if (opts.branch_check_grid > 0 && seedv.branch == Branch::Max) {
      const double h = hamiltonian(s, params);
      const double scale = std::max(1.0, std::hypot(s.p, s.q));
      auto probe = s;
      bool jumped = false;
      for (int k = 0; k < opts.branch_check_grid; ++k) {
        probe.theta = kTwoPi * k / opts.branch_check_grid;
        if (hamiltonian(probe, params) > h + 1e-9 * scale) {
          jumped = true;
          break;
        }
      }
      if (jumped) {
        s.theta = argmax_theta(s, params);
        ++path.branch_jumps;
        modified = true;
      }
    }
    if (std::abs(hamiltonian_dtheta(s, params)) > opts.reproject_threshold) {
      if (!reproject(s, params)) s.theta = argmax_theta(s, params);
      ++path.reprojections;
      modified = true;
    }
    if (!modified) return ode::StepAction::Continue;
    y = s.vector();
    return ode::StepAction::Modified;
  };
  path.raw = ode::integrate(rhs, seedv.initial_state().vector(), T_scaled, opts.integrator, hook);
  return path;
}

std::vector<SweepEntry> sweep_extremals(std::span<const double> psi0s, double T_scaled, const Params& params,
                                        const ExtremalOptions& opts) {
  std::vector<SweepEntry> out(psi0s.size());
  parallel_for(psi0s.size(), [&](std::size_t i) {
    SweepEntry& e = out[i];
    try {
      e.seed = seed(psi0s[i], params);
      e.path = integrate_extremal(e.seed, T_scaled, params, opts);
    } catch (const std::exception& ex) {
      e.seed.psi0 = psi0s[i];
      e.error = ex.what();
    }
  });
  return out;
}

double control_at(const ExtremalState<double>& s, const Params& params, double R_min, double degenerate_tol) {
  if (std::abs(s.R) <= R_min) throw SingularityError("recover_control: R at or below guard");
  const double w = params.omega(), g = params.gamma();
  const double theta_dot = w * theta_rhs(s, params, degenerate_tol);
  const double st = std::sin(s.theta), ct = std::cos(s.theta);
  return (theta_dot + w * s.z / s.R * st + g / 4 * std::sin(2 * s.theta) - g / s.R * ct) / (2 * params.kappa());
}

ControlSchedule recover_control(const ExtremalPath& path, const Params& params, double t_end, double dt,
                                double R_min) {
  if (!(dt > 0)) throw std::invalid_argument("recover_control: dt must be > 0");
  const double t_max = path.end_time() / params.omega();
  if (!(t_end > 0) || t_end > t_max * (1 + 1e-12))
    throw std::invalid_argument("recover_control: t_end outside the extremal's time range");
  const auto pieces = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  std::vector<double> t(pieces), u(pieces), n(pieces, 0.0);
  for (std::size_t k = 0; k < pieces; ++k) {
    const double a = t_end * static_cast<double>(k) / static_cast<double>(pieces);
    const double b = t_end * static_cast<double>(k + 1) / static_cast<double>(pieces);
    t[k] = a;
    const double tau_mid = 0.5 * (a + b) * params.omega();
    u[k] = control_at(path.signed_at(tau_mid), params, R_min);
  }
  return ControlSchedule(std::move(t), std::move(u), std::move(n), t_end);
}

}  // namespace qreach
