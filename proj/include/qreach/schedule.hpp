#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qreach/bloch.hpp"
#include "qreach/ode.hpp"

namespace qreach {

/// Piecewise-constant controls: u(t) = u[k], n(t) = n[k] on [t[k], t[k+1]),
/// with the last sample held until the final time T.
class ControlSchedule {
 public:
  ControlSchedule(std::vector<double> times, std::vector<double> u, std::vector<double> n, double T);

  /// Constant controls over [0, T].
  static ControlSchedule constant(double u, double n, double T);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& u() const noexcept { return u_; }
  const std::vector<double>& n() const noexcept { return n_; }
  double final_time() const noexcept { return T_; }
  std::size_t size() const noexcept { return times_.size(); }

  /// Index of the piece containing t (clamped to the valid range).
  std::size_t piece(double t) const;
  double u_at(double t) const { return u_[piece(t)]; }
  double n_at(double t) const { return n_[piece(t)]; }
  /// End time of piece k.
  double piece_end(std::size_t k) const { return k + 1 < times_.size() ? times_[k + 1] : T_; }

  double max_abs_u() const;

 private:
  std::vector<double> times_;
  std::vector<double> u_;
  std::vector<double> n_;
  double T_;
};

struct ScheduleCsvOptions {
  bool scaled = false;  ///< times given in units of 1/omega
  double u_max = 0;     ///< |u| cap; 0 selects 1e3 * omega / (2 kappa)
};

/// Default numerical cap on |u| for ingested schedules.
inline double default_u_max(const Params& params) { return 1e3 * params.omega() / (2 * params.kappa()); }

/// Reads a `t,u,n` CSV (header row required). T defaults to the last sample
/// time when not positive; otherwise it must exceed every sample time.
ControlSchedule read_schedule_csv(std::istream& in, const Params& params, double T,
                                  const ScheduleCsvOptions& opts = {});
ControlSchedule read_schedule_csv(const std::string& path, const Params& params, double T,
                                  const ScheduleCsvOptions& opts = {});

/// Integrates the Bloch equation under a schedule, restarting the integrator
/// at every control switch. Node derivatives at switch times are left limits.
ode::Trajectory<Vec3<double>> simulate(const BlochVector<double>& r0, const ControlSchedule& schedule,
                                       const Params& params, const ode::IntegratorConfig& cfg = {});

}  // namespace qreach
