#include "qreach/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qreach {

ControlSchedule::ControlSchedule(std::vector<double> times, std::vector<double> u, std::vector<double> n,
                                 double T)
    : times_(std::move(times)), u_(std::move(u)), n_(std::move(n)), T_(T) {
  if (times_.empty()) throw std::invalid_argument("ControlSchedule: no samples");
  if (u_.size() != times_.size() || n_.size() != times_.size())
    throw std::invalid_argument("ControlSchedule: column lengths differ");
  if (times_.front() != 0) throw std::invalid_argument("ControlSchedule: first sample time must be 0");
  for (std::size_t k = 1; k < times_.size(); ++k)
    if (!(times_[k] > times_[k - 1]))
      throw std::invalid_argument("ControlSchedule: sample times must be strictly increasing");
  for (double v : n_)
    if (!(v >= 0)) throw std::invalid_argument("ControlSchedule: n must be >= 0");
  for (double v : u_)
    if (!std::isfinite(v)) throw std::invalid_argument("ControlSchedule: u must be finite");
  if (!(T_ > 0)) throw std::invalid_argument("ControlSchedule: T must be > 0");
  if (!(T_ > times_.back())) throw std::invalid_argument("ControlSchedule: T must exceed the last sample time");
}

ControlSchedule ControlSchedule::constant(double u, double n, double T) { return {{0.0}, {u}, {n}, T}; }

std::size_t ControlSchedule::piece(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0;
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

double ControlSchedule::max_abs_u() const {
  double m = 0;
  for (double v : u_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("schedule line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
  if (pos != s.size()) throw FormatError("schedule line " + std::to_string(line_no) + ": trailing text in '" + s + "'");
  return v;
}

}  // namespace

ControlSchedule read_schedule_csv(std::istream& in, const Params& params, double T,
                                  const ScheduleCsvOptions& opts) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  const auto header = split_csv(line);
  if (header != std::vector<std::string>{"t", "u", "n"})
    throw FormatError("schedule: header row must be 't,u,n'");
  const double time_scale = opts.scaled ? 1.0 / params.omega() : 1.0;
  const double u_max = opts.u_max > 0 ? opts.u_max : default_u_max(params);
  std::vector<double> t, u, n;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 3) throw FormatError("schedule line " + std::to_string(line_no) + ": expected 3 columns");
    t.push_back(parse_number(cells[0], line_no) * time_scale);
    u.push_back(parse_number(cells[1], line_no));
    n.push_back(parse_number(cells[2], line_no));
    if (std::abs(u.back()) > u_max)
      throw std::invalid_argument("schedule line " + std::to_string(line_no) + ": |u| exceeds cap " +
                                  std::to_string(u_max));
  }
  if (t.empty()) throw FormatError("schedule: no data rows");
  double final_time = T > 0 ? T : t.back();
  if (T > 0) {
    // Samples at or after the horizon never take effect.
    while (t.size() > 1 && t.back() >= T) {
      t.pop_back();
      u.pop_back();
      n.pop_back();
    }
  } else {
    // Without an explicit horizon the last row only marks the end time.
    t.pop_back();
    u.pop_back();
    n.pop_back();
    if (t.empty()) throw FormatError("schedule: need at least two rows when T is not given");
  }
  return ControlSchedule(std::move(t), std::move(u), std::move(n), final_time);
}

ControlSchedule read_schedule_csv(const std::string& path, const Params& params, double T,
                                  const ScheduleCsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path);
  return read_schedule_csv(in, params, T, opts);
}

ode::Trajectory<Vec3<double>> simulate(const BlochVector<double>& r0, const ControlSchedule& schedule,
                                       const Params& params, const ode::IntegratorConfig& cfg) {
  ode::Trajectory<Vec3<double>> out;
  Vec3<double> r = r0;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const double t0 = schedule.times()[k];
    const double len = schedule.piece_end(k) - t0;
    const double u = schedule.u()[k], n = schedule.n()[k];
    auto rhs = [&](double, const Vec3<double>& y) { return bloch_rhs(y, u, n, params); };
    const auto piece = ode::integrate(rhs, r, len, cfg);
    const std::size_t first = out.empty() ? 0 : 1;
    for (std::size_t j = first; j < piece.size(); ++j)
      out.push(t0 + piece.times()[j], piece.states()[j], piece.derivatives()[j]);
    r = piece.back();
  }
  return out;
}

}  // namespace qreach
