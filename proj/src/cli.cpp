#include "qreach/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "qreach/lie.hpp"
#include "qreach/mesh.hpp"
#include "qreach/pmp.hpp"
#include "qreach/reachset.hpp"
#include "qreach/schedule.hpp"
#include "qreach/svg.hpp"
#include "qreach/table.hpp"

#ifndef QREACH_VERSION
#define QREACH_VERSION "unknown"
#endif

namespace qreach::cli {

namespace {

struct ParamFlags {
  double gamma_ratio = 0.1;
  std::optional<double> omega, kappa, gamma;
  CLI::Option* ratio_opt = nullptr;

  void attach(CLI::App& app) {
    ratio_opt = app.add_option("--gamma-ratio", gamma_ratio, "gamma/omega in scaled units (omega=1, kappa=1/2)")
                    ->capture_default_str();
    auto* o = app.add_option("--omega", omega, "physical omega (rad/s)");
    auto* k = app.add_option("--kappa", kappa, "physical kappa");
    auto* g = app.add_option("--gamma", gamma, "physical gamma (1/s)");
    for (auto* opt : {o, k, g}) opt->excludes(ratio_opt);
  }

  Params params() const {
    const int given = omega.has_value() + kappa.has_value() + gamma.has_value();
    if (given == 0) return Params::scaled(gamma_ratio);
    if (given != 3) throw CLI::ValidationError("--omega, --kappa and --gamma must be given together");
    return Params(*omega, *kappa, *gamma);
  }
};

// Writes to a file, or to `fallback` when the path is empty or "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  fn(f);
  if (!f) throw std::runtime_error("write failed for " + path);
}

void warn_failures(const std::vector<SeedFailure>& failures, std::ostream& err) {
  for (const auto& f : failures) err << "warning: seed psi0=" << num(f.psi0) << " failed: " << f.message << '\n';
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamics, time-optimal extremals and reachable sets of a driven dissipative qubit", "qreach"};
  app.set_version_flag("--version", std::string("qreach ") + QREACH_VERSION);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Integrate the Bloch equation under a piecewise-constant schedule");
  ParamFlags sim_p;
  sim_p.attach(*sim);
  std::string sim_schedule, sim_out;
  std::vector<double> sim_r0{0, 0, 1};
  double sim_T = 0, sim_tol = 1e-10;
  bool sim_scaled = false;
  sim->add_option("--schedule", sim_schedule, "CSV with header t,u,n")->required()->check(CLI::ExistingFile);
  sim->add_option("--r0", sim_r0, "initial Bloch vector rx,ry,rz")->delimiter(',')->expected(3)->capture_default_str();
  sim->add_option("--T", sim_T, "final time (default: last schedule time)");
  sim->add_flag("--scaled", sim_scaled, "schedule and T are in units of 1/omega");
  sim->add_option("--tol", sim_tol, "integrator tolerance")->capture_default_str();
  sim->add_option("--out", sim_out, "output CSV (default stdout)");

  // extremal
  auto* ext = app.add_subcommand("extremal", "Integrate one extremal of the maximum principle");
  ParamFlags ext_p;
  ext_p.attach(*ext);
  double ext_psi0 = 0, ext_T = 1, ext_dt = 0;
  bool ext_min = false;
  std::string ext_out;
  ext->add_option("--psi0", ext_psi0, "initial costate angle (rad)")->required();
  ext->add_option("--T", ext_T, "final rescaled time omega*T")->required()->check(CLI::PositiveNumber);
  ext->add_option("--dt", ext_dt, "output spacing in rescaled time (default: integrator nodes)");
  ext->add_flag("--min-branch", ext_min, "seed on the root of the seeding equation that minimizes H");
  ext->add_option("--out", ext_out, "output CSV (default stdout)");

  // reachset
  auto* rs = app.add_subcommand("reachset", "Reachable set at time <= T from the ground state");
  ParamFlags rs_p;
  rs_p.attach(*rs);
  double rs_T = 0;
  std::size_t rs_seeds = 1024;
  int rs_raster = 512, rs_angles = 64;
  std::string rs_out, rs_svg, rs_obj;
  bool rs_no_spiral = false;
  rs->add_option("--T", rs_T, "rescaled time omega*T")->required()->check(CLI::PositiveNumber);
  rs->add_option("--seeds", rs_seeds, "initial costate angles")->capture_default_str()->check(CLI::Range(64, 1 << 24));
  rs->add_option("--raster", rs_raster, "raster cells per side")->capture_default_str()->check(CLI::Range(2, 1 << 14));
  rs->add_option("--out", rs_out, "CSV of occupied cell centers");
  rs->add_option("--svg", rs_svg, "SVG figure");
  rs->add_option("--obj", rs_obj, "OBJ surface of revolution");
  rs->add_option("--angles", rs_angles, "angular samples for --obj")->capture_default_str()->check(CLI::Range(3, 4096));
  rs->add_flag("--no-spiral", rs_no_spiral, "omit the spiral-region overlay");

  // movie
  auto* mv = app.add_subcommand("movie", "Numbered SVG frames of the growing reachable set");
  ParamFlags mv_p;
  mv_p.attach(*mv);
  double mv_T = 7;
  int mv_frames = 140, mv_raster = 512;
  std::size_t mv_seeds = 1024;
  std::string mv_dir = ".", mv_prefix = "frame";
  mv->add_option("--T-max", mv_T, "final rescaled time")->capture_default_str()->check(CLI::PositiveNumber);
  mv->add_option("--frames", mv_frames, "frame count")->capture_default_str()->check(CLI::Range(1, 100000));
  mv->add_option("--seeds", mv_seeds, "initial costate angles")->capture_default_str()->check(CLI::Range(64, 1 << 24));
  mv->add_option("--raster", mv_raster, "raster cells per side")->capture_default_str()->check(CLI::Range(2, 1 << 14));
  mv->add_option("--out-dir", mv_dir, "output directory")->capture_default_str();
  mv->add_option("--prefix", mv_prefix, "file name prefix")->capture_default_str();

  // spiral
  auto* sp = app.add_subcommand("spiral", "Outline of the spiral-bounded reachable region");
  ParamFlags sp_p;
  sp_p.attach(*sp);
  int sp_points = 64;
  std::string sp_out;
  sp->add_option("--points-per-arc", sp_points, "samples per arc")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  sp->add_option("--out", sp_out, "output CSV (default stdout)");

  // lacuna
  auto* la = app.add_subcommand("lacuna", "Guaranteed ball, lacuna size and barrier certificate");
  ParamFlags la_p;
  la_p.attach(*la);
  double la_phi0 = 0, la_alpha = 0.4, la_beta = 1e-3;
  int la_phi_grid = 2048, la_theta_grid = 720;
  la->add_option("--phi0", la_phi0, "triangle center angle")->capture_default_str();
  la->add_option("--alpha", la_alpha, "edge slope factor")->capture_default_str()->check(CLI::PositiveNumber);
  la->add_option("--beta", la_beta, "triangle half-width in phi")->capture_default_str()->check(CLI::PositiveNumber);
  la->add_option("--phi-grid", la_phi_grid, "phi samples per edge")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  la->add_option("--theta-grid", la_theta_grid, "control-angle samples")->capture_default_str()->check(CLI::Range(1, 1 << 20));

  // rank
  auto* rk = app.add_subcommand("rank", "Lie-bracket rank certificates on a grid over the Bloch cube");
  ParamFlags rk_p;
  rk_p.attach(*rk);
  int rk_points = 21;
  std::string rk_out;
  rk->add_option("--points", rk_points, "grid points per axis on [-1,1]")->capture_default_str()->check(CLI::Range(1, 1001));
  rk->add_option("--out", rk_out, "output CSV (default stdout)");

  // table
  auto* tb = app.add_subcommand("table", "Build or query the seed lookup table");
  tb->require_subcommand(1);
  auto* tbb = tb->add_subcommand("build", "Sweep extremals and save the first-passage table");
  ParamFlags tb_p;
  tb_p.attach(*tbb);
  std::size_t tb_seeds = 4096;
  double tb_T = 10;
  int tb_grid = 256;
  std::string tb_out;
  tbb->add_option("--seeds", tb_seeds, "initial costate angles")->capture_default_str()->check(CLI::Range(256, 1 << 24));
  tbb->add_option("--T-max", tb_T, "final rescaled time")->capture_default_str()->check(CLI::PositiveNumber);
  tbb->add_option("--grid", tb_grid, "cells per unit length")->capture_default_str()->check(CLI::Range(1, 1 << 14));
  tbb->add_option("--out", tb_out, "table file")->required();
  auto* tbq = tb->add_subcommand("query", "Look up the seed for a target point");
  std::string tq_in;
  double tq_z = 0, tq_R = 0;
  tbq->add_option("--in", tq_in, "table file")->required()->check(CLI::ExistingFile);
  tbq->add_option("--z", tq_z, "target z")->required();
  tbq->add_option("--R", tq_R, "target R >= 0")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      const Params params = sim_p.params();
      ScheduleCsvOptions sopts;
      sopts.scaled = sim_scaled;
      const double T = sim_scaled && sim_T > 0 ? sim_T / params.omega() : sim_T;
      const ControlSchedule schedule = read_schedule_csv(sim_schedule, params, T, sopts);
      const BlochVector<double> r0(sim_r0[0], sim_r0[1], sim_r0[2]);
      if (r0.norm() > 1 + 1e-12) throw std::domain_error("--r0 lies outside the Bloch ball");
      const auto traj = simulate(r0, schedule, params, ode::IntegratorConfig::adaptive(sim_tol));
      Sink sink(sim_out, out);
      *sink << "t,rx,ry,rz\n";
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& r = traj.states()[k];
        *sink << num(traj.times()[k]) << ',' << num(r(0)) << ',' << num(r(1)) << ',' << num(r(2)) << '\n';
      }
    } else if (*ext) {
      const Params params = ext_p.params();
      const ExtremalSeed s = seed(ext_psi0, params, ext_min ? Branch::Min : Branch::Max);
      const ExtremalPath path = integrate_extremal(s, ext_T, params);
      Sink sink(ext_out, out);
      *sink << "tau,z,R,p,q,theta,H\n";
      auto row = [&](double tau, const ExtremalState<double>& st) {
        *sink << num(tau) << ',' << num(st.z) << ',' << num(st.R) << ',' << num(st.p) << ',' << num(st.q) << ','
              << num(st.theta) << ',' << num(hamiltonian(st, params)) << '\n';
      };
      if (ext_dt > 0) {
        const auto n = static_cast<std::size_t>(std::ceil(ext_T / ext_dt - 1e-9));
        for (std::size_t k = 0; k <= n; ++k) {
          const double tau = std::min(ext_T, static_cast<double>(k) * ext_dt);
          row(tau, path.folded_at(tau));
        }
      } else {
        const auto states = path.stored_states();
        for (std::size_t k = 0; k < states.size(); ++k) row(path.raw.times()[k], states[k]);
      }
    } else if (*rs) {
      const Params params = rs_p.params();
      ReachOptions opts;
      opts.n_seeds = rs_seeds;
      opts.raster = rs_raster;
      const double Ts[] = {rs_T};
      const ReachableSet2D set = compute_reachable_sets(Ts, params, opts).front();
      warn_failures(set.failures, err);
      if (!rs_out.empty() || (rs_svg.empty() && rs_obj.empty())) {
        Sink sink(rs_out, out);
        *sink << "z,R\n";
        for (int j = 0; j < set.resolution(); ++j)
          for (int i = 0; i < set.resolution(); ++i)
            if (set.occupied(i, j)) {
              const auto c = set.cell_center(i, j);
              *sink << num(c(0)) << ',' << num(c(1)) << '\n';
            }
      }
      if (!rs_svg.empty()) {
        SvgOptions so;
        if (!rs_no_spiral) so.spiral = spiral_region(params);
        write_file(rs_svg, [&](std::ostream& f) { write_svg(set, f, so); });
      }
      if (!rs_obj.empty()) {
        const TriangleMesh mesh = revolve_to_3d(set, rs_angles);
        write_file(rs_obj, [&](std::ostream& f) { write_obj(mesh, f); });
      }
    } else if (*mv) {
      const Params params = mv_p.params();
      ReachOptions opts;
      opts.n_seeds = mv_seeds;
      opts.raster = mv_raster;
      std::vector<double> Ts;
      for (int k = 1; k <= mv_frames; ++k) Ts.push_back(mv_T * k / mv_frames);
      const auto sets = compute_reachable_sets(Ts, params, opts);
      warn_failures(sets.front().failures, err);
      std::filesystem::create_directories(mv_dir);
      SvgOptions so;
      so.spiral = spiral_region(params);
      for (std::size_t k = 0; k < sets.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "_%04zu.svg", k + 1);
        const std::string path = (std::filesystem::path(mv_dir) / (mv_prefix + name)).string();
        write_file(path, [&](std::ostream& f) { write_svg(sets[k], f, so); });
      }
      out << "wrote " << sets.size() << " frames to " << mv_dir << '\n';
    } else if (*sp) {
      const SpiralRegion region = spiral_region(sp_p.params());
      Sink sink(sp_out, out);
      *sink << "z,R\n";
      for (const auto& q : region.outline(sp_points)) *sink << num(q(0)) << ',' << num(q(1)) << '\n';
    } else if (*la) {
      const Params params = la_p.params();
      out << "gamma_ratio=" << num(params.ratio()) << '\n';
      try {
        out << "guaranteed_radius=" << num(guaranteed_ball_radius(params)) << '\n';
      } catch (const std::domain_error&) {
        out << "guaranteed_radius=vacuous\n";
      }
      out << "delta=" << num(lacuna_delta(params)) << '\n';
      out << "alpha_bound=" << num(lacuna_alpha_bound(params)) << '\n';
      const double margin = barrier_margin(la_phi0, la_alpha, la_beta, params, la_phi_grid, la_theta_grid);
      out << "barrier phi0=" << num(la_phi0) << " alpha=" << num(la_alpha) << " beta=" << num(la_beta)
          << " min_G=" << num(margin) << " certified=" << (margin > 0 ? "yes" : "no") << '\n';
    } else if (*rk) {
      const Params params = rk_p.params();
      Sink sink(rk_out, out);
      *sink << "rx,ry,rz,rank,witness,det,fallback\n";
      for (int a = 0; a < rk_points; ++a)
        for (int b = 0; b < rk_points; ++b)
          for (int c = 0; c < rk_points; ++c) {
            auto coord = [&](int k) { return rk_points == 1 ? 0.0 : -1 + 2.0 * k / (rk_points - 1); };
            const Vec3<double> r(coord(a), coord(b), coord(c));
            const RankCertificate cert = rank_certificate(r, params);
            *sink << num(r(0)) << ',' << num(r(1)) << ',' << num(r(2)) << ',' << cert.rank << ','
                  << cert.witness_name() << ',' << num(cert.determinant) << ',' << (cert.from_span ? 1 : 0)
                  << '\n';
          }
    } else if (*tbb) {
      const Params params = tb_p.params();
      const LookupTable table = build_table(params, tb_seeds, tb_T, tb_grid);
      warn_failures(table.failures, err);
      save_table(table, tb_out);
      out << "cells=" << table.nonempty() << '\n';
    } else if (*tbq) {
      const LookupTable table = load_table(tq_in);
      const QueryResult q = query(table, tq_z, tq_R);
      out << "psi0,theta0,Tmin,i,j,exact\n"
          << num(q.record.psi0) << ',' << num(q.record.theta0) << ',' << num(q.record.T_min) << ',' << q.i << ','
          << q.j << ',' << (q.exact ? 1 : 0) << '\n';
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace qreach::cli
