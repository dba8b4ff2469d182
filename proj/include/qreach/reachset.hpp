#pragma once

// Reachable sets of the meridian-plane system from (z, R) = (0, 1), the
// spiral-bounded region that is certainly reachable, and the barrier
// triangles that certify small unreachable neighborhoods of pure states.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qreach/bloch.hpp"
#include "qreach/contour.hpp"
#include "qreach/pmp.hpp"

namespace qreach {

/// Region bounded by the four arcs z = +-e^{-ratio s/2} sin s,
/// R = +-e^{-ratio s/2} cos s, s in [0, pi/2].
class SpiralRegion {
 public:
  explicit SpiralRegion(double ratio);

  double ratio() const noexcept { return ratio_; }
  /// Point of arc k (0..3: quadrant sign pattern (+,+), (-,+), (-,-), (+,-)) at s.
  Vec2<double> arc_point(int k, double s) const;
  /// The closed boundary sampled with `per_arc` points per arc.
  std::vector<Vec2<double>> outline(int per_arc = 64) const;
  /// Radial test against the arc through the same polar angle. Boundary points count as inside.
  bool contains(double z, double R) const;

 private:
  double ratio_;
};

SpiralRegion spiral_region(const Params& params);

/// 1 - (pi/4)(gamma/omega); throws std::domain_error once the radius is not positive.
double guaranteed_ball_radius(const Params& params);

/// The lacuna half-width pi gamma / (4 omega).
double lacuna_delta(const Params& params);

/// 1/2 (1 + gamma^2/omega^2)^{-1/2}.
double lacuna_alpha_bound(const Params& params);

enum class Edge { Plus, Minus };

/// Triangle in the polar (rho, phi) meridian plane below rho = 1 with apex
/// (1 - alpha beta ratio, phi0) and top vertices (1, phi0 +- beta).
struct BarrierTriangle {
  double phi0 = 0;
  double alpha = 0;
  double beta = 0;
  double ratio = 0;

  BarrierTriangle(double phi0, double alpha, double beta, const Params& params);

  /// rho on the given slanted edge; phi must be in that edge's range.
  double edge_rho(Edge edge, double phi) const;
  std::pair<double, double> edge_range(Edge edge) const;
  bool contains(double z, double R) const;
};

/// Outward normal component of the velocity at (edge_rho(phi), phi) under
/// control angle theta, in rescaled time.
double barrier_values(const BarrierTriangle& t, Edge edge, double phi, double theta, const Params& params);

/// Minimum of barrier_values over both slanted edges (phi_grid samples each)
/// and theta_grid control angles.
double barrier_margin(double phi0, double alpha, double beta, const Params& params, int phi_grid = 2048,
                      int theta_grid = 720);

/// barrier_margin > 0. Numerical, not interval-rigorous.
bool barrier_certificate(double phi0, double alpha, double beta, const Params& params, int phi_grid = 2048,
                         int theta_grid = 720);

struct SeedFailure {
  double psi0 = 0;
  std::string message;
};

/// Occupancy raster of the signed meridian plane [-1,1]^2 (x = z, y = R) with
/// N x N cells, cell (i, j) centered at (-1 + (i + 1/2) 2/N, -1 + (j + 1/2) 2/N).
class ReachableSet2D {
 public:
  ReachableSet2D(int N, double T_scaled, std::vector<std::uint8_t> cells);

  int resolution() const noexcept { return N_; }
  double T_scaled() const noexcept { return T_; }
  double cell_width() const noexcept { return 2.0 / N_; }
  Vec2<double> cell_center(int i, int j) const;
  /// Cell containing (z, R); false outside the raster.
  bool cell_of(double z, double R, int& i, int& j) const;
  bool occupied(int i, int j) const { return cells_[static_cast<std::size_t>(j) * N_ + i] != 0; }
  const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }
  std::size_t count() const;
  /// Number of cells occupied here but not in `other` (zero means this is a subset).
  std::size_t violations_against(const ReachableSet2D& other) const;

  const std::vector<Polyline>& boundary() const noexcept { return boundary_; }

  std::vector<SeedFailure> failures;

 private:
  int N_;
  double T_;
  std::vector<std::uint8_t> cells_;
  std::vector<Polyline> boundary_;
};

struct ReachOptions {
  std::size_t n_seeds = 1024;
  int raster = 512;
  int refine_depth = 40;       ///< maximal bisections of a seed interval
  double max_gap_cells = 2.0;  ///< neighbor separation that triggers refinement
  ExtremalOptions extremal{};
};

/// Reachable sets (time <= T) for every requested T from one extremal sweep
/// to the largest T, so the rasters are nested exactly.
std::vector<ReachableSet2D> compute_reachable_sets(std::span<const double> T_scaled, const Params& params,
                                                   const ReachOptions& opts = {});

ReachableSet2D compute_reachable_set(double T_scaled, std::size_t n_seeds, int raster, const Params& params);

}  // namespace qreach
