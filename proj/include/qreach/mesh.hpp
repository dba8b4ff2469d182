#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "qreach/bloch.hpp"
#include "qreach/reachset.hpp"

namespace qreach {

struct TriangleMesh {
  std::vector<Vec3<double>> vertices;  ///< (r_x, r_y, r_z)
  std::vector<std::array<std::size_t, 3>> triangles;
};

/// Surface of revolution of the R >= 0 half of every boundary contour about
/// the r_x axis. Each half-contour contributes its point count times
/// n_angles vertices. Throws on open contours or n_angles < 3.
TriangleMesh revolve_to_3d(const ReachableSet2D& set, int n_angles);

/// Wavefront OBJ (1-based indices).
void write_obj(const TriangleMesh& mesh, std::ostream& out);

}  // namespace qreach
