#pragma once

#include <cstdint>
#include <vector>

#include "qreach/bloch.hpp"

namespace qreach {

struct Polyline {
  std::vector<Vec2<double>> points;
  bool closed = false;  ///< last point connects back to the first (not repeated)
};

/// Boundary of the occupied cells of an nx x ny binary grid (row-major,
/// index j * nx + i) by marching squares on cell centers. The grid is padded
/// with empty cells, so every contour is closed. Outer contours run
/// counter-clockwise, holes clockwise; diagonal-only contacts stay separate.
/// Vertex coordinates are x0 + m dx / 2 for integer m, with cell i centered at
/// m = 2 i + 1.
std::vector<Polyline> marching_squares(const std::vector<std::uint8_t>& grid, int nx, int ny, double x0, double y0,
                                       double dx, double dy);

}  // namespace qreach
