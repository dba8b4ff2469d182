#include "qreach/contour.hpp"

#include <array>
#include <stdexcept>

namespace qreach {

std::vector<Polyline> marching_squares(const std::vector<std::uint8_t>& grid, int nx, int ny, double x0, double y0,
                                       double dx, double dy) {
  if (nx <= 0 || ny <= 0 || grid.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw std::invalid_argument("marching_squares: grid size mismatch");

  // Padded corner lattice: corner (a, b) is cell (a - 1, b - 1).
  const int px = nx + 2, py = ny + 2;
  auto inside = [&](int a, int b) {
    const int i = a - 1, j = b - 1;
    return i >= 0 && j >= 0 && i < nx && j < ny && grid[static_cast<std::size_t>(j) * nx + i] != 0;
  };
  // Edge keys: horizontal edge (a,b)-(a+1,b) and vertical edge (a,b)-(a,b+1).
  const long nkeys = 2L * px * py;
  auto hkey = [&](int a, int b) { return 2L * (static_cast<long>(b) * px + a); };
  auto vkey = [&](int a, int b) { return 2L * (static_cast<long>(b) * px + a) + 1; };

  std::vector<long> next(static_cast<std::size_t>(nkeys), -1);
  for (int b = 0; b + 1 < py; ++b) {
    for (int a = 0; a + 1 < px; ++a) {
      const std::array<bool, 4> c{inside(a, b), inside(a + 1, b), inside(a + 1, b + 1), inside(a, b + 1)};
      const int in = c[0] + c[1] + c[2] + c[3];
      if (in == 0 || in == 4) continue;
      // Edge k joins corner k to corner k+1, walking counter-clockwise.
      const std::array<long, 4> key{hkey(a, b), vkey(a + 1, b), hkey(a, b + 1), vkey(a, b)};
      for (int k = 0; k < 4; ++k) {
        if (!(c[k] && !c[(k + 1) % 4])) continue;  // exit crossing
        // Pair with the nearest entry crossing found walking clockwise.
        for (int d = 1; d < 4; ++d) {
          const int m = (k - d + 4) % 4;
          if (!c[m] && c[(m + 1) % 4]) {
            next[static_cast<std::size_t>(key[k])] = key[m];
            break;
          }
        }
      }
    }
  }

  auto point = [&](long key) {
    const long cell = key / 2;
    const int a = static_cast<int>(cell % px), b = static_cast<int>(cell / px);
    // Corner (a, b) sits at half-index m = 2a - 1; the edge midpoint adds one.
    long mx = 2L * a - 1, my = 2L * b - 1;
    if (key % 2 == 0)
      mx += 1;
    else
      my += 1;
    return Vec2<double>(x0 + static_cast<double>(mx) * dx / 2, y0 + static_cast<double>(my) * dy / 2);
  };

  std::vector<Polyline> out;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(nkeys), 0);
  for (long k0 = 0; k0 < nkeys; ++k0) {
    if (next[static_cast<std::size_t>(k0)] < 0 || seen[static_cast<std::size_t>(k0)]) continue;
    Polyline line;
    line.closed = true;
    long k = k0;
    while (!seen[static_cast<std::size_t>(k)]) {
      seen[static_cast<std::size_t>(k)] = 1;
      line.points.push_back(point(k));
      k = next[static_cast<std::size_t>(k)];
      if (k < 0) throw std::logic_error("marching_squares: broken contour");
    }
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace qreach
