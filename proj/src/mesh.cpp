#include "qreach/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace qreach {

namespace {

// Splits a closed contour into maximal runs with R >= 0. With an even
// raster, contour vertices fall exactly on R = 0 where a run meets the axis.
std::vector<std::vector<Vec2<double>>> upper_runs(const Polyline& line, bool& whole) {
  const auto& p = line.points;
  const std::size_t n = p.size();
  std::vector<std::vector<Vec2<double>>> runs;
  whole = false;
  constexpr double kAxis = 1e-12;
  auto up = [&](std::size_t k) { return p[k](1) >= -kAxis; };
  std::size_t start = n;
  for (std::size_t k = 0; k < n; ++k)
    if (!up(k)) {
      start = k;
      break;
    }
  if (start == n) {
    whole = true;
    runs.push_back(p);
    return runs;
  }
  std::vector<Vec2<double>> cur;
  for (std::size_t s = 1; s <= n; ++s) {
    const std::size_t k = (start + s) % n;
    if (up(k)) {
      cur.push_back(p[k]);
    } else if (!cur.empty()) {
      runs.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) runs.push_back(std::move(cur));
  for (auto& r : runs)
    for (auto& q : r)
      if (std::abs(q(1)) <= kAxis) q(1) = 0;
  return runs;
}

}  // namespace

TriangleMesh revolve_to_3d(const ReachableSet2D& set, int n_angles) {
  if (n_angles < 3) throw std::invalid_argument("revolve_to_3d: n_angles must be >= 3");
  TriangleMesh mesh;
  const auto na = static_cast<std::size_t>(n_angles);
  for (const auto& line : set.boundary()) {
    if (!line.closed) throw std::invalid_argument("revolve_to_3d: boundary polyline is not closed");
    bool whole = false;
    for (const auto& run : upper_runs(line, whole)) {
      const std::size_t base = mesh.vertices.size();
      for (const auto& q : run)
        for (std::size_t a = 0; a < na; ++a) {
          const double phi = 2 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(na);
          mesh.vertices.emplace_back(q(0), q(1) * std::cos(phi), q(1) * std::sin(phi));
        }
      const std::size_t m = run.size();
      const std::size_t segs = whole ? m : m - 1;
      for (std::size_t k = 0; k < segs; ++k) {
        const std::size_t k2 = (k + 1) % m;
        for (std::size_t a = 0; a < na; ++a) {
          const std::size_t a2 = (a + 1) % na;
          const std::size_t v00 = base + k * na + a, v01 = base + k * na + a2;
          const std::size_t v10 = base + k2 * na + a, v11 = base + k2 * na + a2;
          mesh.triangles.push_back({v00, v10, v11});
          mesh.triangles.push_back({v00, v11, v01});
        }
      }
    }
  }
  return mesh;
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v(0), v(1), v(2));
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

}  // namespace qreach
