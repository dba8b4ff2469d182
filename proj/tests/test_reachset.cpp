#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qreach/contour.hpp"
#include "qreach/mesh.hpp"
#include "qreach/reachset.hpp"
#include "qreach/svg.hpp"

using namespace qreach;
constexpr double kPi = std::numbers::pi;

namespace {

ReachableSet2D disc_set(int N, double radius) {
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(N) * N, 0);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const double z = -1 + (2.0 * i + 1) / N, R = -1 + (2.0 * j + 1) / N;
      cells[static_cast<std::size_t>(j) * N + i] = std::hypot(z, R) <= radius;
    }
  return ReachableSet2D(N, 0, std::move(cells));
}

}  // namespace

TEST_CASE("spiral region") {
  const auto p = Params::scaled(0.1);
  const SpiralRegion s = spiral_region(p);
  CHECK(s.contains(0, 0));
  CHECK(s.contains(0, 1 - 1e-9));
  CHECK(s.contains(0, -1 + 1e-9));
  CHECK_FALSE(s.contains(0, 1 + 1e-9));
  const double corner = std::exp(-0.1 * kPi / 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(std::abs(s.arc_point(k, 0)(1)) - 1) < 1e-15);
    CHECK(std::abs(std::abs(s.arc_point(k, kPi / 2)(0)) - corner) < 1e-15);
  }
  const double r = guaranteed_ball_radius(p);
  CHECK(r == doctest::Approx(1 - 0.025 * kPi));
  int violations = 0;
  for (int a = 0; a <= 400; ++a)
    for (int b = 0; b <= 400; ++b) {
      const double z = -1 + a * 0.005, R = -1 + b * 0.005;
      if (std::hypot(z, R) <= r && !s.contains(z, R)) ++violations;
    }
  CHECK(violations == 0);
  const auto outline = s.outline(16);
  CHECK(outline.size() == 60);
  CHECK((outline.front() - Vec2<double>(0, 1)).norm() < 1e-15);
  CHECK(spiral_region(Params::scaled(0.5)).contains(0.3, -0.2));
}

TEST_CASE("guaranteed radius and alpha bound") {
  CHECK(guaranteed_ball_radius(Params::scaled(0)) == 1);
  CHECK_THROWS_AS(guaranteed_ball_radius(Params::scaled(4 / kPi)), std::domain_error);
  CHECK(lacuna_alpha_bound(Params::scaled(1e-9)) == doctest::Approx(0.5));
  CHECK(lacuna_alpha_bound(Params::scaled(1)) == doctest::Approx(1 / (2 * std::sqrt(2.0))));
  CHECK(lacuna_alpha_bound(Params::scaled(0.1)) == doctest::Approx(0.497519).epsilon(1e-6));
  CHECK(lacuna_delta(Params(4, 1, 0.2)) == doctest::Approx(kPi * 0.2 / 16));
}

TEST_CASE("barrier values") {
  const auto p = Params::scaled(0.1);
  const double e = p.ratio();
  // Small alpha approaches the alpha = 0 closed form on the unit circle.
  for (double phi0 : {0.0, 0.4, -1.0})
    for (double th : {0.0, 1.0, 2.5, 4.0}) {
      const BarrierTriangle t(phi0, 1e-12, 1e-3, p);
      for (double d : {-1e-3, 1e-3}) {
        const double phi = phi0 + d;
        const double expect = 0.5 * e * std::pow(1 - std::sin(phi) * std::sin(th), 2);
        const double g = barrier_values(t, d > 0 ? Edge::Plus : Edge::Minus, phi, th, p);
        CHECK(g == doctest::Approx(expect).epsilon(1e-9));
        CHECK(g >= 0.5 * e * std::pow(1 - std::abs(std::sin(phi)), 2) - 1e-12);
      }
    }
  const BarrierTriangle t(0, 1e-12, 1e-3, p);
  CHECK(barrier_values(t, Edge::Plus, 0.0, 0.7, p) == doctest::Approx(0.5 * e));
  CHECK_THROWS_AS(barrier_values(t, Edge::Plus, -1e-3, 0.7, p), std::invalid_argument);
  CHECK_THROWS_AS(BarrierTriangle(0, 0, 1e-3, p), std::invalid_argument);
}

TEST_CASE("barrier certificate") {
  const auto p = Params::scaled(0.1);
  CHECK(barrier_certificate(0, 0.4, 1e-3, p));
  CHECK_FALSE(barrier_certificate(0, 0.6, 1e-6, p));
  CHECK_THROWS_AS(barrier_certificate(kPi / 2, 0.4, 1e-3, p), std::invalid_argument);
  // Monotone in alpha at fixed beta.
  bool previous = true;
  for (double a = 0.05; a <= 0.6; a += 0.05) {
    const bool now = barrier_certificate(0, a, 1e-3, p, 256, 360);
    CHECK((previous || !now));
    previous = now;
  }
  const BarrierTriangle tri(0, 0.4, 1e-3, p);
  CHECK(tri.contains(1 - 1e-6, 0));
  CHECK_FALSE(tri.contains(1 - 1e-3, 0));
  CHECK_FALSE(tri.contains(0.9, 0.5));
}

TEST_CASE("marching squares") {
  // One cell: a closed diamond around its center.
  const auto one = marching_squares({1}, 1, 1, 0, 0, 1, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].closed);
  CHECK(one[0].points.size() == 4);
  // A ring has an outer contour and a hole.
  std::vector<std::uint8_t> ring(25, 1);
  ring[12] = 0;
  CHECK(marching_squares(ring, 5, 5, 0, 0, 1, 1).size() == 2);
  // Diagonal neighbors stay separate.
  CHECK(marching_squares({1, 0, 0, 1}, 2, 2, 0, 0, 1, 1).size() == 2);
  CHECK(marching_squares({0, 0, 0, 0}, 2, 2, 0, 0, 1, 1).empty());
  CHECK_THROWS_AS(marching_squares({1}, 2, 2, 0, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("raster set helpers") {
  const auto d = disc_set(64, 0.5);
  int i = 0, j = 0;
  REQUIRE(d.cell_of(0.01, 0.01, i, j));
  CHECK(d.occupied(i, j));
  CHECK_FALSE(d.cell_of(1.5, 0, i, j));
  CHECK(d.boundary().size() == 1);
  CHECK(disc_set(64, 0.3).violations_against(d) == 0);
  CHECK(d.violations_against(disc_set(64, 0.3)) > 0);
}

TEST_CASE("revolve to 3d") {
  const int N = 128;
  const auto ball = disc_set(N, 1.0);
  const TriangleMesh mesh = revolve_to_3d(ball, 32);
  std::size_t half = 0;
  for (const auto& line : ball.boundary())
    for (const auto& q : line.points) half += q(1) >= -1e-12;
  CHECK(mesh.vertices.size() == half * 32);
  double dev = 0;
  for (const auto& v : mesh.vertices) {
    dev = std::max(dev, std::abs(v.norm() - 1));
    CHECK(v.norm() <= 1 + 2.0 / N);
  }
  CHECK(dev < 2.0 / N);
  std::ostringstream obj;
  write_obj(mesh, obj);
  CHECK(obj.str().rfind("v ", 0) == 0);
  CHECK_THROWS_AS(revolve_to_3d(ball, 2), std::invalid_argument);
}

TEST_CASE("reachable sets are nested, symmetric and inside the ball") {
  const auto p = Params::scaled(0.1);
  ReachOptions opts;
  opts.n_seeds = 128;
  opts.raster = 128;
  const double Ts[] = {2.0, 0.5, 1.0};
  const auto sets = compute_reachable_sets(Ts, p, opts);
  REQUIRE(sets.size() == 3);
  CHECK(sets[0].T_scaled() == 2.0);
  CHECK(sets[1].violations_against(sets[2]) == 0);
  CHECK(sets[2].violations_against(sets[0]) == 0);
  for (const auto& s : sets) {
    CHECK(s.count() > 0);
    const int N = s.resolution();
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        CHECK(s.occupied(i, j) == s.occupied(i, N - 1 - j));
        if (s.occupied(i, j)) CHECK(s.cell_center(i, j).norm() <= 1 + std::sqrt(2.0) * s.cell_width());
      }
    for (const auto& line : s.boundary()) CHECK(line.closed);
  }
  // The start point is occupied from the first level on.
  int i = 0, j = 0;
  REQUIRE(sets[1].cell_of(0, 1 - 1e-9, i, j));
  CHECK(sets[1].occupied(i, j));
  CHECK_THROWS_AS(compute_reachable_set(1.0, 32, 64, p), std::invalid_argument);
  CHECK_THROWS_AS(compute_reachable_set(0.0, 128, 64, p), std::invalid_argument);
}

TEST_CASE("svg output is deterministic") {
  const auto d = disc_set(32, 0.7);
  SvgOptions o;
  o.spiral = spiral_region(Params::scaled(0.1));
  std::ostringstream a, b;
  write_svg(d, a, o);
  write_svg(d, b, o);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("<circle") != std::string::npos);
  CHECK(a.str().find("<polygon") != std::string::npos);
  CHECK(a.str().rfind("<svg", 0) == 0);
}
