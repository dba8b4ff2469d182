#include <doctest.h>

#include <random>

#include "qreach/lie.hpp"

using namespace qreach;
using V3 = Vec3<double>;
using F = AffineField<double>;

namespace {

F random_field(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1, 1);
  F f;
  for (int i = 0; i < 3; ++i) {
    f.b(i) = U(rng);
    for (int j = 0; j < 3; ++j) f.A(i, j) = U(rng);
  }
  return f;
}

double dist(const F& f, const F& g) { return (f.A - g.A).cwiseAbs().maxCoeff() + (f.b - g.b).cwiseAbs().maxCoeff(); }

// Affine field recovered from its values at 0 and the unit vectors.
F from_values(const std::function<V3(const V3&)>& fn) {
  F f;
  f.b = fn(V3::Zero());
  for (int j = 0; j < 3; ++j) f.A.col(j) = fn(V3::Unit(j)) - f.b;
  return f;
}

}  // namespace

TEST_CASE("bracket algebra") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const F f = random_field(rng), g = random_field(rng), h = random_field(rng);
    CHECK(dist(bracket(f, f), F{}) < 1e-15);
    CHECK(dist(bracket(f, g), -bracket(g, f)) < 1e-15);
    CHECK(dist(bracket(f, 2.0 * g + h), 2.0 * bracket(f, g) + bracket(f, h)) < 1e-14);
    const F jac = bracket(f, bracket(g, h)) + bracket(g, bracket(h, f)) + bracket(h, bracket(f, g));
    CHECK(dist(jac, F{}) < 1e-14);
  }
}

TEST_CASE("bracket matches the Jacobian definition") {
  // [f, g](r) = Df(r) g(r) - Dg(r) f(r) for affine fields.
  std::mt19937_64 rng(2);
  const F f = random_field(rng), g = random_field(rng);
  const V3 r(0.3, -0.1, 0.6);
  CHECK((bracket(f, g)(r) - (f.A * g(r) - g.A * f(r))).norm() < 1e-14);
}

TEST_CASE("canonical fields in closed form") {
  for (double e : {0.01, 0.1, 0.5}) {
    const auto f = canonical_fields(Params::scaled(e));
    const F f3 = from_values([&](const V3& r) { return V3(r(2), e * (1 - r(2) / 2), -r(0) - e / 2 * r(1)); });
    const F f4 = from_values([&](const V3& r) {
      return V3(e * (r(2) - 2), (1 - e * e / 4) * r(2), e * r(0) - (1 - e * e / 4) * r(1));
    });
    const F f5 = from_values([&](const V3& r) { return V3(-r(1), r(0) + e * r(1), e * (1 - r(2))); });
    const F f6 = from_values([&](const V3& r) { return V3(-r(2), e * (2 * r(2) - 1), r(0) + 2 * e * r(1)); });
    CHECK(dist(f[3], f3) < 1e-14);
    CHECK(dist(f[5], f5) < 1e-14);
    CHECK(dist(f[6], f6) < 1e-14);
    // (ad f1)^4 f0 expanded by hand.
    const F f7 = from_values([&](const V3& r) { return V3(-r(1), r(0) + 4 * e * r(1), e * (1 - 4 * r(2))); });
    CHECK(dist(f[7], f7) < 1e-14);
    CHECK(dist(f[4], f4) < 1e-14);
  }
}

TEST_CASE("determinant certificates") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  for (double e : {0.01, 0.1, 0.5}) {
    const auto f = canonical_fields(Params::scaled(e));
    for (int k = 0; k < 100; ++k) {
      const V3 r(U(rng), U(rng), U(rng));
      const double ry = r(1), rz = r(2);
      CHECK(std::abs(field_determinant(f[1], f[3], f[5], r) - (ry * ry - rz * rz * rz + rz * rz) * e) < 1e-10);
      CHECK(std::abs(field_determinant(f[1], f[3], f[6], r) - 3 * e * ry * rz * rz) < 1e-10);
    }
    CHECK(std::abs(field_determinant(f[1], f[3], f[7], V3(0.37, 0, 1)) + 3 * e) < 1e-10);
    // On the r_x axis f6 = -f3, so the certificate falls through to the bracket span.
    const V3 axis(0.4, 0, 0);
    CHECK(std::abs(field_determinant(f[3], f[4], f[6], axis)) < 1e-12);
    CHECK(std::abs(field_determinant(f[3], f[4], f[5], axis) - 2 * e * (e * e + 0.16)) < 1e-12);
  }
}

TEST_CASE("rank certificate") {
  const auto p = Params::scaled(0.1);
  const auto c = rank_certificate(V3(0.2, 0.3, 0.4), p);
  CHECK(c.rank == 3);
  CHECK(c.witness == std::array<int, 3>{1, 3, 5});
  CHECK_FALSE(c.from_span);
  CHECK(c.witness_name() == "f1;f3;f5");
  const auto axis = rank_certificate(V3(0.5, 0, 0), p);
  CHECK(axis.rank == 3);
  CHECK(axis.from_span);
  CHECK(std::abs(axis.determinant) > 1e-6);
  CHECK_THROWS_AS(rank_certificate(V3(0, 0, 1), Params::scaled(0)), std::invalid_argument);
}

TEST_CASE("full rank on a grid over the Bloch ball") {
  for (double e : {0.01, 0.1, 0.5}) {
    const auto p = Params::scaled(e);
    int bad = 0;
    for (int a = 0; a < 21; ++a)
      for (int b = 0; b < 21; ++b)
        for (int c = 0; c < 21; ++c) {
          const V3 r(-1 + a * 0.1, -1 + b * 0.1, -1 + c * 0.1);
          if (r.norm() > 1 + 1e-12) continue;
          bad += rank_certificate(r, p).rank != 3;
        }
    CHECK(bad == 0);
  }
}
