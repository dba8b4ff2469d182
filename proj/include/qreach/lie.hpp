#pragma once

// Affine vector fields r -> A r + b on 3-space, their Lie brackets, and rank
// certificates for the control system spanned by f0 and f1.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qreach/bloch.hpp"

namespace qreach {

template <typename Scalar>
struct AffineField {
  Eigen::Matrix<Scalar, 3, 3> A = Eigen::Matrix<Scalar, 3, 3>::Zero();
  Vec3<Scalar> b = Vec3<Scalar>::Zero();

  Vec3<Scalar> operator()(const Vec3<Scalar>& r) const { return A * r + b; }

  AffineField operator-() const { return {-A, -b}; }
  friend AffineField operator+(const AffineField& f, const AffineField& g) { return {f.A + g.A, f.b + g.b}; }
  friend AffineField operator*(Scalar s, const AffineField& f) { return {s * f.A, s * f.b}; }
};

/// [f, g] = Df g - Dg f, computed on the coefficients.
template <typename Scalar>
AffineField<Scalar> bracket(const AffineField<Scalar>& f, const AffineField<Scalar>& g) {
  return {f.A * g.A - g.A * f.A, f.A * g.b - g.A * f.b};
}

/// f0..f7 with f3 = [f0,f1], f4 = [f0,f3], f5 = [f1,f3], f6 = [f1,f5] and
/// f7 = (ad f1)^4 f0. f2 is the incoherent-control field.
template <typename Scalar>
std::array<AffineField<Scalar>, 8> canonical_fields(const SystemParams<Scalar>& params) {
  const Scalar e = params.ratio();
  std::array<AffineField<Scalar>, 8> f;
  f[0].A << -e / 2, -1, 0, 1, -e / 2, 0, 0, 0, -e;
  f[0].b << 0, 0, e;
  f[1].A << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  f[2].A.diagonal() << Scalar(-0.5), Scalar(-0.5), Scalar(-1);
  f[3] = bracket(f[0], f[1]);
  f[4] = bracket(f[0], f[3]);
  f[5] = bracket(f[1], f[3]);
  f[6] = bracket(f[1], f[5]);
  f[7] = f[0];
  for (int k = 0; k < 4; ++k) f[7] = bracket(f[1], f[7]);
  return f;
}

template <typename Scalar>
Scalar field_determinant(const AffineField<Scalar>& a, const AffineField<Scalar>& b,
                         const AffineField<Scalar>& c, const Vec3<Scalar>& r) {
  Eigen::Matrix<Scalar, 3, 3> m;
  m << a(r), b(r), c(r);
  return m.determinant();
}

struct RankCertificate {
  int rank = 0;
  std::array<int, 3> witness{};  ///< indices into canonical_fields
  double determinant = 0;
  bool from_span = false;        ///< true when no listed triple certified the point

  std::string witness_name() const {
    return "f" + std::to_string(witness[0]) + ";f" + std::to_string(witness[1]) + ";f" +
           std::to_string(witness[2]);
  }
};

/// Candidate triples tried in order before falling back to the bracket span.
inline constexpr std::array<std::array<int, 3>, 4> kCertificateTriples{
    {{1, 3, 5}, {1, 3, 6}, {3, 4, 6}, {1, 3, 7}}};

/// All brackets of f0, f1 nested up to `depth` levels, evaluated at r.
template <typename Scalar>
std::vector<Vec3<Scalar>> bracket_span(const SystemParams<Scalar>& params, const Vec3<Scalar>& r,
                                       int depth = 4) {
  const auto f = canonical_fields(params);
  std::vector<AffineField<Scalar>> level{f[0], f[1]};
  std::vector<Vec3<Scalar>> out{f[0](r), f[1](r)};
  for (int d = 0; d < depth; ++d) {
    std::vector<AffineField<Scalar>> next;
    for (const auto& gen : {f[0], f[1]})
      for (const auto& g : level) next.push_back(bracket(gen, g));
    for (const auto& g : next) out.push_back(g(r));
    level = std::move(next);
  }
  return out;
}

template <typename Scalar>
RankCertificate rank_certificate(const Vec3<Scalar>& r, const SystemParams<Scalar>& params,
                                 Scalar det_tol = Scalar(1e-12)) {
  if (!(params.gamma() > 0))
    throw std::invalid_argument("rank_certificate: gamma must be > 0 (all certificates vanish)");
  const auto f = canonical_fields(params);
  RankCertificate cert;
  for (const auto& t : kCertificateTriples) {
    const Scalar d = field_determinant(f[t[0]], f[t[1]], f[t[2]], r);
    if (std::abs(d) > det_tol) {
      cert.rank = 3;
      cert.witness = t;
      cert.determinant = static_cast<double>(d);
      return cert;
    }
  }
  const auto span = bracket_span(params, r);
  Eigen::Matrix<Scalar, 3, Eigen::Dynamic> m(3, static_cast<Eigen::Index>(span.size()));
  for (std::size_t k = 0; k < span.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = span[k];
  Eigen::JacobiSVD<decltype(m)> svd(m);
  const auto sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > det_tol * std::max(Scalar(1), sv(0))) ++rank;
  cert.rank = rank;
  cert.from_span = true;
  // Best-conditioned triple among the named fields as the reported witness.
  constexpr std::array<int, 7> named{0, 1, 3, 4, 5, 6, 7};
  Scalar best = -1;
  for (std::size_t i = 0; i < named.size(); ++i)
    for (std::size_t j = i + 1; j < named.size(); ++j)
      for (std::size_t k = j + 1; k < named.size(); ++k) {
        const Scalar d = field_determinant(f[named[i]], f[named[j]], f[named[k]], r);
        if (std::abs(d) > best) {
          best = std::abs(d);
          cert.witness = {named[i], named[j], named[k]};
          cert.determinant = static_cast<double>(d);
        }
      }
  return cert;
}

}  // namespace qreach
