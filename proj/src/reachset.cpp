#include "qreach/reachset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qreach/parallel.hpp"

namespace qreach {

namespace {
constexpr double kPi = std::numbers::pi;
}

SpiralRegion::SpiralRegion(double ratio) : ratio_(ratio) {
  if (!(ratio >= 0)) throw std::invalid_argument("SpiralRegion: gamma/omega must be >= 0");
}

Vec2<double> SpiralRegion::arc_point(int k, double s) const {
  if (k < 0 || k > 3) throw std::invalid_argument("SpiralRegion::arc_point: arc index must be 0..3");
  const double r = std::exp(-ratio_ * s / 2);
  const double sz = (k == 0 || k == 3) ? 1 : -1;
  const double sR = (k <= 1) ? 1 : -1;
  return {sz * r * std::sin(s), sR * r * std::cos(s)};
}

std::vector<Vec2<double>> SpiralRegion::outline(int per_arc) const {
  if (per_arc < 2) throw std::invalid_argument("SpiralRegion::outline: need at least 2 points per arc");
  // Counter-clockwise from (0, 1): arcs (-,+), (-,-), (+,-), (+,+), each
  // traversed so consecutive arcs share their endpoints.
  std::vector<Vec2<double>> pts;
  const double ds = (kPi / 2) / (per_arc - 1);
  for (int a = 0; a < 4; ++a) {
    const int k = (a + 1) % 4;
    const bool rising = (a % 2 == 0);
    for (int m = 0; m + 1 < per_arc; ++m) {
      const double s = rising ? m * ds : kPi / 2 - m * ds;
      pts.push_back(arc_point(k, s));
    }
  }
  return pts;
}

bool SpiralRegion::contains(double z, double R) const {
  const double rho = std::hypot(z, R);
  const double s = std::atan2(std::abs(z), std::abs(R));
  return rho <= std::exp(-ratio_ * s / 2);
}

SpiralRegion spiral_region(const Params& params) { return SpiralRegion(params.ratio()); }

double guaranteed_ball_radius(const Params& params) {
  const double r = 1 - kPi / 4 * params.ratio();
  if (!(r > 0)) throw std::domain_error("guaranteed_ball_radius: gamma/omega >= 4/pi, certificate is vacuous");
  return r;
}

double lacuna_delta(const Params& params) { return kPi * params.gamma() / (4 * params.omega()); }

double lacuna_alpha_bound(const Params& params) {
  const double e = params.ratio();
  return 0.5 / std::sqrt(1 + e * e);
}

BarrierTriangle::BarrierTriangle(double phi0_, double alpha_, double beta_, const Params& params)
    : phi0(phi0_), alpha(alpha_), beta(beta_), ratio(params.ratio()) {
  if (!(alpha > 0) || !(beta > 0)) throw std::invalid_argument("BarrierTriangle: alpha and beta must be > 0");
  if (!(ratio > 0)) throw std::invalid_argument("BarrierTriangle: gamma must be > 0");
}

std::pair<double, double> BarrierTriangle::edge_range(Edge edge) const {
  return edge == Edge::Plus ? std::pair{phi0, phi0 + beta} : std::pair{phi0 - beta, phi0};
}

double BarrierTriangle::edge_rho(Edge edge, double phi) const {
  const auto [lo, hi] = edge_range(edge);
  const double slack = 1e-12 * std::max(1.0, std::abs(phi0));
  if (phi < lo - slack || phi > hi + slack) throw std::invalid_argument("BarrierTriangle: phi outside edge range");
  return edge == Edge::Plus ? 1 + alpha * ratio * (phi - phi0 - beta) : 1 - alpha * ratio * (phi - phi0 + beta);
}

bool BarrierTriangle::contains(double z, double R) const {
  const double rho = std::hypot(z, R);
  const double d = std::remainder(std::atan2(R, z) - phi0, 2 * kPi);
  if (std::abs(d) > beta || rho > 1) return false;
  return rho >= 1 - alpha * ratio * (beta - std::abs(d));
}

double barrier_values(const BarrierTriangle& t, Edge edge, double phi, double theta, const Params& params) {
  const double rho = t.edge_rho(edge, phi);
  const Vec2<double> v = polar_rhs(PolarState<double>{rho, phi}, theta, params);
  const double slope = t.alpha * t.ratio;
  return -v(0) + (edge == Edge::Plus ? slope : -slope) * v(1);
}

double barrier_margin(double phi0, double alpha, double beta, const Params& params, int phi_grid, int theta_grid) {
  if (!(std::abs(std::sin(phi0)) < 1))
    throw std::invalid_argument("barrier_certificate: |sin phi0| must be < 1");
  if (phi_grid < 2 || theta_grid < 1) throw std::invalid_argument("barrier_certificate: grid too small");
  const BarrierTriangle tri(phi0, alpha, beta, params);
  double m = std::numeric_limits<double>::infinity();
  for (Edge edge : {Edge::Plus, Edge::Minus}) {
    const auto [lo, hi] = tri.edge_range(edge);
    for (int a = 0; a < phi_grid; ++a) {
      const double phi = lo + (hi - lo) * a / (phi_grid - 1);
      for (int b = 0; b < theta_grid; ++b) {
        const double theta = 2 * kPi * b / theta_grid;
        m = std::min(m, barrier_values(tri, edge, phi, theta, params));
      }
    }
  }
  return m;
}

bool barrier_certificate(double phi0, double alpha, double beta, const Params& params, int phi_grid,
                         int theta_grid) {
  return barrier_margin(phi0, alpha, beta, params, phi_grid, theta_grid) > 0;
}

ReachableSet2D::ReachableSet2D(int N, double T_scaled, std::vector<std::uint8_t> cells)
    : N_(N), T_(T_scaled), cells_(std::move(cells)) {
  if (N <= 0) throw std::invalid_argument("ReachableSet2D: resolution must be > 0");
  if (cells_.size() != static_cast<std::size_t>(N) * static_cast<std::size_t>(N))
    throw std::invalid_argument("ReachableSet2D: raster size mismatch");
  boundary_ = marching_squares(cells_, N, N, -1.0, -1.0, cell_width(), cell_width());
}

Vec2<double> ReachableSet2D::cell_center(int i, int j) const {
  return {-1 + (2.0 * i + 1) / N_, -1 + (2.0 * j + 1) / N_};
}

bool ReachableSet2D::cell_of(double z, double R, int& i, int& j) const {
  const double fi = std::floor((z + 1) * N_ / 2), fj = std::floor((R + 1) * N_ / 2);
  if (!(fi >= 0 && fj >= 0 && fi < N_ && fj < N_)) return false;
  i = static_cast<int>(fi);
  j = static_cast<int>(fj);
  return true;
}

std::size_t ReachableSet2D::count() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](auto c) { return c != 0; }));
}

std::size_t ReachableSet2D::violations_against(const ReachableSet2D& other) const {
  if (other.N_ != N_) throw std::invalid_argument("ReachableSet2D: resolutions differ");
  std::size_t v = 0;
  for (std::size_t k = 0; k < cells_.size(); ++k)
    if (cells_[k] && !other.cells_[k]) ++v;
  return v;
}

namespace {

using P2 = Vec2<double>;

struct Raster {
  int N;
  std::vector<std::uint8_t> cells;

  explicit Raster(int n) : N(n), cells(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {}

  // Continuous cell coordinates: cell i spans [i, i+1).
  double gx(double z) const { return (z + 1) * N / 2; }

  void mark(int i, int j) {
    if (i >= 0 && j >= 0 && i < N && j < N) cells[static_cast<std::size_t>(j) * N + i] = 1;
  }

  void mark_point(const P2& p) { mark(static_cast<int>(std::floor(gx(p(0)))), static_cast<int>(std::floor(gx(p(1))))); }

  // Every cell the segment passes through.
  void mark_segment(const P2& a, const P2& b) {
    double x0 = gx(a(0)), y0 = gx(a(1));
    const double x1 = gx(b(0)), y1 = gx(b(1));
    int i = static_cast<int>(std::floor(x0)), j = static_cast<int>(std::floor(y0));
    const int i1 = static_cast<int>(std::floor(x1)), j1 = static_cast<int>(std::floor(y1));
    mark(i, j);
    const double dx = x1 - x0, dy = y1 - y0;
    const int si = dx > 0 ? 1 : -1, sj = dy > 0 ? 1 : -1;
    const double tdx = dx != 0 ? std::abs(1 / dx) : std::numeric_limits<double>::infinity();
    const double tdy = dy != 0 ? std::abs(1 / dy) : std::numeric_limits<double>::infinity();
    double tx = dx != 0 ? ((si > 0 ? std::floor(x0) + 1 - x0 : x0 - std::floor(x0)) * tdx)
                        : std::numeric_limits<double>::infinity();
    double ty = dy != 0 ? ((sj > 0 ? std::floor(y0) + 1 - y0 : y0 - std::floor(y0)) * tdy)
                        : std::numeric_limits<double>::infinity();
    for (int guard = 0; (i != i1 || j != j1) && guard < 4 * N; ++guard) {
      if (tx < ty) {
        i += si;
        tx += tdx;
      } else {
        j += sj;
        ty += tdy;
      }
      if (tx > 1 && ty > 1 && (i != i1 || j != j1)) {
        // Rounding left us one step short of the end cell.
        mark(i, j);
        break;
      }
      mark(i, j);
    }
    mark(i1, j1);
  }

  // Cells whose centers lie in the closed triangle.
  void fill_triangle(const P2& a, const P2& b, const P2& c) {
    const double ax = gx(a(0)), ay = gx(a(1)), bx = gx(b(0)), by = gx(b(1)), cx = gx(c(0)), cy = gx(c(1));
    const double area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if (area == 0) return;
    const int ilo = std::max(0, static_cast<int>(std::floor(std::min({ax, bx, cx}) - 0.5)));
    const int ihi = std::min(N - 1, static_cast<int>(std::ceil(std::max({ax, bx, cx}) - 0.5)));
    const int jlo = std::max(0, static_cast<int>(std::floor(std::min({ay, by, cy}) - 0.5)));
    const int jhi = std::min(N - 1, static_cast<int>(std::ceil(std::max({ay, by, cy}) - 0.5)));
    const double eps = -1e-12 * std::abs(area);
    for (int j = jlo; j <= jhi; ++j) {
      const double py = j + 0.5;
      for (int i = ilo; i <= ihi; ++i) {
        const double px = i + 0.5;
        double w0 = (bx - px) * (cy - py) - (by - py) * (cx - px);
        double w1 = (cx - px) * (ay - py) - (cy - py) * (ax - px);
        double w2 = (ax - px) * (by - py) - (ay - py) * (bx - px);
        if (area < 0) {
          w0 = -w0;
          w1 = -w1;
          w2 = -w2;
        }
        if (w0 >= eps && w1 >= eps && w2 >= eps) mark(i, j);
      }
    }
  }
};

struct Ray {
  double psi = 0;
  int depth = 0;
  std::vector<P2> samples;  // signed (z, R) on the shared time grid
  bool ok = false;
};

void trace(Ray& ray, const std::vector<double>& grid, double T, const Params& params, const ExtremalOptions& opts,
           std::string& error) {
  try {
    const ExtremalSeed s = seed(ray.psi, params);
    const ExtremalPath path = integrate_extremal(s, T, params, opts);
    ray.samples.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Vec5<double> y = path.raw.at(grid[j]);
      ray.samples[j] = P2(y(0), y(1));
    }
    ray.ok = true;
  } catch (const std::exception& e) {
    error = e.what();
    ray.ok = false;
  }
}

double max_separation(const Ray& a, const Ray& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.samples.size(); ++j) m = std::max(m, (a.samples[j] - b.samples[j]).norm());
  return m;
}

}  // namespace

std::vector<ReachableSet2D> compute_reachable_sets(std::span<const double> T_scaled, const Params& params,
                                                   const ReachOptions& opts) {
  if (T_scaled.empty()) throw std::invalid_argument("compute_reachable_sets: no times requested");
  for (double T : T_scaled)
    if (!(T > 0)) throw std::invalid_argument("compute_reachable_sets: T must be > 0");
  if (opts.n_seeds < 64) throw std::invalid_argument("compute_reachable_sets: n_seeds must be >= 64");
  if (opts.raster < 2) throw std::invalid_argument("compute_reachable_sets: raster must be >= 2");

  std::vector<double> levels(T_scaled.begin(), T_scaled.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const double T_max = levels.back();
  const int N = opts.raster;
  const double h = 2.0 / N;

  // Shared sample times: about one cell of travel per step, plus every level.
  const double speed = 1 + 2 * params.ratio();
  const auto steps = static_cast<std::size_t>(std::ceil(T_max * speed / h));
  std::vector<double> grid;
  for (std::size_t k = 0; k <= steps; ++k) grid.push_back(T_max * static_cast<double>(k) / static_cast<double>(steps));
  grid.insert(grid.end(), levels.begin(), levels.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [&](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, T_max); }),
             grid.end());
  // Snap so each level is exactly a grid value.
  for (double T : levels) {
    auto it = std::min_element(grid.begin(), grid.end(),
                               [&](double a, double b) { return std::abs(a - T) < std::abs(b - T); });
    *it = T;
  }

  std::vector<SeedFailure> failures;
  auto run = [&](std::vector<Ray>& rays) {
    std::vector<std::string> errors(rays.size());
    parallel_for(rays.size(), [&](std::size_t k) { trace(rays[k], grid, T_max, params, opts.extremal, errors[k]); });
    for (std::size_t k = 0; k < rays.size(); ++k)
      if (!rays[k].ok) failures.push_back({rays[k].psi, errors[k]});
  };

  const std::vector<double> psis = seed_grid(opts.n_seeds);
  std::vector<Ray> rays(psis.size());
  for (std::size_t k = 0; k < psis.size(); ++k) rays[k].psi = psis[k];
  run(rays);

  // Bisect seed intervals whose extremals drift apart. A failed seed stays in
  // the list as a barrier: its neighbors are refined towards it but never
  // joined across it.
  const double two_pi = 2 * std::numbers::pi;
  const double max_gap = opts.max_gap_cells * h;
  const double min_width = two_pi / static_cast<double>(opts.n_seeds) / std::ldexp(1.0, opts.refine_depth);
  for (int level = 0; level < opts.refine_depth; ++level) {
    std::vector<Ray> fresh;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      const Ray& a = rays[k];
      const Ray& b = rays[(k + 1) % rays.size()];
      if (!a.ok && !b.ok) continue;
      const double b_psi = (k + 1 == rays.size()) ? b.psi + two_pi : b.psi;
      if (b_psi - a.psi < 2 * min_width) continue;
      if (a.ok && b.ok && max_separation(a, b) <= max_gap) continue;
      Ray mid;
      mid.psi = std::fmod(0.5 * (a.psi + b_psi), two_pi);
      mid.depth = level + 1;
      fresh.push_back(std::move(mid));
    }
    if (fresh.empty()) break;
    run(fresh);
    for (auto& r : fresh) rays.push_back(std::move(r));
    std::sort(rays.begin(), rays.end(), [](const Ray& a, const Ray& b) { return a.psi < b.psi; });
  }
  if (std::count_if(rays.begin(), rays.end(), [](const Ray& r) { return r.ok; }) < 2)
    throw std::runtime_error("compute_reachable_sets: fewer than two extremals succeeded");

  // Each quad or segment is drawn into the first level whose time covers it;
  // the cumulative union below then gives the time <= T sets.
  std::vector<std::size_t> level_of(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    level_of[j] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), grid[j] * (1 - 1e-14)) -
                                           levels.begin());
  std::vector<Raster> rasters(levels.size(), Raster(N));
  const double fill_limit = 2 * max_gap;
  for (std::size_t k = 0; k < rays.size(); ++k) {
    if (!rays[k].ok) continue;
    const auto& A = rays[k].samples;
    const Ray& next = rays[(k + 1) % rays.size()];
    const bool join = next.ok;
    const auto& B = join ? next.samples : A;
    rasters[0].mark_point(A[0]);
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
      const std::size_t m = level_of[j + 1];
      if (m >= levels.size()) break;
      Raster& r = rasters[m];
      r.mark_segment(A[j], A[j + 1]);
      const P2 &a = A[j], &b = A[j + 1], &c = B[j + 1], &d = B[j];
      if (join && (a - d).norm() <= fill_limit && (b - c).norm() <= fill_limit) {
        r.fill_triangle(a, b, c);
        r.fill_triangle(a, c, d);
      }
    }
  }
  for (std::size_t m = 1; m < rasters.size(); ++m)
    for (std::size_t k = 0; k < rasters[m].cells.size(); ++k) rasters[m].cells[k] |= rasters[m - 1].cells[k];

  std::vector<ReachableSet2D> out;
  out.reserve(levels.size());
  for (std::size_t m = 0; m < levels.size(); ++m) {
    auto& cells = rasters[m].cells;
    for (int j = 0; j < N / 2; ++j)
      for (int i = 0; i < N; ++i) {
        auto& lo = cells[static_cast<std::size_t>(j) * N + i];
        auto& hi = cells[static_cast<std::size_t>(N - 1 - j) * N + i];
        lo = hi = static_cast<std::uint8_t>(lo | hi);
      }
    ReachableSet2D set(N, levels[m], std::move(cells));
    set.failures = failures;
    out.push_back(std::move(set));
  }
  // Return in the caller's order.
  std::vector<ReachableSet2D> ordered;
  ordered.reserve(T_scaled.size());
  for (double T : T_scaled) {
    const auto idx = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), T) - levels.begin());
    ordered.push_back(out[idx]);
  }
  return ordered;
}

ReachableSet2D compute_reachable_set(double T_scaled, std::size_t n_seeds, int raster, const Params& params) {
  ReachOptions opts;
  opts.n_seeds = n_seeds;
  opts.raster = raster;
  const double T[] = {T_scaled};
  return std::move(compute_reachable_sets(T, params, opts).front());
}

}  // namespace qreach
