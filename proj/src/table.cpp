#include "qreach/table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "qreach/errors.hpp"
#include "qreach/parallel.hpp"

namespace qreach {

namespace {
constexpr const char* kMagic = "#qubit-reach-table";
constexpr const char* kVersion = "v1";
}  // namespace

LookupTable::LookupTable(double gamma_ratio, int grid) : ratio_(gamma_ratio), N_(grid) {
  if (!(gamma_ratio >= 0)) throw std::invalid_argument("LookupTable: gamma_ratio must be >= 0");
  if (grid < 1) throw std::invalid_argument("LookupTable: grid must be >= 1");
  cells_.resize(static_cast<std::size_t>(2 * grid) * static_cast<std::size_t>(grid));
}

std::size_t LookupTable::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= cells_z() || j >= cells_R()) throw std::out_of_range("LookupTable: cell out of range");
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(cells_z()) + static_cast<std::size_t>(i);
}

Vec2<double> LookupTable::cell_center(int i, int j) const {
  return {-1 + (i + 0.5) / N_, (j + 0.5) / N_};
}

bool LookupTable::cell_of(double z, double R, int& i, int& j) const {
  const double fi = std::floor((z + 1) * N_), fj = std::floor(R * N_);
  // The closed upper edges belong to the last cells.
  const double ci = std::min(fi, static_cast<double>(cells_z() - 1));
  const double cj = std::min(fj, static_cast<double>(cells_R() - 1));
  if (!(ci >= 0 && cj >= 0) || z > 1 || R > 1) return false;
  i = static_cast<int>(ci);
  j = static_cast<int>(cj);
  return true;
}

void LookupTable::set(int i, int j, const TableRecord& rec) {
  if (!(rec.T_min >= 0)) throw std::invalid_argument("LookupTable: T_min must be >= 0");
  cells_[index(i, j)] = rec;
}

std::size_t LookupTable::nonempty() const {
  std::size_t n = 0;
  for (const auto& c : cells_) n += c.has_value();
  return n;
}

LookupTable build_table(const Params& params, std::size_t n_seeds, double T_max_scaled, int grid,
                        const ExtremalOptions& opts) {
  if (n_seeds < 256) throw std::invalid_argument("build_table: n_seeds must be >= 256");
  if (!(T_max_scaled > 0)) throw std::invalid_argument("build_table: T_max must be > 0");
  LookupTable table(params.ratio(), grid);

  struct Hit {
    int i, j;
    double tau;
  };
  const std::vector<double> psis = seed_grid(n_seeds);
  std::vector<ExtremalSeed> seeds(n_seeds);
  std::vector<std::vector<Hit>> hits(n_seeds);
  std::vector<std::string> errors(n_seeds);
  // A quarter cell of travel between samples.
  const double speed = 1 + 2 * params.ratio();
  const auto steps = static_cast<std::size_t>(std::ceil(T_max_scaled * speed * 4 * grid));

  parallel_for(n_seeds, [&](std::size_t k) {
    try {
      seeds[k] = seed(psis[k], params);
      const ExtremalPath path = integrate_extremal(seeds[k], T_max_scaled, params, opts);
      std::vector<std::uint8_t> seen(static_cast<std::size_t>(2 * grid) * static_cast<std::size_t>(grid), 0);
      for (std::size_t s = 0; s <= steps; ++s) {
        const double tau = T_max_scaled * static_cast<double>(s) / static_cast<double>(steps);
        const Vec5<double> y = path.raw.at(tau);
        int i = 0, j = 0;
        if (!table.cell_of(y(0), std::abs(y(1)), i, j)) continue;
        auto& flag = seen[static_cast<std::size_t>(j) * static_cast<std::size_t>(2 * grid) + static_cast<std::size_t>(i)];
        if (flag) continue;
        flag = 1;
        hits[k].push_back({i, j, tau});
      }
    } catch (const std::exception& e) {
      errors[k] = e.what();
      hits[k].clear();
    }
  });

  for (std::size_t k = 0; k < n_seeds; ++k) {
    if (!errors[k].empty()) {
      table.failures.push_back({psis[k], errors[k]});
      continue;
    }
    for (const Hit& h : hits[k]) {
      const auto& cur = table.at(h.i, h.j);
      if (!cur || h.tau < cur->T_min) table.set(h.i, h.j, {seeds[k].psi0, seeds[k].theta0, h.tau});
    }
  }
  return table;
}

QueryResult query(const LookupTable& table, double z, double R) {
  if (!(R >= 0) || !(z * z + R * R <= 1 + 1e-12))
    throw std::invalid_argument("query: target must lie in the upper unit half-disc");
  int i = 0, j = 0;
  if (!table.cell_of(z, R, i, j)) throw std::invalid_argument("query: target outside the table grid");
  if (const auto& rec = table.at(i, j)) return {*rec, i, j, true};

  const double w = table.cell_width();
  double best = std::numeric_limits<double>::infinity();
  QueryResult out;
  out.exact = false;
  for (int b = std::max(0, j - 2); b <= std::min(table.cells_R() - 1, j + 2); ++b)
    for (int a = std::max(0, i - 2); a <= std::min(table.cells_z() - 1, i + 2); ++a) {
      const auto& rec = table.at(a, b);
      if (!rec) continue;
      const double d = (table.cell_center(a, b) - Vec2<double>(z, R)).norm();
      if (d <= 2 * w && d < best) {
        best = d;
        out.record = *rec;
        out.i = a;
        out.j = b;
      }
    }
  if (!std::isfinite(best)) throw UnreachableError("query: no reachable cell near the target");
  return out;
}

void save_table(const LookupTable& table, std::ostream& out) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %s gamma_ratio=%.17g grid=%d\n", kMagic, kVersion, table.gamma_ratio(),
                table.grid());
  out << buf;
  for (int i = 0; i < table.cells_z(); ++i)
    for (int j = 0; j < table.cells_R(); ++j)
      if (const auto& rec = table.at(i, j)) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", i, j, rec->psi0, rec->theta0, rec->T_min);
        out << buf;
      }
}

void save_table(const LookupTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_table: cannot open " + path);
  save_table(table, f);
  if (!f) throw std::runtime_error("save_table: write failed for " + path);
}

namespace {

template <typename T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw FormatError("load_table: bad field '" + std::string(s) + "' on line " + std::to_string(line));
  return v;
}

}  // namespace

LookupTable load_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || in.eof()) throw FormatError("load_table: missing or truncated header");
  const std::string magic = std::string(kMagic) + " ";
  if (line.rfind(magic, 0) != 0) throw FormatError("load_table: not a qubit-reach table");
  std::string_view rest(line);
  rest.remove_prefix(magic.size());
  const auto sp = rest.find(' ');
  if (sp == std::string_view::npos) throw FormatError("load_table: malformed header");
  if (rest.substr(0, sp) != kVersion)
    throw FormatError("load_table: version mismatch (" + std::string(rest.substr(0, sp)) + ")");
  rest.remove_prefix(sp + 1);
  const auto sp2 = rest.find(' ');
  if (sp2 == std::string_view::npos || rest.substr(0, 12) != "gamma_ratio=" ||
      rest.substr(sp2 + 1, 5) != "grid=")
    throw FormatError("load_table: malformed header");
  const auto ratio = parse_field<double>(rest.substr(12, sp2 - 12), 1);
  const auto grid = parse_field<int>(rest.substr(sp2 + 6), 1);
  if (!(ratio >= 0) || grid < 1) throw FormatError("load_table: header values out of range");
  LookupTable table(ratio, grid);

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (in.eof()) throw FormatError("load_table: truncated row on line " + std::to_string(lineno));
    std::string_view v(line);
    std::string_view f[5];
    for (int k = 0; k < 5; ++k) {
      const auto c = v.find(',');
      if ((k < 4) == (c == std::string_view::npos))
        throw FormatError("load_table: expected 5 fields on line " + std::to_string(lineno));
      f[k] = v.substr(0, c);
      if (k < 4) v.remove_prefix(c + 1);
    }
    const int i = parse_field<int>(f[0], lineno), j = parse_field<int>(f[1], lineno);
    if (i < 0 || j < 0 || i >= table.cells_z() || j >= table.cells_R())
      throw FormatError("load_table: cell index out of range on line " + std::to_string(lineno));
    if (table.at(i, j)) throw FormatError("load_table: duplicate cell on line " + std::to_string(lineno));
    const TableRecord rec{parse_field<double>(f[2], lineno), parse_field<double>(f[3], lineno),
                          parse_field<double>(f[4], lineno)};
    if (!(rec.T_min >= 0)) throw FormatError("load_table: negative Tmin on line " + std::to_string(lineno));
    table.set(i, j, rec);
  }
  return table;
}

LookupTable load_table(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_table: cannot open " + path);
  return load_table(f);
}

}  // namespace qreach
