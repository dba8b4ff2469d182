#pragma once

// Lookup table from target points (z, R) of the upper meridian half-disc to
// the extremal seed that reaches them first.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qreach/pmp.hpp"
#include "qreach/reachset.hpp"

namespace qreach {

struct TableRecord {
  double psi0 = 0;
  double theta0 = 0;
  double T_min = 0;  ///< first-passage time, rescaled
};

/// grid = N gives square cells of width 1/N over [-1, 1] x [0, 1]
/// (2N cells in z, N in R); cell (i, j) is centered at
/// (-1 + (i + 1/2)/N, (j + 1/2)/N).
class LookupTable {
 public:
  LookupTable(double gamma_ratio, int grid);

  double gamma_ratio() const noexcept { return ratio_; }
  int grid() const noexcept { return N_; }
  int cells_z() const noexcept { return 2 * N_; }
  int cells_R() const noexcept { return N_; }
  double cell_width() const noexcept { return 1.0 / N_; }
  Vec2<double> cell_center(int i, int j) const;
  bool cell_of(double z, double R, int& i, int& j) const;

  const std::optional<TableRecord>& at(int i, int j) const { return cells_[index(i, j)]; }
  void set(int i, int j, const TableRecord& rec);
  std::size_t nonempty() const;

  std::vector<SeedFailure> failures;

 private:
  std::size_t index(int i, int j) const;

  double ratio_;
  int N_;
  std::vector<std::optional<TableRecord>> cells_;
};

/// Sweeps n_seeds extremals to T_max_scaled and records, per cell, the seed
/// with the earliest passage (ties go to the lower seed index).
LookupTable build_table(const Params& params, std::size_t n_seeds, double T_max_scaled, int grid,
                        const ExtremalOptions& opts = {});

struct QueryResult {
  TableRecord record;
  int i = 0;
  int j = 0;
  bool exact = true;  ///< false when a neighboring cell answered
};

/// Record of the cell containing (z, R), else of the nearest nonempty cell
/// whose center is within two cell widths. Throws UnreachableError if there
/// is none and std::invalid_argument outside the half-disc.
QueryResult query(const LookupTable& table, double z, double R);

void save_table(const LookupTable& table, std::ostream& out);
void save_table(const LookupTable& table, const std::string& path);
/// Throws FormatError on a bad header, version mismatch, malformed or truncated rows.
LookupTable load_table(std::istream& in);
LookupTable load_table(const std::string& path);

}  // namespace qreach
