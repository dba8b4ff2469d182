#pragma once

#include <iosfwd>
#include <optional>

#include "qreach/reachset.hpp"

namespace qreach {

struct SvgOptions {
  int size = 600;                            ///< pixel width and height
  std::optional<SpiralRegion> spiral;        ///< overlay when set
  bool label = true;                         ///< print the T label
};

/// Fixed-style SVG of a reachable set in the (z, R) plane: unit circle,
/// filled boundary contours and an optional spiral-region outline. Output
/// depends only on the inputs, so figures can be compared as text.
void write_svg(const ReachableSet2D& set, std::ostream& out, const SvgOptions& opts = {});

}  // namespace qreach
