#include "qreach/svg.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace qreach {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

void write_svg(const ReachableSet2D& set, std::ostream& out, const SvgOptions& opts) {
  // Plot window [-1.1, 1.1]^2, R upwards.
  const double s = opts.size / 2.2;
  auto px = [&](double z) { return fmt("%.2f", (z + 1.1) * s); };
  auto py = [&](double R) { return fmt("%.2f", (1.1 - R) * s); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.size << "\" height=\"" << opts.size
      << "\" viewBox=\"0 0 " << opts.size << ' ' << opts.size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << px(-1.1) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1.1) << "\" y2=\"" << py(0)
      << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
  out << "<line x1=\"" << px(0) << "\" y1=\"" << py(-1.1) << "\" x2=\"" << px(0) << "\" y2=\"" << py(1.1)
      << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";

  out << "<path d=\"";
  for (const auto& line : set.boundary()) {
    for (std::size_t k = 0; k < line.points.size(); ++k)
      out << (k == 0 ? "M" : "L") << px(line.points[k](0)) << ',' << py(line.points[k](1)) << ' ';
    if (line.closed) out << "Z ";
  }
  out << "\" fill=\"#4a7fb5\" fill-opacity=\"0.6\" fill-rule=\"evenodd\" stroke=\"#1f3f66\" stroke-width=\"1\"/>\n";

  out << "<circle cx=\"" << px(0) << "\" cy=\"" << py(0) << "\" r=\"" << fmt("%.2f", s)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  if (opts.spiral) {
    out << "<polygon points=\"";
    for (const auto& p : opts.spiral->outline()) out << px(p(0)) << ',' << py(p(1)) << ' ';
    out << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>\n";
  }
  if (opts.label)
    out << "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">omega T = "
        << fmt("%g", set.T_scaled()) << "</text>\n";
  out << "</svg>\n";
}

}  // namespace qreach
