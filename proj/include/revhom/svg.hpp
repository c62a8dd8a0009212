#pragma once

#include <string>
#include <vector>

// Minimal polyline plot renderer, enough for branch diagrams and orbit
// profiles without an external plotting dependency.  Output is deterministic
// for fixed input (fixed float formatting, no timestamps).

namespace revhom {

struct SvgSeries {
  std::vector<double> x, y;
  std::string color = "#1f5fa8";
  bool markers = false;  // draw small circles at the points too
};

struct SvgPlot {
  int width = 720, height = 480;
  std::string title, xlabel, ylabel;
  std::vector<SvgSeries> series;
};

std::string render_svg(const SvgPlot& plot);
void write_svg(const std::string& path, const SvgPlot& plot);

}  // namespace revhom
