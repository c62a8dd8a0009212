#include "revhom/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace revhom {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// round a data range outward to a tidy interval for the axis labels
void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    double c = lo;
    lo = c - 1;
    hi = c + 1;
    return;
  }
  double pad = 0.06 * (hi - lo);
  lo -= pad;
  hi += pad;
}

}  // namespace

std::string render_svg(const SvgPlot& plot) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : plot.series) {
    for (double v : s.x) {
      xlo = std::min(xlo, v);
      xhi = std::max(xhi, v);
    }
    for (double v : s.y) {
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  }
  if (!std::isfinite(xlo)) {
    xlo = 0;
    xhi = 1;
    ylo = 0;
    yhi = 1;
  }
  pad_range(xlo, xhi);
  pad_range(ylo, yhi);

  const int W = plot.width, H = plot.height;
  const int ml = 70, mr = 20, mt = plot.title.empty() ? 20 : 40, mb = 50;
  auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
    << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  o << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

  // frame and tick labels (5 per axis)
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
    << "\" height=\"" << H - mt - mb
    << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double xv = xlo + k * (xhi - xlo) / 4, yv = ylo + k * (yhi - ylo) / 4;
    o << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << H - mb << "\" x2=\""
      << fmt(px(xv)) << "\" y2=\"" << H - mb + 5
      << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    o << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << H - mb + 20
      << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#222\">" << fmt(xv)
      << "</text>\n";
    o << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << ml
      << "\" y2=\"" << fmt(py(yv)) << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    o << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(py(yv) + 4)
      << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#222\">" << fmt(yv)
      << "</text>\n";
  }
  if (!plot.title.empty())
    o << "<text x=\"" << W / 2
      << "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\" fill=\"#000\">"
      << plot.title << "</text>\n";
  if (!plot.xlabel.empty())
    o << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
      << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#000\">" << plot.xlabel
      << "</text>\n";
  if (!plot.ylabel.empty())
    o << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#000\" transform=\"rotate(-90 16 "
      << (mt + H - mb) / 2 << ")\">" << plot.ylabel << "</text>\n";

  for (const auto& s : plot.series) {
    size_t n = std::min(s.x.size(), s.y.size());
    if (n >= 2) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < n; ++i) {
        if (i) o << ' ';
        o << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
      }
      o << "\"/>\n";
    }
    if (s.markers || n == 1)
      for (size_t i = 0; i < n; ++i)
        o << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
          << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::string& path, const SvgPlot& plot) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_svg: cannot open " + path);
  f << render_svg(plot);
}

}  // namespace revhom
