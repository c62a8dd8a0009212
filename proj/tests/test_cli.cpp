#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "revhom/continuation.hpp"
#include "revhom/svg.hpp"

using namespace revhom;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream o;
  o << f.rdbuf();
  return o.str();
}

Branch sample_branch() {
  Branch br;
  br.param_name = "beta2";
  br.fixed = {{"s", 2.0}, {"beta1", 1.7071067811865477}, {"beta3", 4.0}};
  double arc = 0;
  for (int i = 0; i < 12; ++i) {
    BranchRecord r;
    r.param = -0.01 * i * i * 1e-2;
    r.measures.x2_at_0 = -0.01 * i;
    r.measures.max_x2 = 0.0;
    r.measures.min_x2 = -0.01 * i;
    r.measures.l2_norm = 2.3 + 1e-4 * i;
    r.arclength = arc;
    arc += 0.01;
    if (i == 7) r.special = "FOLD";
    br.points.push_back(r);
  }
  SpecialPoint sp;
  sp.type = "FOLD";
  sp.param = -4.9e-6;
  sp.arclength = 0.07;
  sp.localization_residual = 1e-9;
  br.specials.push_back(sp);
  br.termination = "steps";
  return br;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("branch CSV output is deterministic byte for byte") {
  Branch br = sample_branch();
  write_branch_csv("cli_det_a.csv", br, "{\"k\":1}");
  write_branch_csv("cli_det_b.csv", br, "{\"k\":1}");
  std::string a = slurp("cli_det_a.csv"), b = slurp("cli_det_b.csv");
  CHECK(!a.empty());
  CHECK(a == b);
  // config comment and schema header present
  CHECK(a.rfind("# {\"k\":1}\n", 0) == 0);
  CHECK(a.find("index,param,x2_at_0") != std::string::npos);
  CHECK(a.find("FOLD") != std::string::npos);
  std::remove("cli_det_a.csv");
  std::remove("cli_det_b.csv");
}

TEST_CASE("branch summary JSON is deterministic and ordered") {
  Branch br = sample_branch();
  std::string j1 = branch_summary_json(br);
  std::string j2 = branch_summary_json(br);
  CHECK(j1 == j2);
  CHECK(j1.find("\"param\"") != std::string::npos);
  CHECK(j1.find("\"specials\"") != std::string::npos);
  CHECK(j1.find("FOLD") != std::string::npos);
}

TEST_CASE("svg renderer: deterministic, well-formed, data-dependent") {
  SvgPlot plot;
  plot.title = "test";
  plot.xlabel = "x";
  plot.ylabel = "y";
  SvgSeries s;
  for (int i = 0; i <= 10; ++i) {
    s.x.push_back(0.1 * i);
    s.y.push_back(std::sin(0.6 * i));
  }
  plot.series.push_back(s);
  std::string a = render_svg(plot), b = render_svg(plot);
  CHECK(a == b);
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("</svg>") != std::string::npos);
  CHECK(a.find("<polyline") != std::string::npos);
  CHECK(a.find("test") != std::string::npos);

  // changing the data changes the output
  plot.series[0].y[3] += 0.5;
  CHECK(render_svg(plot) != a);

  // degenerate input (single point) still renders
  SvgPlot one;
  SvgSeries p1;
  p1.x = {1.0};
  p1.y = {2.0};
  one.series.push_back(p1);
  std::string o = render_svg(one);
  CHECK(o.find("<circle") != std::string::npos);
}

}  // TEST_SUITE
