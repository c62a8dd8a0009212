#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "revhom/experiments.hpp"

using namespace revhom;

TEST_SUITE("continuation") {

TEST_CASE("fold experiment: localization, quadratic shape, coexistence") {
  FoldExperiment ex = run_fold_experiment(2.0, 0, 4.0, 200, 16.0, 24);
  REQUIRE(!ex.branch.specials.empty());
  // a fold localized at beta2 = 0 within 1e-4
  double best = 1e300;
  const SpecialPoint* fold = nullptr;
  for (const auto& sp : ex.branch.specials)
    if (sp.type == "FOLD" && std::abs(sp.param) < best) {
      best = std::abs(sp.param);
      fold = &sp;
    }
  REQUIRE(fold != nullptr);
  CHECK(std::abs(fold->param) <= 1e-4);
  CHECK(fold->localization_residual <= 1e-6);
  CHECK(ex.consistency.location_ok);
  CHECK(ex.consistency.fit_exponent == doctest::Approx(2.0).epsilon(0.05));
  CHECK(ex.consistency.side_consistent);

  // two coexisting orbits: equal parameter, distinct measures
  bool coexist = false;
  const auto& pts = ex.branch.points;
  for (size_t i = 0; i < pts.size() && !coexist; ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i].param - pts[j].param) < 5e-4 &&
          std::abs(pts[i].measures.x2_at_0 - pts[j].measures.x2_at_0) > 0.05) {
        coexist = true;
        break;
      }
  CHECK(coexist);

  // profile samples span [-T, T] and carry a nontrivial x2 component
  REQUIRE(!ex.profile.empty());
  double amp = 0;
  for (const auto& [t, x] : ex.profile) amp = std::max(amp, std::abs(x[1]));
  CHECK(amp > 0.01);
}

TEST_CASE("transcritical experiment: crossing through the resonance") {
  TranscriticalExperiment ex = run_transcritical_experiment(2.0, 0, 4.0, 200, 16.0);
  double res = duffing::resonance_beta1(2.0, 0);
  CHECK(std::abs(ex.bp_param - res) <= 1e-3);
  CHECK(std::abs(ex.crossing_slope) > 0.01);
  // the crossing branch carries points on both sides of the BP
  int above = 0, below = 0;
  for (const auto& pt : ex.crossing_branch.points)
    (pt.param > ex.bp_param ? above : below)++;
  CHECK(above > 0);
  CHECK(below > 0);
}

TEST_CASE("branch switching is robust to halving the perturbation") {
  duffing::ExampleParams p;
  p.s = 2.0;
  p.ell = 0;
  p.beta1 = duffing::resonance_beta1(2.0, 0) - 0.25;
  p.beta3 = 4.0;
  HomoclinicBVP bvp = make_bvp(duffing::make_system(p), 16.0, 200);
  Vec guess = sample_guess(bvp, [](double t) { return duffing::homoclinic_exact(t); });
  HomoclinicOrbit orbit0 = solve(bvp, guess);
  ContinuationOptions o;
  o.ds0 = 2e-2;
  o.max_steps = 40;
  o.param_min = p.beta1 - 0.1;
  o.param_max = p.beta1 + 0.5;
  Branch triv = continue_branch(bvp, orbit0, "beta1", o);
  int bp = -1;
  for (int i = 0; i < (int)triv.specials.size(); ++i)
    if (triv.specials[i].type == "BP") bp = i;
  REQUIRE(bp >= 0);

  HomoclinicOrbit sw1 = switch_branch(bvp, triv, bp, 5e-3);
  HomoclinicOrbit sw2 = switch_branch(bvp, triv, bp, 2.5e-3);
  CHECK(std::abs(sw1.measures.x2_at_0) > 1e-4);
  CHECK(std::abs(sw2.measures.x2_at_0) > 1e-4);
  // same branch: consistent amplitude sign, roughly half the offset
  CHECK(sw1.measures.x2_at_0 * sw2.measures.x2_at_0 > 0);
  CHECK(std::abs(sw2.measures.x2_at_0) < std::abs(sw1.measures.x2_at_0));
}

TEST_CASE("pitchfork experiment: conjugate pair, one-sided") {
  PitchforkExperiment ex = run_pitchfork_experiment(2.0, 0, 200, 16.0, 16);
  double res = duffing::resonance_beta1(2.0, 0);
  CHECK(std::abs(ex.bp_param - res) <= 1e-3);
  CHECK(ex.consistency.one_sided);
  CHECK(ex.consistency.side_consistent);
  // S-conjugacy: max_x2 of one branch mirrors min_x2 of the other
  size_t n = std::min(ex.branch_a.points.size(), ex.branch_b.points.size());
  REQUIRE(n >= 5);
  for (size_t i = 0; i < n; ++i) {
    const auto& a = ex.branch_a.points[i].measures;
    const auto& b = ex.branch_b.points[i].measures;
    CHECK(a.max_x2 == doctest::Approx(-b.min_x2).epsilon(1e-7).scale(1.0));
    CHECK(ex.branch_a.points[i].param ==
          doctest::Approx(ex.branch_b.points[i].param).epsilon(1e-8));
  }
  // every recorded point stays off the trivial branch
  for (size_t i = 1; i < ex.branch_a.points.size(); ++i)
    CHECK(std::abs(ex.branch_a.points[i].measures.x2_at_0) > 1e-6);
}

TEST_CASE("special-point locations are mesh-insensitive") {
  TranscriticalExperiment c = run_transcritical_experiment(2.0, 0, 4.0, 120, 16.0);
  TranscriticalExperiment f = run_transcritical_experiment(2.0, 0, 4.0, 240, 16.0);
  CHECK(std::abs(c.bp_param - f.bp_param) <= 1e-4);
}

TEST_CASE("branch CSV format") {
  FoldExperiment ex = run_fold_experiment(2.0, 1, 4.0, 120, 16.0, 10);
  const char* path = "test_branch_out.csv";
  write_branch_csv(path, ex.branch, "{\"case\":\"csv-format\"}");
  std::ifstream f(path);
  REQUIRE(f.good());
  std::string line;
  std::getline(f, line);
  CHECK(line == "# {\"case\":\"csv-format\"}");
  std::getline(f, line);
  CHECK(line == "index,param,x2_at_0,max_x2,min_x2,l2_norm,arclength,special");
  size_t rows = 0, folds = 0;
  while (std::getline(f, line)) {
    ++rows;
    if (line.find(",FOLD") != std::string::npos) ++folds;
    // 8 columns
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
  }
  CHECK(rows == ex.branch.points.size());
  f.close();
  std::remove(path);

  // summary JSON mentions the special points
  std::string j = branch_summary_json(ex.branch);
  CHECK(j.find("specials") != std::string::npos);
  CHECK(j.find("param") != std::string::npos);
}

TEST_CASE("continuation respects parameter bounds and reports termination") {
  duffing::ExampleParams p;
  p.s = 2.0;
  p.ell = 0;
  p.beta1 = duffing::resonance_beta1(2.0, 0) - 0.05;
  p.beta3 = 4.0;
  HomoclinicBVP bvp = make_bvp(duffing::make_system(p), 16.0, 120);
  Vec guess = sample_guess(bvp, [](double t) { return duffing::homoclinic_exact(t); });
  HomoclinicOrbit orbit0 = solve(bvp, guess);
  ContinuationOptions o;
  o.initial_sign = -1;
  o.max_steps = 200;
  o.param_min = p.beta1 - 0.04;
  o.param_max = p.beta1 + 1.0;
  Branch br = continue_branch(bvp, orbit0, "beta1", o);
  CHECK(br.termination == "range");
  for (const auto& pt : br.points) CHECK(pt.param <= o.param_max + 1e-9);
}

}  // TEST_SUITE
