#include <cmath>

#include "doctest.h"
#include "revhom/bvp.hpp"
#include "revhom/example_duffing.hpp"

using namespace revhom;
using duffing::ExampleParams;

namespace {

HomoclinicBVP planar_bvp(int N, double T = 20.0) {
  ExampleParams p;
  p.s = 2.0;
  p.ell = 0;
  p.beta1 = duffing::resonance_beta1(2.0, 0);
  p.beta2 = 0.0;
  p.beta3 = 4.0;
  return make_bvp(duffing::make_system(p), T, N);
}

Vec exact_X(const HomoclinicBVP& bvp) {
  return sample_guess(bvp, [](double t) { return duffing::homoclinic_exact(t); });
}

double sup_node_error(const HomoclinicBVP& bvp, const Vec& X) {
  double e = 0;
  for (int i = 0; i < bvp.n_nodes(); ++i) {
    Eigen::Map<const Vec> xi(X.data() + colloc::off_node(i, 4), 4);
    e = std::max(e, (xi - duffing::homoclinic_exact(bvp.nodes[i])).norm());
  }
  return e;
}

}  // namespace

TEST_SUITE("bvp") {

TEST_CASE("graded mesh spans [-T, 0] monotonically and resolves the core") {
  std::vector<double> mesh = make_graded_mesh(20.0, 400);
  REQUIRE(mesh.size() == 401);
  CHECK(mesh.front() == doctest::Approx(-20.0));
  CHECK(mesh.back() == doctest::Approx(0.0).scale(1.0));
  double hmin = 1e300, hmax = 0, hcore = 0;
  for (size_t i = 1; i < mesh.size(); ++i) {
    double h = mesh[i] - mesh[i - 1];
    REQUIRE(h > 0);
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
    if (mesh[i] > -2.0) hcore = std::max(hcore, h);
  }
  CHECK(hmax < 0.5);
  CHECK(hcore < 2.5 * hmin);  // near-uniform where the orbit lives
}

TEST_CASE("collocation residual of the exact orbit is tiny") {
  HomoclinicBVP bvp = planar_bvp(400);
  Vec R = assemble_residual(bvp, exact_X(bvp));
  CHECK(R.lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("residual layout: boundary rows come first") {
  HomoclinicBVP bvp = planar_bvp(50, 15.0);
  Vec X = exact_X(bvp);
  Vec R = assemble_residual(bvp, X);
  REQUIRE(R.size() == bvp.n_unknowns());
  // perturb x3(0): the symmetry rows extract the Fix(-R) coordinates
  // (x3, x4) at t=0, so rows 2-3 must react while interval 1 stays put
  Vec Xp = X;
  Xp[colloc::off_node(bvp.n_intervals(), 4) + 2] += 1e-3;
  Vec dR = assemble_residual(bvp, Xp) - R;
  CHECK(std::abs(dR[2]) + std::abs(dR[3]) > 1e-4);
  CHECK(dR.segment(4, 12).norm() < 1e-12);  // first interval untouched
}

TEST_CASE("Jacobian matches finite differences of the residual") {
  HomoclinicBVP bvp = planar_bvp(12, 8.0);
  Vec X = exact_X(bvp);
  // move off the solution a bit so nonlinear terms are active
  for (int i = 0; i < X.size(); ++i) X[i] += 1e-2 * std::sin(3.7 * i);
  SpMat J = assemble_jacobian(bvp, X);
  Vec R0 = assemble_residual(bvp, X);
  const double h = 1e-7;
  for (int k : {0, 5, 17, 44, (int)X.size() - 3, (int)X.size() - 1}) {
    Vec Xp = X;
    Xp[k] += h;
    Vec fd = (assemble_residual(bvp, Xp) - R0) / h;
    Vec jc = Vec(J.col(k));
    CHECK((fd - jc).lpNorm<Eigen::Infinity>() < 1e-5 * (1.0 + jc.norm()));
  }
}

TEST_CASE("solve recovers the exact orbit from a perturbed guess") {
  HomoclinicBVP bvp = planar_bvp(400);
  Vec X = exact_X(bvp);
  Vec guess = X * (1.0 + 1e-3);
  HomoclinicOrbit orb = solve(bvp, guess);
  CHECK(orb.newton_iters <= 8);
  CHECK(orb.residual_inf <= 1e-10);
  CHECK(sup_node_error(bvp, orb.X) <= 1e-6);
}

TEST_CASE("solve converges from a coarse scaling of the orbit") {
  // the planar subsystem is odd, so -x1h is an equally valid limit; from a
  // halved guess Newton may land on either orientation
  HomoclinicBVP bvp = planar_bvp(200);
  Vec guess = 0.5 * exact_X(bvp);
  HomoclinicOrbit orb = solve(bvp, guess);
  CHECK(orb.residual_inf <= 1e-10);
  double e_plus = sup_node_error(bvp, orb.X);
  HomoclinicOrbit mir = orb;
  mir.X = -orb.X;
  double e_minus = sup_node_error(bvp, mir.X);
  CHECK(std::min(e_plus, e_minus) <= 1e-5);
}

TEST_CASE("the trivial solution is rejected as a solve result") {
  HomoclinicBVP bvp = planar_bvp(100);
  Vec guess = 1e-6 * exact_X(bvp);
  CHECK_THROWS_AS(solve(bvp, guess), TrivialSolutionError);
}

TEST_CASE("orbit measures of the planar orbit") {
  HomoclinicBVP bvp = planar_bvp(400);
  HomoclinicOrbit orb = solve(bvp, exact_X(bvp));
  CHECK(orb.measures.x2_at_0 == doctest::Approx(0.0).scale(1.0));
  CHECK(orb.measures.max_x2 == doctest::Approx(0.0).scale(1.0));
  CHECK(orb.measures.min_x2 == doctest::Approx(0.0).scale(1.0));
  // || (x1, 0, x3, 0) ||_{L2}^2 over the full line: 4 + 4/3
  CHECK(orb.measures.l2_norm * orb.measures.l2_norm ==
        doctest::Approx(16.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("convergence order of the collocation scheme") {
  // node sup-error should drop superlinearly with N (formally order 6 at
  // Gauss points; the measured slope on this range is well above 3.5)
  double e100, e200, e400;
  for (int N : {100, 200, 400}) {
    HomoclinicBVP bvp = planar_bvp(N, 14.0);
    // start from a slightly perturbed guess so Newton does real work
    Vec guess = exact_X(bvp) * (1.0 + 1e-4);
    HomoclinicOrbit orb = solve(bvp, guess);
    double e = sup_node_error(bvp, orb.X);
    (N == 100 ? e100 : N == 200 ? e200 : e400) = e;
  }
  CHECK(e100 < 1e-5);
  if (e200 > 1e-14 && e400 > 1e-15) {
    double slope = std::log2(e100 / e200);
    CHECK(slope > 3.5);
  }
}

TEST_CASE("full orbit is the R-reflection of the half orbit") {
  HomoclinicBVP bvp = planar_bvp(100);
  HomoclinicOrbit orb = solve(bvp, exact_X(bvp));
  auto samples = full_orbit(bvp, orb);
  REQUIRE(samples.size() >= 2 * (size_t)bvp.n_intervals());
  CHECK(samples.front().first == doctest::Approx(-bvp.T));
  CHECK(samples.back().first == doctest::Approx(bvp.T));
  for (size_t i = 0; i + 1 < samples.size(); ++i)
    CHECK(samples[i].first < samples[i + 1].first);
  // spot-check reflection: x1 even, x3 odd
  auto at = [&](double t) {
    for (auto& [u, x] : samples)
      if (std::abs(u - t) < 1e-9) return x;
    REQUIRE(false);
    return samples[0].second;
  };
  Vec a = at(samples[2].first), b = at(-samples[2].first);
  CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
  CHECK(a[2] == doctest::Approx(-b[2]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("set_param refreshes the boundary projection") {
  HomoclinicBVP bvp = planar_bvp(50, 10.0);
  Mat Ls0 = bvp.Ls;
  set_param(bvp, "beta2", 0.2);
  CHECK(bvp.sys.params.at("beta2") == 0.2);
  CHECK((bvp.Ls - Ls0).norm() > 1e-6);  // coupled saddle rotates the eigenvectors
  set_param(bvp, "beta2", 0.0);
  CHECK((bvp.Ls - Ls0).norm() < 1e-12);
}

}  // TEST_SUITE
