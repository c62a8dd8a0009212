#include <cmath>

#include "doctest.h"
#include "revhom/example_duffing.hpp"
#include "revhom/system.hpp"

using namespace revhom;

namespace {

duffing::ExampleParams test_params() {
  duffing::ExampleParams p;
  p.s = 2.0;
  p.beta1 = duffing::resonance_beta1(2.0, 0);
  p.beta2 = 0.3;  // reversibility holds for any beta2
  p.beta3 = 4.0;
  return p;
}

bool parallel(const Vec& a, const Vec& b, double tol = 1e-10) {
  double na = a.norm(), nb = b.norm();
  if (na == 0 || nb == 0) return false;
  Vec u = a / na, v = b / nb;
  return std::min((u - v).norm(), (u + v).norm()) < tol;
}

}  // namespace

TEST_SUITE("system") {

TEST_CASE("reversibility identity holds for the example") {
  ReversibleSystem sys = duffing::make_system(test_params());
  ReversibilityReport rep = check_reversibility(sys, 50, 1234u);
  CHECK(rep.involution_ok);
  CHECK(rep.pass);
  CHECK(rep.max_residual < 1e-12);
}

TEST_CASE("a broken vector field fails the reversibility check") {
  ReversibleSystem sys = duffing::make_system(test_params());
  auto f0 = sys.f;
  sys.f = [f0](const Vec& x, const Params& p) {
    Vec v = f0(x, p);
    v[0] += x[2] * x[2];  // even term in an odd slot
    return v;
  };
  ReversibilityReport rep = check_reversibility(sys, 50, 1234u);
  CHECK(rep.involution_ok);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_residual > 1e-3);
}

TEST_CASE("saddle spectrum of the uncoupled linearization is {+-1, +-sqrt s}") {
  duffing::ExampleParams p = test_params();
  p.beta2 = 0.0;
  ReversibleSystem sys = duffing::make_system(p);
  SaddleSpectrum spec = equilibrium_spectrum(sys, sys.params);
  REQUIRE(spec.eigenvalues.size() == 4);
  // sorted by real part
  CHECK(spec.eigenvalues[0].real() == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(spec.eigenvalues[1].real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(spec.eigenvalues[2].real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spec.eigenvalues[3].real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  for (auto ev : spec.eigenvalues) CHECK(ev.imag() == doctest::Approx(0.0));
}

TEST_CASE("stable left eigenvectors have the block structure") {
  duffing::ExampleParams p = test_params();
  p.beta2 = 0.0;
  ReversibleSystem sys = duffing::make_system(p);
  SaddleSpectrum spec = equilibrium_spectrum(sys, sys.params);
  REQUIRE(spec.stable_left.rows() == 2);
  // rows correspond to lambda = -sqrt2 and lambda = -1
  Vec v_sqrt2(4), v_one(4);
  v_sqrt2 << 0, std::sqrt(2.0), 0, -1;
  v_one << 1, 0, -1, 0;
  bool m0 = parallel(spec.stable_left.row(0).transpose(), v_sqrt2) ||
            parallel(spec.stable_left.row(0).transpose(), v_one);
  bool m1 = parallel(spec.stable_left.row(1).transpose(), v_sqrt2) ||
            parallel(spec.stable_left.row(1).transpose(), v_one);
  CHECK(m0);
  CHECK(m1);
}

TEST_CASE("L_s annihilates the unstable eigenspace") {
  duffing::ExampleParams p = test_params();
  p.beta2 = 0.0;
  ReversibleSystem sys = duffing::make_system(p);
  SaddleSpectrum spec = equilibrium_spectrum(sys, sys.params);
  Mat Ls = build_Ls(spec);
  Vec u1(4), u2(4);
  u1 << 1, 0, 1, 0;             // lambda = +1 direction
  u2 << 0, 1, 0, std::sqrt(2.0);  // lambda = +sqrt2 direction
  CHECK((Ls * u1).norm() < 1e-12);
  CHECK((Ls * u2).norm() < 1e-12);
  // and it acts injectively on the stable directions
  Vec s1(4);
  s1 << 1, 0, -1, 0;
  CHECK((Ls * s1).norm() > 0.5);
}

TEST_CASE("L_s rows also annihilate coupled unstable directions") {
  duffing::ExampleParams p = test_params();
  p.beta2 = 0.2;  // couples the blocks
  ReversibleSystem sys = duffing::make_system(p);
  SaddleSpectrum spec = equilibrium_spectrum(sys, sys.params);
  Mat Ls = build_Ls(spec);
  Mat A = sys.df(Vec::Zero(4), sys.params);
  CHECK((Ls * spec.unstable_right).norm() < 1e-10);
  // invariance: Ls A restricted to stable space stays rank 2
  CHECK(Ls.rows() == 2);
  CHECK((Ls * A * spec.unstable_right).norm() < 1e-9);
}

TEST_CASE("non-hyperbolic equilibrium is rejected") {
  duffing::ExampleParams p = test_params();
  ReversibleSystem sys = duffing::make_system(p);
  Params mu = sys.params;
  mu["beta2"] = 0.0;  // decouple the blocks so only s drives the failure
  mu["s"] = 0.0;      // zero eigenvalue pair in the second block
  CHECK_THROWS_WITH_AS(equilibrium_spectrum(sys, mu),
                       doctest::Contains("non-hyperbolic"), std::runtime_error);
}

TEST_CASE("Fix(R) coordinate maps split the state space") {
  ReversibleSystem sys = duffing::make_system(test_params());
  auto [Pplus, Pminus] = fix_R_projector(sys);
  REQUIRE(Pplus.rows() == 2);
  REQUIRE(Pminus.rows() == 2);
  Vec in_fix(4), in_anti(4);
  in_fix << 0.7, -1.3, 0, 0;   // Fix(R) for R = diag(1,1,-1,-1)
  in_anti << 0, 0, 2.1, 0.4;   // Fix(-R)
  CHECK((Pminus * in_fix).norm() < 1e-12);
  CHECK((Pplus * in_anti).norm() < 1e-12);
  CHECK((Pminus * in_anti).norm() > 0.3);
  CHECK((Pplus * in_fix).norm() > 0.3);
}

TEST_CASE("finite-difference tensors approximate the analytic ones") {
  ReversibleSystem sys = duffing::make_system(test_params());
  ReversibleSystem fd = sys;
  attach_fd_tensors(fd);
  Vec x(4), u(4), v(4), w(4);
  x << 0.3, -0.2, 0.5, 0.1;
  u << 1.0, 0.5, -0.3, 0.2;
  v << -0.4, 1.2, 0.1, 0.6;
  w << 0.2, -0.7, 0.9, -0.1;
  Vec d2a = sys.d2f(x, u, v, sys.params), d2n = fd.d2f(x, u, v, sys.params);
  CHECK((d2a - d2n).norm() < 1e-5 * (1.0 + d2a.norm()));
  Vec d3a = sys.d3f(x, u, v, w, sys.params), d3n = fd.d3f(x, u, v, w, sys.params);
  CHECK((d3a - d3n).norm() < 1e-3 * (1.0 + d3a.norm()));
}

TEST_CASE("system registry provides the example by name") {
  Params prm{{"s", 2.0}, {"beta1", 1.0}, {"beta2", 0.0}, {"beta3", 4.0}};
  ReversibleSystem sys = make_registered_system("duffing4d", prm);
  CHECK(sys.dim == 4);
  CHECK(sys.params.at("beta3") == 4.0);
  CHECK_THROWS(make_registered_system("no-such-system", prm));
}

}  // TEST_SUITE
