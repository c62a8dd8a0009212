#pragma once

#include <array>
#include <functional>

#include "revhom/system.hpp"

// The 4D coupled-Duffing example:
//   x1' = x3
//   x2' = x4
//   x3' = x1 - (x1^2 + 8 x2^2) x1 - beta2 x2
//   x4' = s x2 - beta1 (x1^2 + 2 x2^2) x2 - beta2 x1 - beta3 x2^2
// reversible under R = diag(1,1,-1,-1), with the exact planar homoclinic
// x^h = (±sqrt2 sech t, 0, ∓sqrt2 sech t tanh t, 0) at beta2 = 0.

namespace revhom {
namespace duffing {

struct ExampleParams {
  double s = 2.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  int ell = 0;
};

Vec vector_field(const Vec& x, const ExampleParams& p);
Mat jacobian(const Vec& x, const ExampleParams& p);
Vec d2f(const Vec& x, const Vec& u, const Vec& v, const ExampleParams& p);
Vec d3f(const Vec& u, const Vec& v, const Vec& w, const ExampleParams& p);

Vec homoclinic_exact(double t, int sign = +1);

// beta1 value at which the second variational block acquires a bounded
// symmetric solution: ((2 sqrt s + 4 ell + 1)^2 - 1)/8.
double resonance_beta1(double s, int ell);

// Bounded symmetric solution (xi2, xi4) of the second variational block at
// resonance, ell in {0,1,2}.  With p = sqrt(s):
//   ell=0: sech^p t
//   ell=1: sech^p t (1 - (2p+3)/(2p+2) sech^2 t)
//   ell=2: sech^p t (1 - (2p+5)/(p+1) sech^2 t
//                      + (2p+5)(2p+7)/(4(p+1)(p+2)) sech^4 t)
// xi4 is the analytic t-derivative.
std::pair<double, double> bounded_xi2(double t, double s, int ell);

// A fundamental pair for one of the planar variational blocks along the
// homoclinic orbit, Wronskian-normalized to 1, with the adjoint pair.
struct PlanarFundamentalSet {
  int block = 1;  // 1: (x1,x3) plane, 2: (x2,x4) plane
  // 2-vectors (u, u') as functions of t
  std::function<Eigen::Vector2d(double)> phi_b;  // bounded
  std::function<Eigen::Vector2d(double)> phi_u;  // unbounded mate
  std::function<Eigen::Vector2d(double)> psi_b;  // adjoint, pairs with phi_b
  std::function<Eigen::Vector2d(double)> psi_u;
  double growth_rate = 1.0;  // e^{±rate·|t|} asymptotics
  double wronskian(double t) const {
    Eigen::Vector2d b = phi_b(t), u = phi_u(t);
    return b[0] * u[1] - b[1] * u[0];
  }
};

// Block 1 is fully closed-form; block 2 integrates the unbounded mate
// numerically over [-span, span] with scale bookkeeping.  Block 2 with the
// bounded solution requested requires beta1 at resonance.
PlanarFundamentalSet planar_fundamentals(int block, const ExampleParams& p,
                                         double span = 25.0);

// (R, S, S') with S = diag(1,-1,1,-1), S' = diag(-1,1,-1,1).
std::array<Mat, 3> involutions();

// Wrap as a ReversibleSystem; params keys: s, beta1, beta2, beta3.
ReversibleSystem make_system(const ExampleParams& p);
ExampleParams params_from_map(const Params& m);

}  // namespace duffing
}  // namespace revhom
