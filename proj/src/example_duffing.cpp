#include "revhom/example_duffing.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace revhom {
namespace duffing {

namespace {
const double kSqrt2 = std::sqrt(2.0);
double sech(double t) { return 1.0 / std::cosh(t); }
}  // namespace

Vec vector_field(const Vec& x, const ExampleParams& p) {
  Vec f(4);
  f[0] = x[2];
  f[1] = x[3];
  f[2] = x[0] - (x[0] * x[0] + 8.0 * x[1] * x[1]) * x[0] - p.beta2 * x[1];
  f[3] = p.s * x[1] - p.beta1 * (x[0] * x[0] + 2.0 * x[1] * x[1]) * x[1] -
         p.beta2 * x[0] - p.beta3 * x[1] * x[1];
  return f;
}

Mat jacobian(const Vec& x, const ExampleParams& p) {
  Mat J = Mat::Zero(4, 4);
  J(0, 2) = 1.0;
  J(1, 3) = 1.0;
  J(2, 0) = 1.0 - 3.0 * x[0] * x[0] - 8.0 * x[1] * x[1];
  J(2, 1) = -16.0 * x[0] * x[1] - p.beta2;
  J(3, 0) = -2.0 * p.beta1 * x[0] * x[1] - p.beta2;
  J(3, 1) = p.s - p.beta1 * (x[0] * x[0] + 6.0 * x[1] * x[1]) - 2.0 * p.beta3 * x[1];
  return J;
}

Vec d2f(const Vec& x, const Vec& u, const Vec& v, const ExampleParams& p) {
  Vec r = Vec::Zero(4);
  const double sym = u[0] * v[1] + u[1] * v[0];
  r[2] = -6.0 * x[0] * u[0] * v[0] - 16.0 * x[1] * sym - 16.0 * x[0] * u[1] * v[1];
  r[3] = -2.0 * p.beta1 * (x[1] * u[0] * v[0] + x[0] * sym) -
         (12.0 * p.beta1 * x[1] + 2.0 * p.beta3) * u[1] * v[1];
  return r;
}

Vec d3f(const Vec& u, const Vec& v, const Vec& w, const ExampleParams& p) {
  Vec r = Vec::Zero(4);
  r[2] = -6.0 * u[0] * v[0] * w[0] -
         16.0 * (u[0] * v[1] * w[1] + u[1] * v[0] * w[1] + u[1] * v[1] * w[0]);
  r[3] = -2.0 * p.beta1 *
             (u[0] * v[0] * w[1] + u[0] * v[1] * w[0] + u[1] * v[0] * w[0]) -
         12.0 * p.beta1 * u[1] * v[1] * w[1];
  return r;
}

Vec homoclinic_exact(double t, int sign) {
  const double sg = sign >= 0 ? 1.0 : -1.0;
  const double S = sech(t), T = std::tanh(t);
  Vec x(4);
  x[0] = sg * kSqrt2 * S;
  x[1] = 0.0;
  x[2] = -sg * kSqrt2 * S * T;
  x[3] = 0.0;
  return x;
}

double resonance_beta1(double s, int ell) {
  if (s <= 0) throw std::domain_error("resonance_beta1: s must be positive");
  if (ell < 0) throw std::domain_error("resonance_beta1: ell must be nonnegative");
  const double q = 2.0 * std::sqrt(s) + 4.0 * ell + 1.0;
  return (q * q - 1.0) / 8.0;
}

std::pair<double, double> bounded_xi2(double t, double s, int ell) {
  if (ell < 0 || ell > 2)
    throw std::domain_error("bounded_xi2: only ell in {0,1,2} is supported");
  const double p = std::sqrt(s);
  const double S = sech(t), T = std::tanh(t);
  const double Sp = std::pow(S, p);
  double xi2, xi4;
  switch (ell) {
    case 0:
      xi2 = Sp;
      xi4 = -p * Sp * T;
      break;
    case 1: {
      const double c1 = (2 * p + 3) / (2 * p + 2);
      xi2 = Sp * (1.0 - c1 * S * S);
      xi4 = -T * (p * Sp - c1 * (p + 2) * Sp * S * S);
      break;
    }
    default: {
      const double A = -(2 * p + 5) / (p + 1);
      const double B = (2 * p + 5) * (2 * p + 7) / (4 * (p + 1) * (p + 2));
      const double S2 = S * S;
      xi2 = Sp * (1.0 + A * S2 + B * S2 * S2);
      xi4 = -T * Sp * (p + A * (p + 2) * S2 + B * (p + 4) * S2 * S2);
      break;
    }
  }
  return {xi2, xi4};
}

namespace {

// Block-1 planar solutions in closed form.  u_b = d/dt x1^h is the bounded
// odd solution; its even mate, found by reduction of order, is
//   e(t) = cosh t - 3 sech t + 3 t sech t tanh t,   e(0) = -2, e'(0) = 0,
// and u_e = e / (-2 sqrt2) completes the Wronskian to 1.
double u_b1(double t) { return -kSqrt2 * sech(t) * std::tanh(t); }
double du_b1(double t) {
  const double S = sech(t);
  return kSqrt2 * S * (1.0 - 2.0 * S * S);
}
double u_e1(double t) {
  const double S = sech(t), T = std::tanh(t);
  return (std::cosh(t) - 3.0 * S + 3.0 * t * S * T) / (-2.0 * kSqrt2);
}
double du_e1(double t) {
  const double S = sech(t), T = std::tanh(t);
  return (std::sinh(t) + 6.0 * S * T + 3.0 * t * S * (2.0 * S * S - 1.0)) /
         (-2.0 * kSqrt2);
}

// dense RK4 solution of a planar second-order equation u'' = q(t) u,
// stored on a uniform grid for cubic Hermite evaluation
struct DenseOdeSolution {
  double t0, h;
  std::vector<Eigen::Vector2d> y, dy;
  Eigen::Vector2d eval(double t) const {
    double u = (t - t0) / h;
    int i = (int)std::floor(u);
    if (i < 0 || i + 1 >= (int)y.size())
      throw std::out_of_range("planar fundamental evaluated outside its span");
    double s = u - i;
    const Eigen::Vector2d &y0 = y[i], &y1 = y[i + 1];
    const Eigen::Vector2d d0 = h * dy[i], d1 = h * dy[i + 1];
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * d0 +
           (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * d1;
  }
};

DenseOdeSolution integrate_planar(const std::function<double(double)>& q,
                                  const Eigen::Vector2d& y_at_0, double span,
                                  double h) {
  auto rhs = [&](double t, const Eigen::Vector2d& y) {
    return Eigen::Vector2d(y[1], q(t) * y[0]);
  };
  int nside = (int)std::ceil(span / h);
  DenseOdeSolution sol;
  sol.h = h;
  sol.t0 = -nside * h;
  std::vector<Eigen::Vector2d> fwd{y_at_0}, bwd{y_at_0};
  for (int dir : {+1, -1}) {
    auto& store = dir > 0 ? fwd : bwd;
    Eigen::Vector2d y = y_at_0;
    double t = 0, hh = dir * h;
    for (int k = 0; k < nside; ++k) {
      Eigen::Vector2d k1 = rhs(t, y);
      Eigen::Vector2d k2 = rhs(t + hh / 2, y + hh / 2 * k1);
      Eigen::Vector2d k3 = rhs(t + hh / 2, y + hh / 2 * k2);
      Eigen::Vector2d k4 = rhs(t + hh, y + hh * k3);
      y += hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      t += hh;
      store.push_back(y);
    }
  }
  for (int k = nside; k >= 1; --k) sol.y.push_back(bwd[k]);
  for (auto& v : fwd) sol.y.push_back(v);
  sol.dy.reserve(sol.y.size());
  for (size_t i = 0; i < sol.y.size(); ++i)
    sol.dy.push_back(rhs(sol.t0 + i * h, sol.y[i]));
  return sol;
}

}  // namespace

PlanarFundamentalSet planar_fundamentals(int block, const ExampleParams& p,
                                         double span) {
  if (std::abs(p.beta2) > 0)
    throw std::invalid_argument("planar_fundamentals: blocks decouple only at beta2=0");
  PlanarFundamentalSet set;
  set.block = block;
  if (block == 1) {
    set.growth_rate = 1.0;
    set.phi_b = [](double t) { return Eigen::Vector2d(u_b1(t), du_b1(t)); };
    set.phi_u = [](double t) { return Eigen::Vector2d(u_e1(t), du_e1(t)); };
    set.psi_b = [](double t) { return Eigen::Vector2d(du_e1(t), -u_e1(t)); };
    set.psi_u = [](double t) { return Eigen::Vector2d(-du_b1(t), u_b1(t)); };
    return set;
  }
  if (block != 2) throw std::invalid_argument("planar_fundamentals: block must be 1 or 2");
  const double res = resonance_beta1(p.s, p.ell);
  if (std::abs(p.beta1 - res) > 1e-8 * (1.0 + res))
    throw std::runtime_error("no bounded symmetric solution (R5 violated)");
  const double s = p.s, b1 = p.beta1;
  const int ell = p.ell;
  set.growth_rate = std::sqrt(s);
  set.phi_b = [s, ell](double t) {
    auto [xi2, xi4] = bounded_xi2(t, s, ell);
    return Eigen::Vector2d(xi2, xi4);
  };
  // odd mate from integration; phi_u(0) = (0, 1/xi2(0)) makes the Wronskian 1
  auto q = [s, b1](double t) {
    double S = sech(t);
    return s - 2.0 * b1 * S * S;
  };
  double xi2_at_0 = bounded_xi2(0.0, s, ell).first;
  auto sol = std::make_shared<DenseOdeSolution>(
      integrate_planar(q, Eigen::Vector2d(0.0, 1.0 / xi2_at_0), span, 0.002));
  set.phi_u = [sol](double t) { return sol->eval(t); };
  auto phi_b = set.phi_b, phi_u = set.phi_u;
  set.psi_b = [phi_u](double t) {
    Eigen::Vector2d u = phi_u(t);
    return Eigen::Vector2d(u[1], -u[0]);
  };
  set.psi_u = [phi_b](double t) {
    Eigen::Vector2d b = phi_b(t);
    return Eigen::Vector2d(-b[1], b[0]);
  };
  return set;
}

std::array<Mat, 3> involutions() {
  auto diag = [](double a, double b, double c, double d) {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    m(3, 3) = d;
    return m;
  };
  return {diag(1, 1, -1, -1), diag(1, -1, 1, -1), diag(-1, 1, -1, 1)};
}

ExampleParams params_from_map(const Params& m) {
  ExampleParams p;
  auto get = [&](const char* k, double dflt) {
    auto it = m.find(k);
    return it == m.end() ? dflt : it->second;
  };
  p.s = get("s", 2.0);
  p.beta1 = get("beta1", 0.0);
  p.beta2 = get("beta2", 0.0);
  p.beta3 = get("beta3", 0.0);
  p.ell = (int)std::lround(get("ell", 0.0));
  return p;
}

ReversibleSystem make_system(const ExampleParams& p) {
  ReversibleSystem sys;
  sys.dim = 4;
  sys.params = {{"s", p.s}, {"beta1", p.beta1}, {"beta2", p.beta2},
                {"beta3", p.beta3}, {"ell", (double)p.ell}};
  sys.f = [](const Vec& x, const Params& m) {
    return vector_field(x, params_from_map(m));
  };
  sys.df = [](const Vec& x, const Params& m) { return jacobian(x, params_from_map(m)); };
  sys.d2f = [](const Vec& x, const Vec& u, const Vec& v, const Params& m) {
    return d2f(x, u, v, params_from_map(m));
  };
  sys.d3f = [](const Vec&, const Vec& u, const Vec& v, const Vec& w, const Params& m) {
    return d3f(u, v, w, params_from_map(m));
  };
  sys.dmu_f = [](const Vec& x, const Params& m, const std::string& name) -> Vec {
    ExampleParams p = params_from_map(m);
    Vec r = Vec::Zero(4);
    if (name == "beta2") {
      r[2] = -x[1];
      r[3] = -x[0];
    } else if (name == "beta1") {
      r[3] = -(x[0] * x[0] + 2.0 * x[1] * x[1]) * x[1];
    } else if (name == "beta3") {
      r[3] = -x[1] * x[1];
    } else if (name == "s") {
      r[3] = x[1];
    } else {
      throw std::invalid_argument("dmu_f: unknown parameter " + name);
    }
    return r;
  };
  sys.dmu_df = [](const Vec& x, const Vec& v, const Params& m,
                  const std::string& name) -> Vec {
    ExampleParams p = params_from_map(m);
    Vec r = Vec::Zero(4);
    if (name == "beta2") {
      r[2] = -v[1];
      r[3] = -v[0];
    } else if (name == "beta1") {
      r[3] = -(2.0 * x[0] * x[1] * v[0] + (x[0] * x[0] + 6.0 * x[1] * x[1]) * v[1]);
    } else if (name == "beta3") {
      r[3] = -2.0 * x[1] * v[1];
    } else if (name == "s") {
      r[3] = v[1];
    } else {
      throw std::invalid_argument("dmu_df: unknown parameter " + name);
    }
    return r;
  };
  sys.R = involutions()[0];
  return sys;
}

namespace {
const bool registered = [] {
  register_system("duffing4d", [](const Params& m) {
    return make_system(params_from_map(m));
  });
  return true;
}();
}  // namespace

}  // namespace duffing
}  // namespace revhom
