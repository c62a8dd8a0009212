#include "revhom/melnikov.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace revhom {

namespace {

CoefValue as_coef(const QuadResult& q) { return {q.value, q.err_est, q.scale}; }

bool is_zero(const CoefValue& c) {
  return std::abs(c.value) <= 1e-8 * std::max(c.scale, 0.0) + 1e-300;
}

}  // namespace

std::string to_string(Classification c) {
  switch (c) {
    case Classification::persistence: return "persistence";
    case Classification::saddle_node_super: return "saddle-node-super";
    case Classification::saddle_node_sub: return "saddle-node-sub";
    case Classification::transcritical: return "transcritical";
    case Classification::pitchfork_super: return "pitchfork-super";
    case Classification::pitchfork_sub: return "pitchfork-sub";
    case Classification::degenerate: return "degenerate";
  }
  return "degenerate";
}

std::pair<CoefValue, CoefValue> compute_a2_b2(const MelnikovInputs& in) {
  auto a_integrand = [&](double t) {
    return in.psi_n2(t).dot(in.system.dmu_f(in.orbit(t), in.system.params, in.mu_name));
  };
  auto b_integrand = [&](double t) {
    Vec p2 = in.phi2(t);
    return 0.5 * in.psi_n2(t).dot(in.system.d2f(in.orbit(t), p2, p2, in.system.params));
  };
  return {as_coef(integrate_line(a_integrand, in.panel_width)),
          as_coef(integrate_line(b_integrand, in.panel_width))};
}

CoefValue compute_abar2(const MelnikovInputs& in,
                        const std::function<Vec(double)>& xi_mu) {
  auto integrand = [&](double t) {
    Vec x = in.orbit(t), p2 = in.phi2(t);
    Vec term = in.system.dmu_df(x, p2, in.system.params, in.mu_name) +
               in.system.d2f(x, xi_mu(t), p2, in.system.params);
    return in.psi_n2(t).dot(term);
  };
  return as_coef(integrate_line(integrand, in.panel_width));
}

namespace {

// Variation-of-parameters solution of the block-1 equation with forcing g:
//   xi1(t) = u_b(t) I1(t) - u_e(t) I2(t),
//   I1(t) = int_0^t psi13 g,  I2(t) = int_t^inf psi33 g,
// with psi13 = -u_e, psi33 = u_b.  Integrals are accumulated over the Gauss
// panel structure; nothing here starts integrating in the flat tail.
struct Xi1Alpha {
  std::vector<double> edges, I1_at_edge, I2_at_edge;
  const duffing::PlanarFundamentalSet* fund;
  std::function<double(double)> g;

  Xi1Alpha(const duffing::PlanarFundamentalSet& f, std::function<double(double)> g_in,
           double T, double w)
      : fund(&f), g(std::move(g_in)) {
    int half = (int)std::ceil(T / w);
    T = half * w;
    auto F1 = [&](double tau) { return -fund->phi_u(tau)[0] * g(tau); };
    auto F2 = [&](double tau) { return fund->phi_b(tau)[0] * g(tau); };
    int m = 2 * half;
    edges.resize(m + 1);
    for (int k = 0; k <= m; ++k) edges[k] = -T + k * w;
    std::vector<double> p1(m), p2(m);
    for (int k = 0; k < m; ++k) {
      p1[k] = gauss5(F1, edges[k], edges[k + 1]);
      p2[k] = gauss5(F2, edges[k], edges[k + 1]);
    }
    I1_at_edge.assign(m + 1, 0.0);
    for (int k = 0; k < m; ++k) I1_at_edge[k + 1] = I1_at_edge[k] + p1[k];
    const double at0 = I1_at_edge[half];
    for (auto& v : I1_at_edge) v -= at0;  // so I1(0) = 0
    I2_at_edge.assign(m + 1, 0.0);
    for (int k = m - 1; k >= 0; --k) I2_at_edge[k] = I2_at_edge[k + 1] + p2[k];
  }

  std::pair<double, double> partials(double t) const {
    int k = (int)std::floor((t - edges.front()) / (edges[1] - edges[0]));
    k = std::min(std::max(k, 0), (int)edges.size() - 2);
    auto F1 = [&](double tau) { return -fund->phi_u(tau)[0] * g(tau); };
    auto F2 = [&](double tau) { return fund->phi_b(tau)[0] * g(tau); };
    double I1 = I1_at_edge[k] + gauss5(F1, edges[k], t);
    double I2 = gauss5(F2, t, edges[k + 1]) + I2_at_edge[k + 1];
    return {I1, I2};
  }

  double value(double t) const {
    auto [I1, I2] = partials(t);
    return fund->phi_b(t)[0] * I1 - fund->phi_u(t)[0] * I2;
  }
  double derivative(double t) const {
    auto [I1, I2] = partials(t);
    return fund->phi_b(t)[1] * I1 - fund->phi_u(t)[1] * I2;
  }
};

double auto_window(const std::function<double(double)>& f, double cap = 60.0) {
  double fmax = 0;
  for (double t = -5; t <= 5; t += 0.25) fmax = std::max(fmax, std::abs(f(t)));
  double T = 15.0;
  while (T < cap && (std::abs(f(T)) > 1e-15 * fmax || std::abs(f(-T)) > 1e-15 * fmax))
    T += 5.0;
  return T;
}

void require_resonance(const duffing::ExampleParams& p) {
  const double res = duffing::resonance_beta1(p.s, p.ell);
  if (std::abs(p.beta1 - res) > 1e-8 * (1.0 + res))
    throw std::runtime_error("bbar2: beta1 is off resonance for the requested ell");
}

// shared core: bbar2 = -2 beta1 (int x1h xi1a xi2^2 + int xi2^4) for a given
// block-1 forcing g
QuadResult bbar2_from_forcing(const duffing::ExampleParams& p,
                              const duffing::PlanarFundamentalSet& fund,
                              const std::function<double(double)>& g, double w) {
  const double T = auto_window(g);
  Xi1Alpha xi(fund, g, T, w);
  const double s = p.s;
  const int ell = p.ell;
  auto outer1 = [&](double t) {
    double x1h = std::sqrt(2.0) / std::cosh(t);
    double x2v = duffing::bounded_xi2(t, s, ell).first;
    return x1h * xi.value(t) * x2v * x2v;
  };
  auto outer2 = [s, ell](double t) {
    double v = duffing::bounded_xi2(t, s, ell).first;
    return v * v * v * v;
  };
  int panels = (int)std::ceil(2 * T / w);
  double part1 = gauss5_composite(outer1, -T, T, panels);
  double part1f = gauss5_composite(outer1, -T, T, 2 * panels);
  double part2 = gauss5_composite(outer2, -T, T, 2 * panels);
  QuadResult r;
  r.value = -2.0 * p.beta1 * (part1f + part2);
  r.err_est = 2.0 * p.beta1 * std::abs(part1f - part1);
  r.scale = 2.0 * p.beta1 *
            (gauss5_composite([&](double t) { return std::abs(outer1(t)); }, -T, T, panels) +
             std::abs(part2));
  r.window = T;
  return r;
}

}  // namespace

double compute_bbar2_quadrature(const MelnikovInputs& in,
                                const duffing::PlanarFundamentalSet& fundamentals) {
  duffing::ExampleParams p = duffing::params_from_map(in.system.params);
  require_resonance(p);
  if (fundamentals.block != 1)
    throw std::invalid_argument("compute_bbar2_quadrature: needs block-1 fundamentals");
  if (std::abs(fundamentals.wronskian(0.0) - 1.0) > 1e-8 ||
      std::abs(fundamentals.wronskian(3.0) - 1.0) > 1e-8)
    throw std::runtime_error("compute_bbar2_quadrature: Wronskian drift > 1e-8");
  const double s = p.s, b1 = p.beta1;
  const int ell = p.ell;
  // Unit-normalized coupling: the Gamma-function closed form corresponds to
  // forcing -beta1 x1^h xi2^2 in the xi1 equation (coupling beta1 x2^2 in f3).
  auto g = [s, ell, b1](double t) {
    double v = duffing::bounded_xi2(t, s, ell).first;
    return -b1 * std::sqrt(2.0) / std::cosh(t) * v * v;
  };
  return bbar2_from_forcing(p, fundamentals, g, in.panel_width).value;
}

double compute_bbar2_closed(double s, int ell) {
  if (s <= 0) throw std::domain_error("compute_bbar2_closed: s must be positive");
  if (ell < 0 || ell > 2)
    throw std::domain_error("compute_bbar2_closed: ell must be in {0,1,2}");
  const double x = std::sqrt(s);
  double P;
  switch (ell) {
    case 0:
      P = x * (x * x - x - 1.0);
      break;
    case 1:
      P = ((((((145 * x + 530) * x + 115) * x - 1971) * x - 3502) * x - 2427) * x - 630);
      break;
    default:
      P = 27.0 * ((((((((16627.0 * x + 242984.0) * x + 1310501.0) * x + 2451387.0) * x -
                      4949646.0) * x - 34833051.0) * x - 76574422.0) * x - 86008220.0) *
                      x * x  -
                  49776200.0 * x - 12012000.0);
      break;
  }
  double Q = 1.0;
  for (int j = 1; j <= ell; ++j) Q *= (x + j) * (x + j) * (x + j);
  for (int j = 1; j <= 4 * ell; ++j) Q *= (4.0 * x + 2.0 * j - 1.0);
  return std::sqrt(M_PI) * gamma_lanczos(2.0 * x) / gamma_lanczos(2.0 * x + 0.5) * P / Q;
}

CoefValue compute_bbar2_system(const MelnikovInputs& in,
                               const duffing::PlanarFundamentalSet& fundamentals) {
  duffing::ExampleParams p = duffing::params_from_map(in.system.params);
  require_resonance(p);
  // block-1 forcing from the system's own second derivative: the X+ part of
  // (1/2) D^2f(phi2, phi2)
  auto g = [&](double t) {
    Vec p2 = in.phi2(t);
    return 0.5 * in.system.d2f(in.orbit(t), p2, p2, in.system.params)[2];
  };
  const double T = auto_window(g);
  Xi1Alpha xi(fundamentals, g, T, in.panel_width);
  auto integrand = [&](double t) {
    Vec p2 = in.phi2(t);
    Vec xa = Vec::Zero(4);
    xa[0] = xi.value(t);
    xa[2] = xi.derivative(t);
    Vec x = in.orbit(t);
    Vec term = in.system.d3f(x, p2, p2, p2, in.system.params) / 6.0 +
               in.system.d2f(x, xa, p2, in.system.params);
    return in.psi_n2(t).dot(term);
  };
  int panels = (int)std::ceil(2 * T / in.panel_width);
  CoefValue c;
  double coarse = gauss5_composite(integrand, -T, T, panels);
  c.value = gauss5_composite(integrand, -T, T, 2 * panels);
  c.err_est = std::abs(c.value - coarse);
  c.scale = gauss5_composite([&](double t) { return std::abs(integrand(t)); }, -T, T, panels);
  return c;
}

Classification classify(const std::optional<CoefValue>& a2,
                        const std::optional<CoefValue>& b2,
                        const std::optional<CoefValue>& abar2,
                        const std::optional<CoefValue>& bbar2, Mode mode) {
  switch (mode) {
    case Mode::saddle_node: {
      if (!a2 || !b2) throw std::invalid_argument("classify: saddle_node needs a2 and b2");
      if (is_zero(*a2) || is_zero(*b2)) return Classification::degenerate;
      return a2->value * b2->value < 0 ? Classification::saddle_node_super
                                       : Classification::saddle_node_sub;
    }
    case Mode::transcritical: {
      if (!abar2 || !b2)
        throw std::invalid_argument("classify: transcritical needs abar2 and b2");
      if (is_zero(*abar2) || is_zero(*b2)) return Classification::degenerate;
      return Classification::transcritical;
    }
    case Mode::pitchfork: {
      if (!abar2 || !bbar2)
        throw std::invalid_argument("classify: pitchfork needs abar2 and bbar2");
      if (is_zero(*abar2) || is_zero(*bbar2)) return Classification::degenerate;
      return abar2->value * bbar2->value < 0 ? Classification::pitchfork_super
                                             : Classification::pitchfork_sub;
    }
  }
  return Classification::degenerate;
}

MelnikovInputs example_inputs(const duffing::ExampleParams& p,
                              const std::string& mu_name) {
  MelnikovInputs in;
  in.system = duffing::make_system(p);
  in.mu_name = mu_name;
  in.orbit = [](double t) { return duffing::homoclinic_exact(t); };
  const double s = p.s;
  const int ell = p.ell;
  in.phi2 = [s, ell](double t) {
    auto [x2, x4] = duffing::bounded_xi2(t, s, ell);
    Vec v = Vec::Zero(4);
    v[1] = x2;
    v[3] = x4;
    return v;
  };
  in.psi_n2 = [s, ell](double t) {
    auto [x2, x4] = duffing::bounded_xi2(t, s, ell);
    Vec v = Vec::Zero(4);
    v[1] = -x4;
    v[3] = x2;
    return v;
  };
  return in;
}

MelnikovReport example_report(const duffing::ExampleParams& p, Mode mode) {
  MelnikovReport rep;
  rep.mode = mode == Mode::saddle_node ? "saddle_node"
             : mode == Mode::transcritical ? "transcritical" : "pitchfork";
  const std::string mu = mode == Mode::saddle_node ? "beta2" : "beta1";
  MelnikovInputs in = example_inputs(p, mu);
  rep.params_echo = in.system.params;
  auto [a2, b2] = compute_a2_b2(in);
  rep.a2 = a2;
  rep.b2 = b2;
  if (mode != Mode::saddle_node) {
    // xi^mu = 0 for mu = beta1: the orbit persists in the invariant plane
    rep.abar2 = compute_abar2(in, [](double) { return Vec::Zero(4); });
  }
  if (mode == Mode::pitchfork) {
    auto fund = duffing::planar_fundamentals(1, p);
    rep.bbar2 = compute_bbar2_system(in, fund);
    rep.bbar2_closed = compute_bbar2_closed(p.s, p.ell);
    rep.bbar2_quadrature = compute_bbar2_quadrature(in, fund);
  }
  rep.classification = classify(rep.a2, rep.b2, rep.abar2, rep.bbar2, mode);
  return rep;
}

std::string MelnikovReport::to_json() const {
  nlohmann::ordered_json j;
  auto put = [&](const char* key, const std::optional<CoefValue>& c) {
    if (c)
      j[key] = c->value;
    else
      j[key] = nullptr;
  };
  put("a2", a2);
  put("b2", b2);
  put("abar2", abar2);
  put("bbar2", bbar2);
  j["bbar2_closed"] = bbar2_closed ? nlohmann::ordered_json(*bbar2_closed)
                                   : nlohmann::ordered_json(nullptr);
  j["bbar2_quadrature"] = bbar2_quadrature ? nlohmann::ordered_json(*bbar2_quadrature)
                                           : nlohmann::ordered_json(nullptr);
  j["classification"] = to_string(classification);
  nlohmann::ordered_json errs;
  auto put_err = [&](const char* key, const std::optional<CoefValue>& c) {
    if (c) errs[key] = c->err_est;
  };
  put_err("a2", a2);
  put_err("b2", b2);
  put_err("abar2", abar2);
  put_err("bbar2", bbar2);
  j["errors"] = errs;
  nlohmann::ordered_json pj;
  for (const auto& [k, v] : params_echo) pj[k] = v;
  j["params"] = pj;
  j["mode"] = mode;
  return j.dump(2);
}

}  // namespace revhom
