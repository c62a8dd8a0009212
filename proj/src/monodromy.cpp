#include "revhom/monodromy.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace revhom {

namespace {

using cplx = std::complex<double>;

// sech/tanh through e^{-|Re t|}-sized exponentials to avoid overflow
cplx sech_c(cplx t) {
  if (t.real() >= 0) {
    cplx w = std::exp(-t);
    return 2.0 * w / (1.0 + w * w);
  }
  cplx w = std::exp(t);
  return 2.0 * w / (1.0 + w * w);
}

cplx q_of_t(int block, const duffing::ExampleParams& p, cplx t) {
  cplx s2 = sech_c(t);
  s2 *= s2;
  return block == 1 ? 1.0 - 6.0 * s2 : p.s - 2.0 * p.beta1 * s2;
}

// Dormand-Prince 5(4), adaptive, matrix-valued complex state over a real
// path parameter; supports backward spans.
template <typename RHS>
Mat2c rk54(RHS rhs, Mat2c y, double s0, double s1, double tol) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  const double dir = s1 >= s0 ? 1.0 : -1.0;
  double s = s0, h = dir * std::min(0.1, std::abs(s1 - s0));
  int guard = 0;
  while (dir * (s1 - s) > 1e-14 && ++guard < 1000000) {
    if (dir * (s + h - s1) > 0) h = s1 - s;
    Mat2c k1 = rhs(s, y);
    Mat2c k2 = rhs(s + c2 * h, y + h * (a21 * k1));
    Mat2c k3 = rhs(s + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Mat2c k4 = rhs(s + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Mat2c k5 = rhs(s + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Mat2c k6 =
        rhs(s + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Mat2c ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Mat2c k7 = rhs(s + h, ynew);
    Mat2c err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double sc = tol * (1.0 + y.cwiseAbs().maxCoeff());
    double en = err.cwiseAbs().maxCoeff() / sc;
    if (en <= 1.0) {
      s += h;
      y = ynew;
    }
    double fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
    fac = std::min(5.0, std::max(0.2, fac));
    h *= fac;
    if (std::abs(h) < 1e-14) throw std::runtime_error("rk54: step rejection cascade");
  }
  if (guard >= 1000000) throw std::runtime_error("rk54: step limit exceeded");
  return y;
}

}  // namespace

Mat2c chart_coefficients(int block, const duffing::ExampleParams& p,
                         const ChartSpec& chart, cplx z) {
  if (std::abs(std::abs(z) - 1.0) < 1e-9)
    throw std::domain_error("chart_coefficients: z on the coefficient pole locus |z|=1");
  if (z == cplx(0, 0))
    throw std::domain_error("chart_coefficients: z=0 is the singular point");
  // sech t = 2z/(1+z^2) in both charts (sech is even)
  cplx s = 2.0 * z / (1.0 + z * z);
  cplx q = block == 1 ? 1.0 - 6.0 * s * s : p.s - 2.0 * p.beta1 * s * s;
  const double lam = -chart.chart * chart.lambda_abs;  // lambda_- on Sigma_+, etc.
  Mat2c A;
  A << 0.0, 1.0, q, 0.0;
  return A / (lam * z);
}

MonodromyResult monodromy_matrix(int block, const duffing::ExampleParams& p,
                                 const ChartSpec& chart, double tol) {
  if (std::abs(p.beta2) > 0)
    throw std::invalid_argument("monodromy_matrix: blocks decouple only at beta2=0");
  MonodromyResult res;
  res.chart = chart;
  res.block = block;
  const double t1 = chart.basepoint();

  // anchor: fundamental matrix from t=0 (identity basis) to t1 on the real
  // axis, QR-renormalized every 5 time units
  auto rhs_real = [&](double t, const Mat2c& y) {
    Mat2c A;
    A << 0.0, 1.0, q_of_t(block, p, cplx(t, 0)), 0.0;
    return Mat2c(A * y);
  };
  Mat2c Q = Mat2c::Identity(), C = Mat2c::Identity();
  double t = 0;
  const double dir = t1 >= 0 ? 1.0 : -1.0;
  while (std::abs(t1 - t) > 1e-14) {
    double tnext = t + dir * std::min(5.0, std::abs(t1 - t));
    Q = rk54(rhs_real, Q, t, tnext, tol);
    Eigen::HouseholderQR<Mat2c> qr(Q);
    Mat2c R = qr.matrixQR().triangularView<Eigen::Upper>();
    Q = qr.householderQ();
    C = R * C;
    t = tnext;
  }

  // loop: t(theta) = t1 - i*chart*theta/|lambda|, theta 0 -> 2 pi
  const cplx dt_dtheta = cplx(0, -1) * (double)chart.chart / chart.lambda_abs;
  auto rhs_loop = [&](double theta, const Mat2c& y) {
    cplx tc = cplx(t1, 0) + dt_dtheta * theta;
    Mat2c A;
    A << 0.0, 1.0, q_of_t(block, p, tc), 0.0;
    return Mat2c(dt_dtheta * A * y);
  };
  Mat2c Qloop = rk54(rhs_loop, Q, 0.0, 2.0 * M_PI, tol);

  Mat2c Mlocal = Q.inverse() * Qloop;
  res.M = C.inverse() * Mlocal * C;
  res.det_residual = std::abs(res.M.determinant() - 1.0);
  if (res.det_residual > 1e-6)
    throw std::runtime_error("monodromy_matrix: determinant residual above 1e-6");

  Eigen::ComplexEigenSolver<Mat2c> es(res.M);
  res.eigenvalues = es.eigenvalues();
  res.eigenvectors = es.eigenvectors();
  if (std::abs(res.eigenvalues[0] - res.eigenvalues[1]) < 1e-6) {
    // defective (unipotent) case: one invariant direction, from the kernel
    // of M - lambda I
    cplx lam = 0.5 * (res.eigenvalues[0] + res.eigenvalues[1]);
    Eigen::JacobiSVD<Mat2c> svd(res.M - lam * Mat2c::Identity(), Eigen::ComputeFullV);
    Vec2c v = svd.matrixV().col(1);
    res.eigenvectors.col(0) = v;
    res.eigenvectors.col(1) = v;
  }
  return res;
}

TriangDiagnosis check_triangularizable(const MonodromyResult& m_plus,
                                       const MonodromyResult& m_minus,
                                       const Vec2c& bounded_direction) {
  if (m_plus.block != m_minus.block)
    throw std::invalid_argument("check_triangularizable: basis mismatch (blocks differ)");
  auto angle = [](const Vec2c& u, const Vec2c& v) {
    double c = std::abs((u.adjoint() * v)(0, 0)) / (u.norm() * v.norm());
    return std::acos(std::min(1.0, c));
  };
  TriangDiagnosis d;
  d.min_angle = 1e300;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      d.min_angle = std::min(
          d.min_angle, angle(m_plus.eigenvectors.col(i), m_minus.eigenvectors.col(j)));
  d.common_line = d.min_angle <= 1e-5;
  Vec2c v = bounded_direction.normalized();
  auto fixed_res = [&](const Mat2c& M) {
    cplx lam = (v.adjoint() * M * v)(0, 0);
    return (M * v - lam * v).norm();
  };
  d.fixed_residual = std::max(fixed_res(m_plus.M), fixed_res(m_minus.M));
  d.bounded_fixed = d.fixed_residual <= 1e-6;
  return d;
}

std::string monodromy_json(const MonodromyResult& r) {
  nlohmann::ordered_json j;
  j["chart"] = r.chart.chart > 0 ? "Sigma+" : "Sigma-";
  j["eps"] = r.chart.eps;
  j["block"] = r.block;
  nlohmann::ordered_json re = nlohmann::ordered_json::array(),
                         im = nlohmann::ordered_json::array();
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      re.push_back(r.M(i, k).real());
      im.push_back(r.M(i, k).imag());
    }
  j["matrix_re"] = re;
  j["matrix_im"] = im;
  j["det_residual"] = r.det_residual;
  nlohmann::ordered_json ev = nlohmann::ordered_json::array();
  for (int i = 0; i < 2; ++i)
    ev.push_back({{"re", r.eigenvalues[i].real()}, {"im", r.eigenvalues[i].imag()}});
  j["eigenvalues"] = ev;
  return j.dump(2);
}

}  // namespace revhom
