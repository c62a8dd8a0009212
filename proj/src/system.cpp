#include "revhom/system.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace revhom {

ReversibilityReport check_reversibility(const ReversibleSystem& sys, int n_samples,
                                        unsigned seed) {
  if (sys.dim <= 0 || sys.dim % 2 != 0)
    throw std::invalid_argument("check_reversibility: dim must be even and positive");
  ReversibilityReport rep;
  rep.involution_ok = (sys.R * sys.R - Mat::Identity(sys.dim, sys.dim)).norm() < 1e-12;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double fscale = 0;
  for (int k = 0; k < std::max(1, n_samples); ++k) {
    Vec x(sys.dim);
    for (int i = 0; i < sys.dim; ++i) x[i] = u(rng);
    Vec fx = sys.f(x, sys.params);
    Vec res = sys.f(sys.R * x, sys.params) + sys.R * fx;
    rep.max_residual = std::max(rep.max_residual, res.norm());
    fscale = std::max(fscale, fx.norm());
  }
  rep.pass = rep.involution_ok && rep.max_residual <= 1e-10 * (1.0 + fscale);
  return rep;
}

namespace {

void sign_fix(Eigen::Ref<Vec> v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

// real eigen-decomposition of a matrix expected to have real simple spectrum
void real_eigs(const Mat& A, std::vector<double>& vals, Mat& vecs) {
  Eigen::EigenSolver<Mat> es(A);
  if (es.info() != Eigen::Success) throw std::runtime_error("defective spectrum");
  const auto ev = es.eigenvalues();
  const int n = (int)A.rows();
  vals.resize(n);
  vecs.resize(n, n);
  for (int i = 0; i < n; ++i) {
    // a defective zero eigenvalue shows up as a tiny complex pair; report it
    // as loss of hyperbolicity rather than a genuinely complex spectrum
    if (std::abs(ev[i]) < 1e-6)
      throw std::runtime_error("non-hyperbolic eigenvalue");
    if (std::abs(ev[i].imag()) > 1e-9 * (1.0 + std::abs(ev[i].real())))
      throw std::runtime_error("defective spectrum: complex saddle spectrum unsupported");
    vals[i] = ev[i].real();
    Vec v = es.eigenvectors().col(i).real();
    // the imaginary part must be negligible for a real eigenvalue
    v.normalize();
    sign_fix(v);
    vecs.col(i) = v;
  }
}

}  // namespace

SaddleSpectrum equilibrium_spectrum(const ReversibleSystem& sys, const Params& mu) {
  const int n2 = sys.dim, n = n2 / 2;
  Vec origin = Vec::Zero(n2);
  if (sys.f(origin, mu).norm() > 1e-12)
    throw std::runtime_error("equilibrium_spectrum: origin is not an equilibrium");
  Mat J = sys.df(origin, mu);

  std::vector<double> vals;
  Mat rvecs;
  real_eigs(J, vals, rvecs);
  std::vector<double> lvals;
  Mat lvecs;
  real_eigs(J.transpose(), lvals, lvecs);

  for (double v : vals)
    if (std::abs(v) < 1e-8) throw std::runtime_error("non-hyperbolic eigenvalue");

  // sort by real part, keep vectors aligned
  std::vector<int> idx(n2), lidx(n2);
  for (int i = 0; i < n2; ++i) idx[i] = lidx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
  std::sort(lidx.begin(), lidx.end(), [&](int a, int b) { return lvals[a] < lvals[b]; });

  SaddleSpectrum spec;
  spec.unstable_right.resize(n2, n);
  spec.stable_left.resize(n, n2);
  int iu = 0, is = 0;
  for (int i = 0; i < n2; ++i) {
    double lam = vals[idx[i]];
    spec.eigenvalues.push_back({lam, 0.0});
    if (lam > 0) {
      spec.unstable_right.col(iu) = rvecs.col(idx[i]);
      spec.unstable_values.push_back(lam);
      ++iu;
    }
  }
  for (int i = 0; i < n2; ++i) {
    double lam = lvals[lidx[i]];
    if (lam < 0) {
      spec.stable_left.row(is) = lvecs.col(lidx[i]).transpose();
      spec.stable_values.push_back(lam);
      ++is;
    }
  }
  if (iu != n || is != n)
    throw std::runtime_error("equilibrium_spectrum: spectrum is not of saddle type");
  return spec;
}

Mat build_Ls(const SaddleSpectrum& spec) {
  Mat Ls = spec.stable_left;
  // rows already unit-norm with deterministic sign; verify biorthogonality
  Mat prod = Ls * spec.unstable_right;
  if (prod.cwiseAbs().maxCoeff() > 1e-8)
    throw std::runtime_error("build_Ls: stable left rows do not annihilate unstable space");
  return Ls;
}

std::pair<Mat, Mat> fix_R_projector(const ReversibleSystem& sys) {
  const int n2 = sys.dim, n = n2 / 2;
  if ((sys.R * sys.R - Mat::Identity(n2, n2)).norm() > 1e-10)
    throw std::runtime_error("fix_R_projector: R is not an involution");
  auto kernel_rows = [&](const Mat& A) {
    Eigen::FullPivLU<Mat> lu(A);
    lu.setThreshold(1e-9);
    Mat K = lu.kernel();  // n2 x n
    // orthonormalize, deterministic signs
    Eigen::HouseholderQR<Mat> qr(K);
    Mat Q = qr.householderQ() * Mat::Identity(n2, K.cols());
    for (int j = 0; j < Q.cols(); ++j) sign_fix(Q.col(j));
    return Mat(Q.transpose());
  };
  Mat Pfix = kernel_rows(sys.R - Mat::Identity(n2, n2));
  Mat Panti = kernel_rows(sys.R + Mat::Identity(n2, n2));
  if (Pfix.rows() != n || Panti.rows() != n)
    throw std::runtime_error("fix_R_projector: dim Fix(R) != n");
  return {Pfix, Panti};
}

void attach_fd_tensors(ReversibleSystem& sys) {
  auto df = sys.df;
  // central differences of the Jacobian action; h ~ cbrt(eps) * scale
  sys.d2f = [df](const Vec& x, const Vec& u, const Vec& v, const Params& p) -> Vec {
    double h = std::cbrt(2.2e-16) * (1.0 + x.norm()) / std::max(1.0, v.norm());
    return ((df(x + h * v, p) - df(x - h * v, p)) / (2 * h)) * u;
  };
  auto d2f = sys.d2f;
  sys.d3f = [d2f](const Vec& x, const Vec& u, const Vec& v, const Vec& w,
                  const Params& p) -> Vec {
    double h = std::sqrt(std::cbrt(2.2e-16)) * (1.0 + x.norm()) / std::max(1.0, w.norm());
    return (d2f(x + h * w, u, v, p) - d2f(x - h * w, u, v, p)) / (2 * h);
  };
}

namespace {
std::map<std::string, SystemFactory>& registry() {
  static std::map<std::string, SystemFactory> reg;
  return reg;
}
}  // namespace

void register_system(const std::string& name, SystemFactory make) {
  registry()[name] = std::move(make);
}

ReversibleSystem make_registered_system(const std::string& name, const Params& params) {
  auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("unknown system: " + name);
  return it->second(params);
}

}  // namespace revhom
