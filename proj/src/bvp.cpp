#include "revhom/bvp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace revhom {

namespace colloc {
namespace {
const double r15 = std::sqrt(15.0);
}
const double c[3] = {0.5 - r15 / 10.0, 0.5, 0.5 + r15 / 10.0};
const double A[3][3] = {
    {5.0 / 36.0, 2.0 / 9.0 - r15 / 15.0, 5.0 / 36.0 - r15 / 30.0},
    {5.0 / 36.0 + r15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - r15 / 24.0},
    {5.0 / 36.0 + r15 / 30.0, 2.0 / 9.0 + r15 / 15.0, 5.0 / 36.0}};
const double b[3] = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};
}  // namespace colloc

std::vector<double> make_graded_mesh(double T, int N) {
  // equidistribute w(t) = (0.03 + sech t)^(1/2): fine near the hump at t=0,
  // coarser in the exponential tail
  const int fine = 200000;
  std::vector<double> cum(fine + 1, 0.0);
  auto w = [](double t) { return std::sqrt(0.03 + 1.0 / std::cosh(t)); };
  const double h = T / fine;
  for (int i = 1; i <= fine; ++i) {
    double t0 = -T + (i - 1) * h, t1 = -T + i * h;
    cum[i] = cum[i - 1] + 0.5 * (w(t0) + w(t1)) * h;
  }
  std::vector<double> nodes(N + 1);
  nodes[0] = -T;
  nodes[N] = 0.0;
  int j = 0;
  for (int k = 1; k < N; ++k) {
    double target = cum[fine] * k / N;
    while (j < fine && cum[j + 1] < target) ++j;
    double frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
    nodes[k] = -T + (j + frac) * h;
  }
  return nodes;
}

void refresh_boundary(HomoclinicBVP& bvp) {
  SaddleSpectrum spec = equilibrium_spectrum(bvp.sys, bvp.sys.params);
  bvp.Ls = build_Ls(spec);
  bvp.Pminus = fix_R_projector(bvp.sys).second;
}

HomoclinicBVP make_bvp(const ReversibleSystem& sys, double T, int N) {
  HomoclinicBVP bvp;
  bvp.sys = sys;
  bvp.T = T;
  bvp.nodes = make_graded_mesh(T, N);
  refresh_boundary(bvp);
  return bvp;
}

void set_param(HomoclinicBVP& bvp, const std::string& name, double value) {
  bvp.sys.params[name] = value;
  refresh_boundary(bvp);
}

Vec sample_guess(const HomoclinicBVP& bvp, const std::function<Vec(double)>& x_of_t) {
  const int d = bvp.sys.dim, N = bvp.n_intervals();
  Vec X(bvp.n_unknowns());
  X.segment(colloc::off_node(0, d), d) = x_of_t(bvp.nodes[0]);
  for (int i = 1; i <= N; ++i) {
    double t0 = bvp.nodes[i - 1], h = bvp.nodes[i] - t0;
    for (int j = 0; j < 3; ++j)
      X.segment(colloc::off_stage(i, j, d), d) = x_of_t(t0 + colloc::c[j] * h);
    X.segment(colloc::off_node(i, d), d) = x_of_t(bvp.nodes[i]);
  }
  return X;
}

Vec assemble_residual(const HomoclinicBVP& bvp, const Vec& X) {
  const int d = bvp.sys.dim, N = bvp.n_intervals();
  if (!X.allFinite()) throw std::runtime_error("assemble_residual: non-finite state");
  Vec R(bvp.n_unknowns());
  R.segment(0, 2) = bvp.Ls * X.segment(colloc::off_node(0, d), d);
  R.segment(2, 2) = bvp.Pminus * X.segment(colloc::off_node(N, d), d);
  for (int i = 1; i <= N; ++i) {
    const double h = bvp.nodes[i] - bvp.nodes[i - 1];
    const size_t base = (size_t)(i - 1) * 4 * d + 4;
    Vec f[3];
    for (int j = 0; j < 3; ++j)
      f[j] = bvp.sys.f(X.segment(colloc::off_stage(i, j, d), d), bvp.sys.params);
    auto xm = X.segment(colloc::off_node(i - 1, d), d);
    for (int j = 0; j < 3; ++j) {
      Vec r = X.segment(colloc::off_stage(i, j, d), d) - xm;
      for (int k = 0; k < 3; ++k) r -= h * colloc::A[j][k] * f[k];
      R.segment(base + j * d, d) = r;
    }
    Vec r = X.segment(colloc::off_node(i, d), d) - xm;
    for (int j = 0; j < 3; ++j) r -= h * colloc::b[j] * f[j];
    R.segment(base + 3 * d, d) = r;
  }
  return R;
}

SpMat assemble_jacobian(const HomoclinicBVP& bvp, const Vec& X) {
  const int d = bvp.sys.dim, N = bvp.n_intervals();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve((size_t)N * d * d * 20);
  auto add_block = [&](size_t row, size_t col, const Mat& B, double scale) {
    for (int r = 0; r < B.rows(); ++r)
      for (int cidx = 0; cidx < B.cols(); ++cidx)
        if (B(r, cidx) != 0.0) trip.emplace_back(row + r, col + cidx, scale * B(r, cidx));
  };
  const Mat I = Mat::Identity(d, d);
  add_block(0, colloc::off_node(0, d), bvp.Ls, 1.0);
  add_block(2, colloc::off_node(N, d), bvp.Pminus, 1.0);
  for (int i = 1; i <= N; ++i) {
    const double h = bvp.nodes[i] - bvp.nodes[i - 1];
    const size_t base = (size_t)(i - 1) * 4 * d + 4;
    Mat J[3];
    for (int j = 0; j < 3; ++j)
      J[j] = bvp.sys.df(X.segment(colloc::off_stage(i, j, d), d), bvp.sys.params);
    for (int j = 0; j < 3; ++j) {
      add_block(base + j * d, colloc::off_node(i - 1, d), I, -1.0);
      for (int k = 0; k < 3; ++k) {
        if (k == j) add_block(base + j * d, colloc::off_stage(i, k, d), I, 1.0);
        add_block(base + j * d, colloc::off_stage(i, k, d), J[k], -h * colloc::A[j][k]);
      }
    }
    add_block(base + 3 * d, colloc::off_node(i, d), I, 1.0);
    add_block(base + 3 * d, colloc::off_node(i - 1, d), I, -1.0);
    for (int j = 0; j < 3; ++j)
      add_block(base + 3 * d, colloc::off_stage(i, j, d), J[j], -h * colloc::b[j]);
  }
  SpMat Jm(bvp.n_unknowns(), bvp.n_unknowns());
  Jm.setFromTriplets(trip.begin(), trip.end());
  return Jm;
}

Vec residual_param_derivative(HomoclinicBVP& bvp, const Vec& X, const std::string& name) {
  const double v0 = bvp.sys.params.at(name);
  const double dh = 1e-7 * (1.0 + std::abs(v0));
  set_param(bvp, name, v0 + dh);
  Vec rp = assemble_residual(bvp, X);
  set_param(bvp, name, v0 - dh);
  Vec rm = assemble_residual(bvp, X);
  set_param(bvp, name, v0);
  return (rp - rm) / (2.0 * dh);
}

OrbitMeasures orbit_measures(const HomoclinicBVP& bvp, const Vec& X) {
  const int d = bvp.sys.dim, N = bvp.n_intervals();
  OrbitMeasures m;
  m.x2_at_0 = X[colloc::off_node(N, d) + 1];
  m.max_x2 = -1e300;
  m.min_x2 = 1e300;
  double l2sq = 0;
  auto see = [&](double v) {
    m.max_x2 = std::max(m.max_x2, v);
    m.min_x2 = std::min(m.min_x2, v);
  };
  see(X[colloc::off_node(0, d) + 1]);
  for (int i = 1; i <= N; ++i) {
    const double h = bvp.nodes[i] - bvp.nodes[i - 1];
    see(X[colloc::off_node(i, d) + 1]);
    for (int j = 0; j < 3; ++j) {
      auto xs = X.segment(colloc::off_stage(i, j, d), d);
      see(xs[1]);
      l2sq += h * colloc::b[j] * xs.squaredNorm();
    }
  }
  // reflected half contributes equally (R is a sign matrix, norms preserved;
  // x2 is R-even so extrema repeat)
  m.l2_norm = std::sqrt(2.0 * l2sq);
  return m;
}

HomoclinicOrbit solve(HomoclinicBVP& bvp, const Vec& guess, const NewtonOptions& opts) {
  const double guess_norm = guess.norm();
  if (guess_norm <= 0) throw std::invalid_argument("solve: empty guess");
  Vec X = guess;
  Vec R = assemble_residual(bvp, X);
  double rn = R.lpNorm<Eigen::Infinity>();
  int it = 0;
  for (; it < opts.max_iter && rn > opts.tol; ++it) {
    SpMat J = assemble_jacobian(bvp, X);
    Eigen::SparseLU<SpMat> lu(J);
    if (lu.info() != Eigen::Success)
      throw SolveError("solve: singular collocation Jacobian", rn);
    Vec dx = lu.solve(-R);
    double lambda = 1.0;
    for (int bt = 0; bt < 8; ++bt) {
      Vec Xn = X + lambda * dx;
      Vec Rn = assemble_residual(bvp, Xn);
      double rnn = Rn.lpNorm<Eigen::Infinity>();
      if (rnn < rn || rnn < opts.tol) {
        X = Xn;
        R = Rn;
        rn = rnn;
        break;
      }
      lambda *= 0.5;
      if (bt == 7) throw SolveError("solve: line search failed", rn);
    }
  }
  if (rn > opts.tol)
    throw SolveError("solve: no convergence after max_iter, residual " +
                         std::to_string(rn),
                     rn);
  if (X.norm() < opts.delta_min_factor * guess_norm)
    throw TrivialSolutionError("solve: converged to the trivial solution");
  HomoclinicOrbit orb;
  orb.nodes = bvp.nodes;
  orb.X = X;
  orb.params = bvp.sys.params;
  orb.residual_inf = rn;
  orb.boundary_residual = R.segment(0, 4);
  orb.measures = orbit_measures(bvp, X);
  orb.dim = bvp.sys.dim;
  orb.newton_iters = it;
  return orb;
}

std::vector<std::pair<double, Vec>> full_orbit(const HomoclinicBVP& bvp,
                                               const HomoclinicOrbit& orbit) {
  const int d = orbit.dim, N = (int)orbit.nodes.size() - 1;
  std::vector<std::pair<double, Vec>> out;
  out.reserve(2 * N + 1);
  for (int i = 0; i <= N; ++i) out.emplace_back(orbit.nodes[i], orbit.state(i));
  for (int i = N - 1; i >= 0; --i)
    out.emplace_back(-orbit.nodes[i], bvp.sys.R * Vec(orbit.state(i)));
  return out;
}

void write_orbit_csv(const std::string& path, const HomoclinicBVP& bvp,
                     const HomoclinicOrbit& orbit, const std::string& config_comment) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  if (!config_comment.empty()) f << "# " << config_comment << "\n";
  f << "t,x1,x2,x3,x4\n";
  char buf[256];
  for (const auto& [t, x] : full_orbit(bvp, orbit)) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g\n", t, x[0], x[1],
                  x[2], x[3]);
    f << buf;
  }
}

}  // namespace revhom
