#include "revhom/continuation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace revhom {

namespace {

struct ZState {
  Vec X;
  double mu = 0;
};

SpMat bordered_matrix(const SpMat& J, const Vec& Rmu, const Vec& rowX, double rowMu) {
  const int n = (int)J.rows();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(J.nonZeros() + 2 * n + 1);
  for (int k = 0; k < J.outerSize(); ++k)
    for (SpMat::InnerIterator it(J, k); it; ++it)
      trip.emplace_back((int)it.row(), (int)it.col(), it.value());
  for (int i = 0; i < n; ++i)
    if (Rmu[i] != 0.0) trip.emplace_back(i, n, Rmu[i]);
  for (int i = 0; i < n; ++i)
    if (rowX[i] != 0.0) trip.emplace_back(n, i, rowX[i]);
  trip.emplace_back(n, n, rowMu);
  SpMat M(n + 1, n + 1);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

struct Stepper {
  HomoclinicBVP& bvp;
  std::string pname;
  double wx2;  // squared weight on the state part of the arclength metric
  NewtonOptions newton;

  void apply(const ZState& z) { set_param(bvp, pname, z.mu); }

  // tangent through the bordered system with a given normalization row;
  // returns false if the system is numerically singular
  bool tangent(const ZState& z, const Vec& rowX, double rowMu, Vec& tX, double& tMu,
               int* det_sign = nullptr) {
    apply(z);
    SpMat J = assemble_jacobian(bvp, z.X);
    Vec Rmu = residual_param_derivative(bvp, z.X, pname);
    SpMat M = bordered_matrix(J, Rmu, rowX, rowMu);
    Eigen::SparseLU<SpMat> lu(M);
    if (lu.info() != Eigen::Success) return false;
    if (det_sign) *det_sign = lu.signDeterminant() > 0 ? 1 : -1;
    Vec rhs = Vec::Zero(M.rows());
    rhs[M.rows() - 1] = 1.0;
    Vec sol = lu.solve(rhs);
    if (!sol.allFinite()) return false;
    tX = sol.head(sol.size() - 1);
    tMu = sol[sol.size() - 1];
    double norm = std::sqrt(wx2 * tX.squaredNorm() + tMu * tMu);
    if (norm <= 0 || !std::isfinite(norm)) return false;
    tX /= norm;
    tMu /= norm;
    return true;
  }

  // corrector for the extended system anchored at za with tangent (tX,tMu)
  bool correct(const ZState& za, const Vec& tX, double tMu, double ds, ZState& z,
               int& iters, int& det_sign) {
    for (iters = 0; iters < newton.max_iter; ++iters) {
      apply(z);
      Vec R = assemble_residual(bvp, z.X);
      double g = wx2 * tX.dot(z.X - za.X) + tMu * (z.mu - za.mu) - ds;
      double rn = R.lpNorm<Eigen::Infinity>();
      if (rn <= newton.tol && std::abs(g) <= 1e-12 * (1.0 + std::abs(ds))) {
        SpMat J = assemble_jacobian(bvp, z.X);
        Vec Rmu = residual_param_derivative(bvp, z.X, pname);
        SpMat M = bordered_matrix(J, Rmu, wx2 * tX, tMu);
        Eigen::SparseLU<SpMat> lu(M);
        if (lu.info() != Eigen::Success) return false;
        det_sign = lu.signDeterminant() > 0 ? 1 : -1;
        return true;
      }
      SpMat J = assemble_jacobian(bvp, z.X);
      Vec Rmu = residual_param_derivative(bvp, z.X, pname);
      SpMat M = bordered_matrix(J, Rmu, wx2 * tX, tMu);
      Eigen::SparseLU<SpMat> lu(M);
      if (lu.info() != Eigen::Success) return false;
      Vec rhs(M.rows());
      rhs.head(R.size()) = -R;
      rhs[R.size()] = -g;
      Vec dz = lu.solve(rhs);
      if (!dz.allFinite()) return false;
      z.X += dz.head(R.size());
      z.mu += dz[R.size()];
      if (!std::isfinite(z.mu)) return false;
    }
    return false;
  }
};

}  // namespace

Branch continue_branch(HomoclinicBVP& bvp, const HomoclinicOrbit& start,
                       const std::string& param_name, const ContinuationOptions& opts) {
  Branch br;
  br.param_name = param_name;
  br.fixed = start.params;
  br.fixed.erase(param_name);

  Stepper st{bvp, param_name, 1.0 / (double)start.X.size(), opts.newton};
  ZState z{start.X, start.params.at(param_name)};

  // first tangent: normalization row is the caller-supplied direction when
  // given (needed when the start sits at a fold), else the parameter axis
  Vec tX;
  double tMu;
  bool ok;
  if (opts.initial_direction.size() > 0) {
    Vec row = opts.initial_direction / opts.initial_direction.norm();
    ok = st.tangent(z, row, 0.0, tX, tMu);
    if (ok && tX.dot(opts.initial_direction) < 0) {
      tX = -tX;
      tMu = -tMu;
    }
  } else {
    ok = st.tangent(z, Vec::Zero(z.X.size()), 1.0, tX, tMu);
    if (ok && tMu * opts.initial_sign < 0) {
      tX = -tX;
      tMu = -tMu;
    }
  }
  if (!ok) {
    br.termination = "initial tangent failed (singular bordered system)";
    return br;
  }

  double s = 0, ds = opts.ds0;
  int det_prev = 0, fold_prev = 0;
  auto push = [&](const ZState& zz, const std::string& special) {
    st.apply(zz);
    br.points.push_back({zz.mu, orbit_measures(bvp, zz.X), s, special});
  };
  push(z, "");
  if (std::abs(tMu) > 1e-10) fold_prev = tMu > 0 ? 1 : -1;

  for (int step = 0; step < opts.max_steps; ++step) {
    ZState za = z;
    Vec ta = tX;
    double taMu = tMu;
    int da = det_prev, fa = fold_prev;

    ZState trial;
    int iters = 0, det_sign = 0;
    bool accepted = false;
    while (true) {
      trial = {za.X + ds * ta, za.mu + ds * taMu};
      if (st.correct(za, ta, taMu, ds, trial, iters, det_sign)) {
        if (opts.forbid_trivial) {
          st.apply(trial);
          OrbitMeasures m = orbit_measures(bvp, trial.X);
          double amp = std::max(std::abs(m.max_x2), std::abs(m.min_x2));
          if (amp < 1e-9) {
            ds *= 0.5;
            if (ds < opts.ds_min) break;
            continue;
          }
        }
        accepted = true;
        break;
      }
      ds *= 0.5;
      if (ds < opts.ds_min) break;
    }
    if (!accepted) {
      br.termination = "step failure at minimal arclength step";
      break;
    }

    Vec tX_new;
    double tMu_new;
    if (!st.tangent(trial, st.wx2 * ta, taMu, tX_new, tMu_new)) {
      br.termination = "tangent failure";
      break;
    }
    if (st.wx2 * tX_new.dot(ta) + tMu_new * taMu < 0) {
      tX_new = -tX_new;
      tMu_new = -tMu_new;
    }

    s += ds;
    z = trial;
    tX = tX_new;
    tMu = tMu_new;
    int fold_now = std::abs(tMu) > 1e-10 ? (tMu > 0 ? 1 : -1) : 0;
    std::string mark;

    // FOLD: sign change of d mu/ds
    if (fa != 0 && fold_now != 0 && fold_now != fa) {
      double lo = 0, hi = 1, mu_lo = za.mu, mu_hi = z.mu;
      ZState zloc = z;
      for (int it = 0; it < 60 && std::abs(mu_hi - mu_lo) > 1e-9; ++it) {
        double mid = 0.5 * (lo + hi);
        ZState t2{za.X + mid * ds * ta, za.mu + mid * ds * taMu};
        int dummy, dsg;
        if (!st.correct(za, ta, taMu, mid * ds, t2, dummy, dsg)) break;
        Vec tx2;
        double tmu2;
        if (!st.tangent(t2, st.wx2 * ta, taMu, tx2, tmu2)) break;
        if (st.wx2 * tx2.dot(ta) + tmu2 * taMu < 0) tmu2 = -tmu2;
        int f2 = tmu2 > 0 ? 1 : -1;
        if (f2 == fa) {
          lo = mid;
          mu_lo = t2.mu;
        } else {
          hi = mid;
          mu_hi = t2.mu;
        }
        zloc = t2;
      }
      SpecialPoint sp;
      sp.type = "FOLD";
      sp.param = zloc.mu;
      sp.localization_residual = std::abs(mu_hi - mu_lo);
      sp.arclength = s;
      sp.X = zloc.X;
      sp.tangent = Vec(ta.size() + 1);
      sp.tangent.head(ta.size()) = ta;
      sp.tangent[ta.size()] = taMu;
      br.specials.push_back(sp);
      mark = "FOLD";
    }

    // BRANCH POINT: sign change of the bordered determinant
    if (da != 0 && det_sign != 0 && det_sign != da) {
      double lo = 0, hi = 1, mu_lo = za.mu, mu_hi = z.mu;
      ZState zloc = z;
      for (int it = 0; it < 60 && std::abs(mu_hi - mu_lo) > 1e-9; ++it) {
        double mid = 0.5 * (lo + hi);
        ZState t2{za.X + mid * ds * ta, za.mu + mid * ds * taMu};
        int dummy, dsg = 0;
        if (!st.correct(za, ta, taMu, mid * ds, t2, dummy, dsg)) break;
        if (dsg == da) {
          lo = mid;
          mu_lo = t2.mu;
        } else {
          hi = mid;
          mu_hi = t2.mu;
        }
        zloc = t2;
      }
      SpecialPoint sp;
      sp.type = "BP";
      sp.param = zloc.mu;
      sp.localization_residual = std::abs(mu_hi - mu_lo);
      sp.arclength = s;
      sp.X = zloc.X;
      sp.tangent = Vec(ta.size() + 1);
      sp.tangent.head(ta.size()) = ta;
      sp.tangent[ta.size()] = taMu;
      br.specials.push_back(sp);
      mark = mark.empty() ? "BP" : mark + "+BP";
    }

    det_prev = det_sign;
    fold_prev = fold_now != 0 ? fold_now : fold_prev;
    push(z, mark);

    if (z.mu < opts.param_min || z.mu > opts.param_max) {
      br.termination = "range";
      break;
    }
    if (iters <= 3)
      ds = std::min(ds * 1.4, opts.ds_max);
    else if (iters > 6)
      ds = std::max(ds * 0.6, opts.ds_min);
  }
  if (br.termination.empty()) br.termination = "steps";
  br.end_X = z.X;
  br.end_param = z.mu;
  st.apply(z);  // leave bvp at the branch end
  return br;
}

HomoclinicOrbit switch_branch(HomoclinicBVP& bvp, const Branch& branch,
                              int special_index, double delta) {
  const SpecialPoint& sp = branch.specials.at(special_index);
  if (sp.type != "BP")
    throw std::invalid_argument("switch_branch: special point is not a BP");
  Stepper st{bvp, branch.param_name, 1.0 / (double)sp.X.size(), NewtonOptions{}};
  ZState z{sp.X, sp.param};
  st.apply(z);

  // approximate null direction of the bordered Jacobian by inverse iteration
  SpMat J = assemble_jacobian(bvp, z.X);
  Vec Rmu = residual_param_derivative(bvp, z.X, branch.param_name);
  int n = (int)J.rows();
  Vec rowX = st.wx2 * sp.tangent.head(n);
  SpMat M = bordered_matrix(J, Rmu, rowX, sp.tangent[n]);
  Eigen::SparseLU<SpMat> lu(M);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("switch_branch: bordered factorization failed");
  Vec nu = Vec::Ones(n + 1).normalized();
  for (int k = 0; k < 5; ++k) {
    nu = lu.solve(nu);
    if (!nu.allFinite()) throw std::runtime_error("switch_branch: inverse iteration failed");
    nu.normalize();
  }
  double nnorm = std::sqrt(st.wx2 * nu.head(n).squaredNorm() + nu[n] * nu[n]);
  Vec nuX = nu.head(n) / nnorm;
  double nuMu = nu[n] / nnorm;

  const OrbitMeasures m0 = orbit_measures(bvp, sp.X);
  for (double d : {delta, delta * 0.5}) {
    ZState trial{z.X + d * nuX, z.mu + d * nuMu};
    int iters, dsg;
    if (!st.correct(z, nuX, nuMu, d, trial, iters, dsg)) continue;
    st.apply(trial);
    OrbitMeasures m = orbit_measures(bvp, trial.X);
    if (std::abs(m.max_x2 - m0.max_x2) + std::abs(m.min_x2 - m0.min_x2) < 1e-9) continue;
    HomoclinicOrbit orb;
    orb.nodes = bvp.nodes;
    orb.X = trial.X;
    orb.params = bvp.sys.params;
    orb.residual_inf = assemble_residual(bvp, trial.X).lpNorm<Eigen::Infinity>();
    orb.boundary_residual = assemble_residual(bvp, trial.X).segment(0, 4);
    orb.measures = m;
    orb.dim = bvp.sys.dim;
    return orb;
  }
  throw std::runtime_error("switch_branch: no convergence off the through-branch");
}

MelnikovConsistency verify_against_melnikov(const Branch& branch, int special_index,
                                            double expected_param, double coef_product,
                                            double location_tol, double amplitude_ref) {
  MelnikovConsistency c;
  const SpecialPoint& sp = branch.specials.at(special_index);
  c.special_param = sp.param;
  c.expected_param = expected_param;
  c.location_ok = std::abs(sp.param - expected_param) <= location_tol;

  // only the neighbourhood of the special point obeys the local normal form;
  // branches can carry secondary folds and crossings further out
  std::vector<double> lx, ly;
  int pos = 0, neg = 0;
  for (const auto& pt : branch.points) {
    double amp = std::abs(pt.measures.x2_at_0 - amplitude_ref);
    double dmu = pt.param - sp.param;
    if (std::abs(dmu) > 0.2) continue;
    if (amp > 1e-3 && amp <= 0.05) (dmu > 0 ? pos : neg)++;
    if (amp >= 8e-4 && amp <= 0.02 && std::abs(dmu) > 1e-12) {
      lx.push_back(std::log(amp));
      ly.push_back(std::log(std::abs(dmu)));
    }
  }
  if (lx.size() >= 3) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
      num += (lx[i] - mx) * (ly[i] - my);
      den += (lx[i] - mx) * (lx[i] - mx);
    }
    if (den > 0) c.fit_exponent = num / den;
  }
  c.one_sided = (pos == 0) != (neg == 0);
  c.side = pos > 0 && neg == 0 ? +1 : (neg > 0 && pos == 0 ? -1 : 0);
  int expected_side = coef_product < 0 ? +1 : -1;
  c.side_consistent = c.side != 0 && c.side == expected_side;
  return c;
}

void write_branch_csv(const std::string& path, const Branch& branch,
                      const std::string& config_comment) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  if (!config_comment.empty()) f << "# " << config_comment << "\n";
  f << "index,param,x2_at_0,max_x2,min_x2,l2_norm,arclength,special\n";
  char buf[320];
  int i = 0;
  for (const auto& p : branch.points) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s\n", i++,
                  p.param, p.measures.x2_at_0, p.measures.max_x2, p.measures.min_x2,
                  p.measures.l2_norm, p.arclength, p.special.c_str());
    f << buf;
  }
}

std::string branch_summary_json(const Branch& branch) {
  nlohmann::ordered_json j;
  j["param"] = branch.param_name;
  j["n_points"] = branch.points.size();
  j["termination"] = branch.termination;
  nlohmann::ordered_json specials = nlohmann::ordered_json::array();
  for (const auto& sp : branch.specials) {
    nlohmann::ordered_json s;
    s["type"] = sp.type;
    s["param"] = sp.param;
    s["localization_residual"] = sp.localization_residual;
    s["arclength"] = sp.arclength;
    specials.push_back(s);
  }
  j["specials"] = specials;
  nlohmann::ordered_json fixed;
  for (const auto& [k, v] : branch.fixed) fixed[k] = v;
  j["fixed"] = fixed;
  return j.dump(2);
}

}  // namespace revhom
