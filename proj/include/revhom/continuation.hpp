#pragma once

#include <optional>
#include <string>
#include <vector>

#include "revhom/bvp.hpp"

// Pseudo-arclength continuation of homoclinic BVP solutions in one parameter
// with fold (sign change of d mu/ds) and branch-point (sign change of the
// bordered-Jacobian determinant) detection, secant/bisection localization and
// branch switching along the approximate null direction.

namespace revhom {

struct BranchRecord {
  double param = 0;
  OrbitMeasures measures;
  double arclength = 0;
  std::string special;  // "", "FOLD", "BP"
};

struct SpecialPoint {
  std::string type;  // FOLD or BP
  double param = 0;
  double localization_residual = 0;  // parameter width of the final bracket
  double arclength = 0;
  Vec X;        // state at the localized point
  Vec tangent;  // (X, mu) tangent used while localizing
};

struct Branch {
  std::string param_name;
  Params fixed;
  std::vector<BranchRecord> points;
  std::vector<SpecialPoint> specials;
  std::string termination;  // "range", "steps", or a failure reason
  Vec end_X;                // state at the last accepted point (restarts)
  double end_param = 0;
};

struct ContinuationOptions {
  double ds0 = 5e-3;
  double ds_min = 1e-5;
  double ds_max = 5e-2;
  int max_steps = 200;
  double param_min = -1e300;
  double param_max = 1e300;
  Vec initial_direction;  // optional state-space direction for the first tangent
  int initial_sign = +1;  // first-step orientation when no direction is given
  bool forbid_trivial = false;  // reject steps collapsing to max|x2| ~ 0
  NewtonOptions newton;
};

Branch continue_branch(HomoclinicBVP& bvp, const HomoclinicOrbit& start,
                       const std::string& param_name, const ContinuationOptions& opts);

// Converged orbit off the through-branch at a localized BP; delta signed.
HomoclinicOrbit switch_branch(HomoclinicBVP& bvp, const Branch& branch,
                              int special_index, double delta);

struct MelnikovConsistency {
  double special_param = 0;
  double expected_param = 0;
  bool location_ok = false;
  double fit_exponent = 0;  // log-log slope of |mu - mu*| vs amplitude
  int side = 0;             // +1 if branch lives at mu > mu*, -1 below, 0 mixed
  bool side_consistent = false;
  bool one_sided = false;
};

// coef_product: the deciding product (a2*b2 for folds, abar2*bbar2 for
// pitchforks); the branch should live on the side sign(mu-mu*) = -sign(product).
MelnikovConsistency verify_against_melnikov(const Branch& branch, int special_index,
                                            double expected_param,
                                            double coef_product,
                                            double location_tol,
                                            double amplitude_ref = 0.0);

void write_branch_csv(const std::string& path, const Branch& branch,
                      const std::string& config_comment);
std::string branch_summary_json(const Branch& branch);

}  // namespace revhom
