#include "revhom/experiments.hpp"

#include <cmath>

namespace revhom {

HomoclinicOrbit orbit_from_state(HomoclinicBVP& bvp, const Vec& X) {
  HomoclinicOrbit orb;
  orb.nodes = bvp.nodes;
  orb.X = X;
  orb.params = bvp.sys.params;
  Vec R = assemble_residual(bvp, X);
  orb.residual_inf = R.lpNorm<Eigen::Infinity>();
  orb.boundary_residual = R.segment(0, 4);
  orb.measures = orbit_measures(bvp, X);
  orb.dim = bvp.sys.dim;
  return orb;
}

namespace {

duffing::ExampleParams resonant_params(double s, int ell, double beta3) {
  duffing::ExampleParams p;
  p.s = s;
  p.ell = ell;
  p.beta1 = duffing::resonance_beta1(s, ell);
  p.beta2 = 0.0;
  p.beta3 = beta3;
  return p;
}

HomoclinicOrbit solve_planar(HomoclinicBVP& bvp) {
  Vec guess = sample_guess(bvp, [](double t) { return duffing::homoclinic_exact(t); });
  return solve(bvp, guess);
}

Vec amplitude_direction(const HomoclinicBVP& bvp, double s, int ell) {
  return sample_guess(bvp, [s, ell](double t) {
    auto [x2, x4] = duffing::bounded_xi2(t, s, ell);
    Vec v = Vec::Zero(4);
    v[1] = x2;
    v[3] = x4;
    return v;
  });
}

}  // namespace

FoldExperiment run_fold_experiment(double s, int ell, double beta3, int N, double T,
                                   int leg_steps) {
  FoldExperiment ex;
  duffing::ExampleParams p = resonant_params(s, ell, beta3);
  ex.report = example_report(p, Mode::saddle_node);

  HomoclinicBVP bvp = make_bvp(duffing::make_system(p), T, N);
  HomoclinicOrbit orbit0 = solve_planar(bvp);
  Vec dir = amplitude_direction(bvp, s, ell);

  // leg 1: walk down one amplitude side away from the fold at beta2 = 0;
  // small ds0 so the quadratic neighbourhood of the fold is well sampled
  ContinuationOptions o1;
  o1.initial_direction = -dir;
  o1.max_steps = leg_steps;
  o1.ds0 = 1e-3;
  o1.ds_max = 2e-2;
  o1.param_min = -0.3;
  o1.param_max = 0.3;
  Branch leg1 = continue_branch(bvp, orbit0, "beta2", o1);
  if (leg1.points.size() < 3)
    throw std::runtime_error("fold experiment: first leg failed: " + leg1.termination);

  // leg 2: from the far end back through the fold to the other side
  set_param(bvp, "beta2", leg1.end_param);
  HomoclinicOrbit end_orbit = orbit_from_state(bvp, leg1.end_X);
  ex.profile = full_orbit(bvp, end_orbit);
  ContinuationOptions o2 = o1;
  o2.initial_direction = dir;
  o2.max_steps = 2 * leg_steps + 6;
  // leg 1 may overshoot its window by one accepted step; keep its endpoint
  // strictly inside leg 2's window
  o2.param_min = -0.4;
  o2.param_max = 0.4;
  ex.branch = continue_branch(bvp, end_orbit, "beta2", o2);

  // the branch can carry a genuine secondary fold further out; verify the one
  // nearest the predicted location
  int fold_idx = -1;
  for (int i = 0; i < (int)ex.branch.specials.size(); ++i)
    if (ex.branch.specials[i].type == "FOLD" &&
        (fold_idx < 0 || std::abs(ex.branch.specials[i].param) <
                             std::abs(ex.branch.specials[fold_idx].param)))
      fold_idx = i;
  if (fold_idx >= 0) {
    // legs starting at the fold with small steps carry the finest
    // small-amplitude data; pool both amplitude signs for the local fit
    set_param(bvp, "beta2", 0.0);
    ContinuationOptions of = o1;
    of.initial_direction = dir;
    of.max_steps = 10;
    of.ds_max = 4e-3;
    Branch fine_up = continue_branch(bvp, orbit0, "beta2", of);
    Branch probe = ex.branch;
    probe.points.insert(probe.points.end(), leg1.points.begin(), leg1.points.end());
    probe.points.insert(probe.points.end(), fine_up.points.begin(),
                        fine_up.points.end());
    ex.consistency = verify_against_melnikov(
        probe, fold_idx, 0.0, ex.report.a2->value * ex.report.b2->value, 1e-4);
  }
  return ex;
}

TranscriticalExperiment run_transcritical_experiment(double s, int ell, double beta3,
                                                     int N, double T) {
  TranscriticalExperiment ex;
  duffing::ExampleParams p = resonant_params(s, ell, beta3);
  const double res = p.beta1;
  ex.report = example_report(p, Mode::transcritical);

  p.beta1 = res - 0.25;
  HomoclinicBVP bvp = make_bvp(duffing::make_system(p), T, N);
  HomoclinicOrbit orbit0 = solve_planar(bvp);

  ContinuationOptions o;
  o.initial_sign = +1;
  o.max_steps = 40;
  o.ds0 = 2e-2;
  o.param_min = res - 0.3;
  o.param_max = res + 0.25;
  ex.trivial_branch = continue_branch(bvp, orbit0, "beta1", o);

  int bp_idx = -1;
  for (int i = 0; i < (int)ex.trivial_branch.specials.size(); ++i)
    if (ex.trivial_branch.specials[i].type == "BP") bp_idx = i;
  if (bp_idx < 0)
    throw std::runtime_error("transcritical experiment: no branch point found");
  ex.bp_param = ex.trivial_branch.specials[bp_idx].param;

  // the crossing branch is shallow in amplitude, so a small state offset
  // already moves beta1 a lot; start close and walk back through the BP
  HomoclinicOrbit crossing = switch_branch(bvp, ex.trivial_branch, bp_idx, 5e-3);
  ContinuationOptions oc;
  oc.initial_sign = crossing.params.at("beta1") > ex.bp_param ? -1 : +1;
  oc.max_steps = 40;
  oc.ds0 = 5e-3;
  oc.ds_max = 3e-2;
  oc.param_min = res - 0.25;
  oc.param_max = res + 0.25;
  ex.crossing_branch = continue_branch(bvp, crossing, "beta1", oc);

  // linear fit of x2(0) against beta1 near the crossing
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& pt : ex.crossing_branch.points) {
    if (std::abs(pt.param - ex.bp_param) > 0.1) continue;
    sx += pt.param;
    sy += pt.measures.x2_at_0;
    sxx += pt.param * pt.param;
    sxy += pt.param * pt.measures.x2_at_0;
    ++n;
  }
  if (n >= 3) ex.crossing_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return ex;
}

PitchforkExperiment run_pitchfork_experiment(double s, int ell, int N, double T,
                                             int pair_steps) {
  PitchforkExperiment ex;
  duffing::ExampleParams p = resonant_params(s, ell, 0.0);
  const double res = p.beta1;
  ex.report = example_report(p, Mode::pitchfork);

  p.beta1 = res - 0.25;
  HomoclinicBVP bvp = make_bvp(duffing::make_system(p), T, N);
  HomoclinicOrbit orbit0 = solve_planar(bvp);

  ContinuationOptions o;
  o.initial_sign = +1;
  o.max_steps = 40;
  o.ds0 = 2e-2;
  o.param_min = res - 0.3;
  o.param_max = res + 0.25;
  ex.trivial_branch = continue_branch(bvp, orbit0, "beta1", o);

  int bp_idx = -1;
  for (int i = 0; i < (int)ex.trivial_branch.specials.size(); ++i)
    if (ex.trivial_branch.specials[i].type == "BP") bp_idx = i;
  if (bp_idx < 0) throw std::runtime_error("pitchfork experiment: no branch point found");
  ex.bp_param = ex.trivial_branch.specials[bp_idx].param;

  auto run_side = [&](double delta) {
    HomoclinicOrbit sw = switch_branch(bvp, ex.trivial_branch, bp_idx, delta);
    ContinuationOptions oc;
    oc.initial_sign = sw.params.at("beta1") > ex.bp_param ? +1 : -1;
    oc.max_steps = pair_steps;
    oc.ds0 = 5e-3;
    oc.ds_max = 2e-2;
    oc.param_min = res - 0.35;
    oc.param_max = res + 0.35;
    oc.forbid_trivial = true;
    return continue_branch(bvp, sw, "beta1", oc);
  };
  // small enough that the switched orbits start inside the quadratic
  // neighbourhood of the pitchfork
  ex.branch_a = run_side(+5e-3);
  ex.branch_b = run_side(-5e-3);

  // synthesize the consistency record against the BP on the trivial branch
  Branch probe = ex.branch_a;
  probe.specials = ex.trivial_branch.specials;
  ex.consistency = verify_against_melnikov(
      probe, bp_idx, res, ex.report.abar2->value * ex.report.bbar2->value, 1e-3);
  return ex;
}

}  // namespace revhom
