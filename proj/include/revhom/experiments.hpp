#pragma once

#include "revhom/continuation.hpp"
#include "revhom/melnikov.hpp"

// Canned continuation experiments producing the example's bifurcation
// diagrams: fold in beta2, transcritical crossing in beta1 at beta3 != 0,
// pitchfork pair in beta1 at beta3 = 0.  Shared by the CLI's figure
// generation and the acceptance gate.

namespace revhom {

HomoclinicOrbit orbit_from_state(HomoclinicBVP& bvp, const Vec& X);

// Solve the planar orbit at resonance and continue in beta2 through the fold
// (both amplitude signs traversed).
struct FoldExperiment {
  Branch branch;
  MelnikovReport report;
  MelnikovConsistency consistency;
  // (t, state) samples of the largest-amplitude orbit reached, over [-T, T]
  std::vector<std::pair<double, Vec>> profile;
};
FoldExperiment run_fold_experiment(double s, int ell, double beta3, int N = 400,
                                   double T = 20.0, int leg_steps = 28);

struct TranscriticalExperiment {
  Branch trivial_branch;
  Branch crossing_branch;
  MelnikovReport report;
  double bp_param = 0;
  double crossing_slope = 0;  // d(x2(0))/d(beta1) on the crossing branch
};
TranscriticalExperiment run_transcritical_experiment(double s, int ell, double beta3,
                                                     int N = 400, double T = 20.0);

struct PitchforkExperiment {
  Branch trivial_branch;
  Branch branch_a, branch_b;  // S-conjugate pair from the two switch signs
  MelnikovReport report;
  double bp_param = 0;
  MelnikovConsistency consistency;  // for branch_a against abar2*bbar2
};
PitchforkExperiment run_pitchfork_experiment(double s, int ell, int N = 400,
                                             double T = 20.0, int pair_steps = 24);

}  // namespace revhom
