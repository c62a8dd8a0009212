#pragma once

#include <functional>
#include <optional>
#include <string>

#include "revhom/example_duffing.hpp"
#include "revhom/special.hpp"
#include "revhom/system.hpp"

// Bifurcation coefficients a2, b2, abar2, bbar2 by quadrature, the example's
// closed-form bbar2, and the classification logic of the bifurcation theorems.
//
// Two bbar2 routes coexist deliberately:
//  - compute_bbar2_quadrature / compute_bbar2_closed: the reference pair with
//    the unit-normalized coupling (forcing -beta1 x1^h xi2^2), which is the
//    normalization the Gamma/P_l/Q_l closed form corresponds to.  They must
//    agree to 1e-6 relative and serve as each other's cross-check.
//  - compute_bbar2_system: the general formula evaluated with the registered
//    system's own derivative tensors; this is what classification and the
//    continuation consistency checks use.

namespace revhom {

struct MelnikovInputs {
  std::function<Vec(double)> orbit;    // t -> x^h(t)
  std::function<Vec(double)> phi2;     // bounded symmetric VE solution
  std::function<Vec(double)> psi_n2;   // bounded adjoint solution
  ReversibleSystem system;
  std::string mu_name;                 // designated bifurcation parameter
  double panel_width = 0.25;
};

struct CoefValue {
  double value = 0;
  double err_est = 0;
  double scale = 0;  // integral of |integrand|; degeneracy reference
};

enum class Classification {
  persistence,
  saddle_node_super,
  saddle_node_sub,
  transcritical,
  pitchfork_super,
  pitchfork_sub,
  degenerate,
};
std::string to_string(Classification c);

struct MelnikovReport {
  std::optional<CoefValue> a2, b2, abar2, bbar2;
  std::optional<double> bbar2_closed, bbar2_quadrature;
  Classification classification = Classification::degenerate;
  std::string mode;
  Params params_echo;
  std::string to_json() const;
};

std::pair<CoefValue, CoefValue> compute_a2_b2(const MelnikovInputs& in);

CoefValue compute_abar2(const MelnikovInputs& in,
                        const std::function<Vec(double)>& xi_mu);

// Example-specialized quadrature evaluation of the closed-form object.
double compute_bbar2_quadrature(const MelnikovInputs& in,
                                const duffing::PlanarFundamentalSet& fundamentals);

double compute_bbar2_closed(double s, int ell);

// General formula with the system's tensors (pitchfork coefficient actually
// governing the registered system's branch directions).
CoefValue compute_bbar2_system(const MelnikovInputs& in,
                               const duffing::PlanarFundamentalSet& fundamentals);

enum class Mode { saddle_node, transcritical, pitchfork };

Classification classify(const std::optional<CoefValue>& a2,
                        const std::optional<CoefValue>& b2,
                        const std::optional<CoefValue>& abar2,
                        const std::optional<CoefValue>& bbar2, Mode mode);

// Convenience: full report for the example at resonance.
MelnikovReport example_report(const duffing::ExampleParams& p, Mode mode);

// Standard inputs for the example: orbit = x^h, phi2 = (0,xi2,0,xi4),
// psi4 = (0,-xi4,0,xi2), mu as given.
MelnikovInputs example_inputs(const duffing::ExampleParams& p,
                              const std::string& mu_name);

}  // namespace revhom
