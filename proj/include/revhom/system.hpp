#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace revhom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Params = std::map<std::string, double>;

// A reversible ODE system x' = f(x; mu) with linear involution R satisfying
// R^2 = I and f(Rx; mu) = -R f(x; mu).  Derivative tensors are supplied
// analytically by each system definition; finite-difference fallbacks can be
// attached with attach_fd_tensors (central differences, h ~ eps^(1/3); expect
// roughly half the digits of the analytic forms).
struct ReversibleSystem {
  int dim = 0;
  Params params;
  std::function<Vec(const Vec&, const Params&)> f;
  std::function<Mat(const Vec&, const Params&)> df;
  // bilinear/trilinear actions D^2f(x)(u,v), D^3f(x)(u,v,w)
  std::function<Vec(const Vec&, const Vec&, const Vec&, const Params&)> d2f;
  std::function<Vec(const Vec&, const Vec&, const Vec&, const Vec&, const Params&)> d3f;
  // parameter derivatives for a named parameter
  std::function<Vec(const Vec&, const Params&, const std::string&)> dmu_f;
  std::function<Vec(const Vec&, const Vec&, const Params&, const std::string&)> dmu_df;
  Mat R;
};

struct ReversibilityReport {
  double max_residual = 0;
  bool pass = false;
  bool involution_ok = false;
};

struct SaddleSpectrum {
  std::vector<std::complex<double>> eigenvalues;  // sorted by real part
  Mat unstable_right;  // n columns, right eigenvectors, Re(lambda) > 0
  Mat stable_left;     // n rows, left eigenvectors, Re(lambda) < 0
  std::vector<double> stable_values;    // matching stable_left rows
  std::vector<double> unstable_values;  // matching unstable_right columns
};

// Samples random states in [-1,1]^dim and reports the worst residual of the
// reversibility identity.  Pass threshold: 1e-10 * (1 + |f|).
ReversibilityReport check_reversibility(const ReversibleSystem& sys, int n_samples,
                                        unsigned seed);

// Spectrum of Df(0; mu).  Throws on |Re lambda| < 1e-8 ("non-hyperbolic") and
// on defective/complex saddle spectra ("defective spectrum").  Eigenvectors
// are unit-norm with the first nonzero component positive.
SaddleSpectrum equilibrium_spectrum(const ReversibleSystem& sys, const Params& mu);

// Rows = stable left eigenvectors; annihilates the unstable eigenspace.
Mat build_Ls(const SaddleSpectrum& spec);

// Row maps extracting coordinates on Fix(R) and Fix(-R).
std::pair<Mat, Mat> fix_R_projector(const ReversibleSystem& sys);

// Finite-difference d2f/d3f from df for user systems without analytic tensors.
void attach_fd_tensors(ReversibleSystem& sys);

// Registry: systems are looked up by name ("duffing4d" is built in).
using SystemFactory = std::function<ReversibleSystem(const Params&)>;
void register_system(const std::string& name, SystemFactory make);
ReversibleSystem make_registered_system(const std::string& name, const Params& params);

}  // namespace revhom
