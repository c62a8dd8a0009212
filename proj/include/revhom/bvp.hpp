#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "revhom/system.hpp"

// Symmetric homoclinic orbits as solutions of a boundary value problem on
// [-T,0]: 3-stage Gauss collocation with projection boundary condition
// L_s x(-T) = 0 and symmetry condition x(0) in Fix(R), solved by damped
// Newton on the sparse collocation system.  The full orbit on [-T,T] is
// recovered via x(t) = R x(-t).

namespace revhom {

using SpMat = Eigen::SparseMatrix<double>;

struct HomoclinicBVP {
  ReversibleSystem sys;
  double T = 20.0;
  std::vector<double> nodes;  // strictly increasing, nodes.front()=-T, back()=0
  Mat Ls;       // stable left eigenvector rows at the current parameters
  Mat Pminus;   // Fix(-R) coordinate rows
  int n_nodes() const { return (int)nodes.size(); }
  int n_intervals() const { return (int)nodes.size() - 1; }
  int n_unknowns() const { return sys.dim * (4 * n_intervals() + 1); }
};

struct OrbitMeasures {
  double x2_at_0 = 0;
  double max_x2 = 0;
  double min_x2 = 0;
  double l2_norm = 0;
};

struct HomoclinicOrbit {
  std::vector<double> nodes;
  Vec X;  // node and stage states, collocation layout
  Params params;
  double residual_inf = 0;
  Vec boundary_residual;
  OrbitMeasures measures;
  int dim = 4;
  int newton_iters = 0;

  Eigen::Map<const Vec> state(int i) const {  // node i
    return Eigen::Map<const Vec>(X.data() + (size_t)i * 4 * dim, dim);
  }
};

struct SolveError : std::runtime_error {
  double last_residual;
  SolveError(const std::string& msg, double r)
      : std::runtime_error(msg), last_residual(r) {}
};
struct TrivialSolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NewtonOptions {
  int max_iter = 25;
  double tol = 1e-10;
  double delta_min_factor = 1e-3;  // nontriviality guard vs guess norm
};

// Mesh graded toward the slowly decaying tail; N intervals on [-T, 0].
std::vector<double> make_graded_mesh(double T, int N);

HomoclinicBVP make_bvp(const ReversibleSystem& sys, double T = 20.0, int N = 400);

// Recompute Ls (and Pminus) after a parameter change.
void refresh_boundary(HomoclinicBVP& bvp);
void set_param(HomoclinicBVP& bvp, const std::string& name, double value);

// Initial guess sampling a state-space curve at nodes and collocation points.
Vec sample_guess(const HomoclinicBVP& bvp, const std::function<Vec(double)>& x_of_t);

Vec assemble_residual(const HomoclinicBVP& bvp, const Vec& X);
SpMat assemble_jacobian(const HomoclinicBVP& bvp, const Vec& X);
// Finite-difference derivative of the residual in a named parameter
// (includes the L_s dependence).
Vec residual_param_derivative(HomoclinicBVP& bvp, const Vec& X,
                              const std::string& name);

HomoclinicOrbit solve(HomoclinicBVP& bvp, const Vec& guess,
                      const NewtonOptions& opts = {});

OrbitMeasures orbit_measures(const HomoclinicBVP& bvp, const Vec& X);

// (t, state) samples of the reflected orbit over [-T, T], node resolution.
std::vector<std::pair<double, Vec>> full_orbit(const HomoclinicBVP& bvp,
                                               const HomoclinicOrbit& orbit);

void write_orbit_csv(const std::string& path, const HomoclinicBVP& bvp,
                     const HomoclinicOrbit& orbit, const std::string& config_comment);

// Collocation data shared with the continuation module.
namespace colloc {
extern const double c[3];  // Gauss nodes on (0,1)
extern const double A[3][3];
extern const double b[3];
inline size_t off_node(int i, int dim) { return (size_t)i * 4 * dim; }
inline size_t off_stage(int i, int j, int dim) {
  return (size_t)(i - 1) * 4 * dim + dim + (size_t)j * dim;
}
}  // namespace colloc

}  // namespace revhom
