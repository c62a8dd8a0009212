#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "revhom/example_duffing.hpp"

// Monodromy matrices of the example's planar variational blocks, computed by
// analytic continuation of the variational equation around the singular point
// of the chart z = e^{-t} (Sigma_+) or z = e^{t} (Sigma_-).  The loop is run
// in complex time along t(theta) = t1 -/+ i theta, theta in [0, 2 pi], which
// is the z-chart circle |z| = eps without the coordinate-change bookkeeping.
// Both matrices are expressed in the fundamental basis anchored at t = 0
// (columns (1,0) and (0,1)), so they are directly comparable.

namespace revhom {

using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;

struct ChartSpec {
  int chart = +1;          // +1: Sigma_+ (t -> +inf), -1: Sigma_- (t -> -inf)
  double lambda_abs = 1.0; // chart rate |lambda|; 1 for the example's orbit
  double eps = 1e-4;       // circle radius in z
  double basepoint() const { return -std::log(eps) / lambda_abs * chart; }
};

struct MonodromyResult {
  ChartSpec chart;
  int block = 1;
  Mat2c M;  // in the t=0 basis
  double det_residual = 0;
  Vec2c eigenvalues;
  Mat2c eigenvectors;  // columns; for a defective M both columns hold the
                       // single invariant direction
};

// VE coefficient matrix in the z-chart: d xi/dz = A(z) xi.  Throws if z is on
// the unit circle (coefficient pole locus) or at 0.
Mat2c chart_coefficients(int block, const duffing::ExampleParams& p,
                         const ChartSpec& chart, std::complex<double> z);

MonodromyResult monodromy_matrix(int block, const duffing::ExampleParams& p,
                                 const ChartSpec& chart, double tol = 1e-12);

struct TriangDiagnosis {
  double min_angle = 0;        // smallest angle between eigenline pairs
  bool common_line = false;    // min_angle <= 1e-5
  double fixed_residual = 0;   // || M v_b - lambda v_b || for the bounded direction
  bool bounded_fixed = false;
};

TriangDiagnosis check_triangularizable(const MonodromyResult& m_plus,
                                       const MonodromyResult& m_minus,
                                       const Vec2c& bounded_direction);

std::string monodromy_json(const MonodromyResult& r);

}  // namespace revhom
