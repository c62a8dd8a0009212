#pragma once

#include <cmath>
#include <functional>

// Small special-function and quadrature layer used by the Melnikov
// coefficient computations and their closed-form oracles.

namespace revhom {

// Gamma via the Lanczos approximation (g=7, 9 terms), reflection for x<1/2.
double gamma_lanczos(double x);

// Integral of sech^q over the real line: sqrt(pi) Gamma(q/2) / Gamma((q+1)/2).
double sech_power_integral(double q);

struct QuadResult {
  double value = 0;
  double err_est = 0;     // |coarse - fine| panel-refinement difference
  double scale = 0;       // integral of |f|, used for degeneracy thresholds
  double window = 0;      // half-width actually used
};

// 5-point Gauss-Legendre on [a,b].
double gauss5(const std::function<double(double)>& f, double a, double b);

// Composite 5-point Gauss-Legendre with n panels.
double gauss5_composite(const std::function<double(double)>& f, double a, double b,
                        int panels);

// Integrate an exponentially decaying smooth integrand over the real line.
// The window is grown until |f| at the edges drops below edge_rel times the
// observed max; throws std::runtime_error("window too small ...") if that
// never happens before max_window.
QuadResult integrate_line(const std::function<double(double)>& f,
                          double panel_width = 0.25, double edge_rel = 1e-15,
                          double max_window = 80.0);

}  // namespace revhom
