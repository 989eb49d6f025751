#pragma once

// Dirichlet-to-Neumann machinery: a conjugate-function solver on the full
// curve (harmonic conjugate via the Cauchy operator), the corner-to-strip
// change of variables, the perturbed-Laplacian solver on the truncated strip,
// and the closed-form harmonic extension of quadratic boundary data near the
// corner.

#include "crestwave/cauchy.hpp"
#include "crestwave/grid.hpp"

#include <functional>

namespace crestwave {

// Full-curve Dirichlet-to-Neumann map. The harmonic conjugate trace psi~ of
// the extension of psi solves (I - Re C) psi~ = (Im C) psi; the normal
// derivative is -d/ds psi~ for the clockwise traversal used here.
class DtnSolver {
 public:
  DtnSolver(const CurveSamples& c, const WeightedGrid& g);
  VectorXd conjugate(const VectorXd& psi) const;  // mean-zero conjugate trace
  VectorXd apply(const VectorXd& psi) const;      // normal derivative on the curve
  const CurveSamples& curve() const { return curve_; }

 private:
  CurveSamples curve_;
  WeightedGrid grid_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  MatrixXd B_;
};

// Convenience wrapper with an internal factorization cache keyed by the curve.
VectorXd dtn_apply(const VectorXd& psi, const CurveSamples& c, const WeightedGrid& g);

// Sampled corner-to-strip diffeomorphism: the two boundary arcs as normalized
// angle functions of x = log r, with x-derivatives.
struct DiffeoTables {
  VectorXd x;                      // uniform grid on [-L, x_max]
  VectorXd theta_p, theta_m;       // Theta_pm -> +-1/2 as x -> -inf
  VectorXd dtheta_p, dtheta_m;     // d/dx
  VectorXd alpha_p, alpha_m;       // curve parameter along each arc (empty for wedge)
  double two_nu = 0.0;
  double L = 0.0, x_max = 0.0, hx = 0.0;
  double frame_angle = 0.0;        // bisector direction removed from arg(z - z*)
  cplx z_star{0, 0};

  // clamped local cubic interpolation on the uniform x grid
  void eval(double xq, double& tp, double& tm, double& dtp, double& dtm) const;
  // inverse map: strip point (x, y) to the physical plane
  cplx to_physical(double xq, double y) const;
};

DiffeoTables exact_wedge_tables(double two_nu, double L, double x_max, int mx);

// Resample the two arcs of a corner curve in log-polar coordinates about z*.
DiffeoTables build_diffeo(const CurveSamples& c, const WeightedGrid& g, double L, int mx);

// Coefficient matrix A = I + L of the transplanted Laplacian at (x, y).
void strip_coefficients(const DiffeoTables& t, double xq, double y, double& a11,
                        double& a12, double& a22);

using StripFunc = std::function<double(double)>;
using StripFunc2 = std::function<double(double, double)>;

struct StripSolution {
  VectorXd xs, ys;
  MatrixXd U;  // (mx+1) x (my+1), row i ~ x, column j ~ y
  double residual = 0.0;
};

// Solve -div(A grad U) = rhs with Dirichlet data on y = +-nu and x = x_max,
// homogeneous Neumann at x = -L; conservative second-order finite differences.
StripSolution solve_strip(const DiffeoTables& t, int my, const StripFunc2& rhs,
                          const StripFunc& bottom, const StripFunc& top,
                          const StripFunc& right);

struct StripExtension {
  StripSolution sol;
  VectorXd dn_bottom, dn_top;  // physical normal derivative along the arcs
};

// Harmonic extension with the given boundary traces; pushes the conormal
// derivative back through the diffeomorphism.
StripExtension harmonic_extension_strip(const DiffeoTables& t, int my,
                                        const StripFunc& bottom, const StripFunc& top,
                                        const StripFunc& right);

// Near-corner harmonic extension of a boundary field given on the curve
// parameter grid; traces are pulled through the diffeomorphism and the right
// cap is closed with the flat-strip interpolation of the two traces.
StripExtension harmonic_extension(const VectorXd& psi, const CurveSamples& c,
                                  const WeightedGrid& g, const DiffeoTables& t, int my);

struct QuadraticExtension {
  cplx a_plus{0, 0}, a_minus{0, 0};    // strip-mode coefficients of e^{2x} p(y)
  double slope_plus = 0.0, slope_minus = 0.0;  // (2/sin 4nu)(c_pm cos 4nu - c_mp)
  double lin_plus = 0.0, lin_minus = 0.0;      // -Im(c1 z_s) on each arc
};

// Closed-form leading normal derivative of the harmonic extension of
// Re(c0 + c1 z) + c_pm |z|^2 boundary data on a wedge of half-angle nu.
QuadraticExtension quadratic_data_extension(cplx c0, cplx c1, double c_plus,
                                            double c_minus, double nu);

}  // namespace crestwave
