#pragma once

// State representation of a corner interface: the 5-tuple
// (z*, nu+, nu-, Theta, log|z_alpha|), the velocity triple (b0, b1, W),
// curve reconstruction, derived velocity fields, and constraint defects.
//
// Closed curves are traversed clockwise; the total tangent winding of -2pi
// (minus the corner turn) is carried smoothly inside Theta, so the stored
// Theta of a closed curve ends near -2pi rather than 0.

#include "crestwave/cauchy.hpp"
#include "crestwave/grid.hpp"

namespace crestwave {

struct CornerInterface {
  cplx z_star{0.0, 0.0};
  double nu_plus = 0.0;
  double nu_minus = 0.0;
  VectorXd Theta;
  VectorXd log_mod_zalpha;
};

struct BoundaryVelocity {
  cplx b0{0.0, 0.0};
  cplx b1{0.0, 0.0};
  VectorXcd W;  // D_s U*, vanishes at the corner
};

struct FullState {
  CornerInterface iface;
  BoundaryVelocity vel;
  SpaceParams params;
  double gravity = 0.0;
};

// 2 nu = pi + nu_plus - nu_minus.
double corner_angle(const CornerInterface& iface);

// theta = Theta + nu_plus chi_plus + nu_minus chi_minus.
VectorXd assemble_theta(const CornerInterface& iface, const WeightedGrid& g);

// Theta with the smooth winding ramp removed (the genuinely endpoint-vanishing
// part); *winding receives the removed multiple of 2 pi.
VectorXd strip_winding(const VectorXd& Theta, const WeightedGrid& g, double* winding);

struct Reconstruction {
  CurveSamples curve;
  double closure_defect = 0.0;  // |integral of z_alpha| (absolute)
  double length = 0.0;
};

// Cumulative trapezoid of e^{log|z_alpha| + i theta} from -pi. Throws if the
// relative closure defect exceeds tol_rel.
Reconstruction reconstruct_curve(const CornerInterface& iface, const WeightedGrid& g,
                                 double tol_rel = 1e-3);

struct VelocityFields {
  VectorXcd U_star;  // integral of W z_alpha, vanishing at both endpoints
  VectorXcd V_star;  // b0 + b1 (z - z*) + U*
  VectorXcd DsV;     // b1 + W
  VectorXd Phi_s;    // Re(z_s^2 W)
  VectorXd phi_s;    // Phi_s + Re(b1 z_s^2)
  double w_defect = 0.0;
};

VelocityFields assemble_velocity_trace(const BoundaryVelocity& vel, const CurveSamples& c,
                                       const WeightedGrid& g, double tol = 1e-3);

// Completes a real boundary function to the trace of a holomorphic function,
// V = V1 + i V2 with V2 the harmonic-conjugate trace (mean-zero in ds).
VectorXcd dtn_velocity_closure(const VectorXd& V1, const CurveSamples& c,
                               const WeightedGrid& g);

struct ConstraintDefects {
  double closure = 0.0;    // relative to curve length
  double w_integral = 0.0; // |int W z_s ds|
  double rt_proxy = 0.0;   // |b1|
  double arc_chord = 0.0;
};

ConstraintDefects constraint_defects(const FullState& state, const WeightedGrid& g);

// Convex closed test curve with one corner of interior angle two_nu at z* = 0,
// |z_alpha| adjusted by a two-parameter Newton solve so the curve closes.
CornerInterface make_corner_fixture(double two_nu, double perturb, const WeightedGrid& g);

// One Newton step on (nu_plus, nu_minus) reducing the closure defect.
void project_closure(CornerInterface& iface, const WeightedGrid& g);

// Remove the component of W violating int W z_s ds = 0.
void project_w_constraint(BoundaryVelocity& vel, const CurveSamples& c, const WeightedGrid& g);

}  // namespace crestwave
