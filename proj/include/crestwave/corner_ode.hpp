#pragma once

// Corner-dynamics parameter ODE: Cartesian and polar forms, the conserved
// quantity R^2 / tan(2 nu), adaptive integration with blow-up detection and
// rate fitting, and the periodic-domain variant.

#include "crestwave/grid.hpp"

#include <string>
#include <vector>

namespace crestwave {

struct CornerState {
  cplx z_star{0, 0};
  double nu_plus = 0.0;
  double nu_minus = 0.0;
  cplx b0{0, 0};
  cplx b1{0, 0};
  double g = 0.0;
  double t = 0.0;
};

struct PolarState {
  double nu = 0.0;        // half-angle, 2 nu = pi + nu_plus - nu_minus
  double beta_hat = 0.0;  // nu_plus + nu_minus
  double R = 0.0;         // |b1|
  double psi = 0.0;       // arg b1
};

// dz*/dt = conj(b0), dnu_pm/dt = Re(i b1 e^{2 i nu_pm}), db0/dt = i g,
// db1/dt = |b1|^2 e^{-i(nu_+ + nu_-)} / cos 2nu. Derivative packed in the
// same struct (g and t fields carry 0 and 1).
CornerState rhs_cartesian(const CornerState& s);

// Periodic-domain variant: same equations with b1 e^{-i z*} in place of b1 in
// the angle equations; the combination c = b1 e^{-i z*} obeys the b1 equation.
CornerState rhs_periodic(const CornerState& s);

PolarState to_polar(const CornerState& s);
PolarState rhs_polar(const PolarState& s);

// R^2 / tan(2 nu), constant along the flow.
double conserved_quantity(const CornerState& s);
double conserved_quantity(const PolarState& s);

struct OdeControls {
  double rtol = 1e-10;
  double R_max = 1e8;
  // Stop when 2 nu leaves (eps_stop, pi/2 - eps_stop). The conserved quantity
  // ties R to tan 2 nu, so this window, not R_max, is what ends a blow-up run;
  // it is kept tight so the rate fit sees several asymptotic decades of R.
  double eps_stop = 1e-8;
  bool periodic = false;    // integrate c = b1 e^{-i z*} instead of b1
};

struct BlowupReport {
  std::string stop_reason;  // "t_end", "R_max", "angle_window"
  bool blew_up = false;
  double T_fit = 0.0;           // least-squares blow-up time (1/R tangent fit,
                                // refined by power-law residual minimization)
  double rate_exponent = 0.0;   // slope of log R vs -log(T_fit - t)
  double rate_spread = 0.0;     // relative spread of R (T_fit - t), final decade
  double terminal_two_nu = 0.0;
  double conserved_drift = 0.0; // max relative drift of R^2/tan 2nu
  int steps = 0;
};

struct OdeRun {
  std::vector<CornerState> trajectory;
  BlowupReport report;
};

OdeRun integrate(const CornerState& s0, double t_end, double dt0,
                 const OdeControls& controls);

struct MonotonicityReport {
  bool cos_phase_monotone = false;  // cos(beta_hat + psi) nondecreasing
  bool nu_monotone = false;
  double max_violation = 0.0;
};

MonotonicityReport monotonicity_probe(const std::vector<CornerState>& traj);

}  // namespace crestwave
