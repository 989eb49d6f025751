#pragma once

// The pressure-gradient field sigma, the mollification correction Xi, the
// right-hand side of the doubly regularized interface evolution, the RK4 time
// stepper with constraint re-projection, and the energy functionals.

#include "crestwave/corner_ode.hpp"
#include "crestwave/interface.hpp"
#include "crestwave/transforms.hpp"

#include <map>
#include <string>

namespace crestwave {

struct PressureFields {
  VectorXd psi_trace;    // -g z2 - |V|^2 / 2
  VectorXd psi_eps;      // eps m^2 Phi_s
  VectorXd sigma;        // DtN(psi + psi_eps) + g z_{1s} + V_s . V_perp
  VectorXd sigma0;       // |b1|^2 |z - z*| tan 2nu
  VectorXd sigma_tilde;  // sigma - sigma0
};

PressureFields compute_sigma(const FullState& state, double eps, const WeightedGrid& g);

// Correction making W_t - z_t D_s W a holomorphic trace again after
// mollification; identically zero (to solver tolerance) at delta = 0.
VectorXd compute_xi(const FullState& state, double eps, double delta, const WeightedGrid& g);

struct StateDeriv {
  CornerState params;  // derivatives of (z*, nu+-, b0, b1) in the packed struct
  VectorXd dTheta;
  VectorXd dlog_mod;
  VectorXcd dW;
  VectorXd theta_t;  // assembled tangent-angle derivative, for diagnostics
  PressureFields pressure;
  VectorXd xi;
};

StateDeriv rhs_epsilon_delta(const FullState& state, double eps, double delta,
                             const WeightedGrid& g);

struct StepControls {
  double c_cfl = 0.5;
  double constraint_tol = 1e-6;  // re-project when defects exceed this
  bool enforce_cfl = true;
};

// Largest stable step for the configured regularization.
double cfl_cap(const FullState& state, double delta, const WeightedGrid& g, double c_cfl);

// Classical RK4 step followed by closure / W-constraint re-projection.
FullState step(const FullState& state, double dt, double eps, double delta,
               const WeightedGrid& g, const StepControls& ctl = {});

struct EnergyReport {
  double E_low = 0.0;
  double E_high = 0.0;
  double E_total = 0.0;
  std::map<std::string, double> components;
  bool finite = true;
};

EnergyReport energy(const FullState& state, double eps, const WeightedGrid& g);

struct Monitors {
  double rt_ratio_min = 0.0;       // min over nodes of sigma / |z - z*|
  double sigma_min_over_m = 0.0;   // min over nodes of sigma / m
  double arc_chord = 0.0;
  double energy_snapshot = 0.0;
};

Monitors monitors(const FullState& state, const WeightedGrid& g);

}  // namespace crestwave
