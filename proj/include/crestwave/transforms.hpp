#pragma once

// Periodic Hilbert transform (spectral and principal-value backends), the
// half-order fractional Laplacian, weighted half-norms, and the variable-step
// mollifier family B_delta, B_delta*, A_delta with its derivative commutator.

#include "crestwave/grid.hpp"

namespace crestwave {

// Spectral backend: multiplier -i sgn(k); H(cos ka) = sin(ka).
VectorXd hilbert(const VectorXd& f, const WeightedGrid& g);
VectorXcd hilbert(const VectorXcd& f, const WeightedGrid& g);

// Alternating-point trapezoid quadrature of the cot((a-a')/2)/(2 pi) kernel.
VectorXd hilbert_pv(const VectorXd& f, const WeightedGrid& g);

// Spectral half-Laplacian: multiplier |k|^{1/2}.
VectorXd half_laplacian(const VectorXd& f, const WeightedGrid& g);

// Interval principal-value backend: c * PV int (f(a)-f(a'))/|a-a'|^{3/2} da'
// with the near-diagonal band integrated analytically from a local Taylor
// expansion. The constant is calibrated once against the spectral backend.
VectorXd half_laplacian_pv(const VectorXd& f, const WeightedGrid& g);
double half_laplacian_constant();

// || Lambda^{1/2}(m^lambda f) ||_{2, gamma-lambda}; requires gamma-lambda in (-1/2,1/2).
double half_norm(const VectorXd& f, double gamma, double lambda, const WeightedGrid& g);

struct MollifierConfig {
  double delta = 0.1;  // delta == 0 means all operators act as the identity
};

double mollifier_eta(double alpha);        // (pi^2 - alpha^2)/(2 pi)
double mollifier_eta_prime(double alpha);  // -alpha/pi
double mollifier_bump(double x);           // normalized C-infinity bump on (-1,1)

VectorXd mollify(const VectorXd& f, const MollifierConfig& cfg, const WeightedGrid& g);
VectorXd mollify_adjoint(const VectorXd& f, const MollifierConfig& cfg, const WeightedGrid& g);
VectorXd smooth(const VectorXd& f, const MollifierConfig& cfg, const WeightedGrid& g);
VectorXcd smooth(const VectorXcd& f, const MollifierConfig& cfg, const WeightedGrid& g);

// K_delta with (B_delta f)' = B_delta(f') + K_delta f.
VectorXd mollifier_derivative_commutator(const VectorXd& f, const MollifierConfig& cfg,
                                         const WeightedGrid& g);

// Local degree-5 Lagrange interpolation of a grid field at an arbitrary point.
double interpolate_quintic(const VectorXd& f, const WeightedGrid& g, double x);

// Gauss-Legendre nodes/weights on (-1,1), computed deterministically.
void gauss_legendre(int n, VectorXd& nodes, VectorXd& weights);

}  // namespace crestwave
