#pragma once

// Discretization of the interval (-pi, pi) with the degenerate endpoint weight
// m(a) = (pi+a)(pi-a), the two weighted Sobolev scales built on it, and the
// decomposition of a field into a smooth endpoint-vanishing part plus one-sided
// jump polynomials.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace crestwave {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Thrown on structurally invalid inputs (sizes, parameter windows).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Thrown when a numerical procedure fails (non-finite data, divergence).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightedGrid {
  int n = 0;
  double h = 0.0;       // 2*pi/n
  VectorXd nodes;       // midpoint-offset: a_j = -pi + (j+1/2)h, never +-pi
  VectorXd weights_m;   // m(a_j)
  VectorXd quad;        // uniform quadrature weights, all equal to h
};

WeightedGrid make_grid(int n);

struct SpaceParams {
  int k = 2;
  double beta = 0.0;
  double gamma = 0.0;
  double lambda_half = 0.0;   // beta + k - 1 + 1/4
  double lambda_gamma = 0.5;  // 1/2 - gamma
};

// gamma defaults to beta + k - 1 (the natural exponent of the L-scale fields).
SpaceParams make_space_params(int k, double beta);
SpaceParams make_space_params(int k, double beta, double gamma);

struct JumpDecomposition {
  VectorXd regular;
  std::vector<double> coeffs_plus;   // one-sided coefficients at -pi, in (a+pi)^i
  std::vector<double> coeffs_minus;  // one-sided coefficients at +pi, in (a-pi)^i
  VectorXd cutoff;                   // chi_plus; chi_minus = 1 - cutoff
};

// Smooth partition: chi_plus = 1 near -pi, 0 near +pi.
VectorXd chi_plus(const WeightedGrid& g);
VectorXd chi_minus(const WeightedGrid& g);
double chi_plus_at(double alpha);

// Spectral derivative of the periodic extension.
VectorXd derivative_periodic(const VectorXd& f, const WeightedGrid& g);
VectorXcd derivative_periodic(const VectorXcd& f, const WeightedGrid& g);

// 6th-order finite differences, one-sided near the endpoints; for fields that
// are smooth on the open interval but not periodic.
VectorXd derivative_onesided(const VectorXd& f, const WeightedGrid& g);
VectorXcd derivative_onesided(const VectorXcd& f, const WeightedGrid& g);

// Same stencils on an arbitrary uniformly spaced table.
VectorXd fd_derivative_uniform(const VectorXd& f, double h);

// Dense matrix form of derivative_onesided (banded 7-point stencils).
MatrixXd fd_derivative_matrix(int n, double h);

double weighted_l2_norm(const VectorXd& f, double gamma, const WeightedGrid& g);
double weighted_l2_norm(const VectorXcd& f, double gamma, const WeightedGrid& g);

// L-scale: sum_j ||d^j f||_{2, gamma+j-k}; H-scale: every derivative at the
// fixed exponent gamma.
double sobolev_norm_L(const VectorXd& f, const SpaceParams& p, const WeightedGrid& g);
double sobolev_norm_H(const VectorXd& f, const SpaceParams& p, const WeightedGrid& g);
double sobolev_norm_L(const VectorXcd& f, const SpaceParams& p, const WeightedGrid& g);
double sobolev_norm_H(const VectorXcd& f, const SpaceParams& p, const WeightedGrid& g);

// Largest polynomial degree l < k with gamma + l - k < -1/2; -1 if none.
int jump_degree(const SpaceParams& p);

JumpDecomposition decompose_jump(const VectorXd& f, const SpaceParams& p,
                                 const WeightedGrid& g);

VectorXd reconstruct_jump(const JumpDecomposition& d, const WeightedGrid& g);

// Deterministic random field helpers (seeded, platform-independent normals).
struct FieldRng {
  explicit FieldRng(std::uint64_t seed);
  double uniform();          // in [0,1)
  double normal();           // Box-Muller, deterministic
  std::uint64_t raw();

 private:
  std::uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Band-limited real field sum_{1<=k<=bw} (a_k cos + b_k sin)(k a)/k^decay.
VectorXd random_band_limited(FieldRng& rng, int bandwidth, double decay,
                             const WeightedGrid& g);

}  // namespace crestwave
