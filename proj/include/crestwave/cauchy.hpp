#pragma once

// Cauchy singular integral operator on closed curves with one corner, its
// weight-corrected variants, the polynomial-part constants, the smoothing
// combination with the Hilbert transform, the periodic-interface variant,
// and the arc-chord functional.
//
// Orientation convention: bounded fluid domains are traversed clockwise, so
// that constants are fixed points of the operator (C(1) = 1) and the
// combination iC - H is smoothing.

#include "crestwave/grid.hpp"

#include <vector>

namespace crestwave {

using Eigen::MatrixXcd;

struct CurveSamples {
  VectorXcd z;        // curve points z(a_j)
  VectorXcd z_alpha;  // tangent d z / d a
  cplx z_star{0.0, 0.0};
  bool closed = true;
};

// Second parameter derivative, finite differences on the samples.
VectorXcd curve_zalphaalpha(const CurveSamples& c, const WeightedGrid& g);

// Unit tangent z_s = z_alpha / |z_alpha|.
VectorXcd unit_tangent(const CurveSamples& c);

// max over node pairs of |e^{ia} - e^{ia'}| / |z(a) - z(a')|, diagonal 1/|z_alpha|.
double arc_chord(const CurveSamples& c, const WeightedGrid& g);

// (1/(pi i)) PV int f z_alpha / (z(a) - z(a')) da' on the closed curve.
VectorXcd cauchy_apply(const VectorXcd& f, const CurveSamples& c, const WeightedGrid& g);

// Dense matrix of cauchy_apply (used by the conjugate-function solver).
MatrixXcd cauchy_matrix(const CurveSamples& c, const WeightedGrid& g);

// (z - z*)^{-j} C[ (z - z*)^j f ].
VectorXcd cauchy_corrected(const VectorXcd& f, int j, const CurveSamples& c,
                           const WeightedGrid& g);

// c_j(f) = (1/(pi i)) int f z_alpha / (z - z*)^{j+1} da, j = 0..k-1.
std::vector<cplx> polynomial_constants(const VectorXcd& f, int k, const CurveSamples& c,
                                       const WeightedGrid& g);

// (iC - H) f; smoother than f on corner curves.
VectorXcd cancellation_defect(const VectorXcd& f, const CurveSamples& c,
                              const WeightedGrid& g);

// Periodic-interface operator with kernel (cot((z - z')/2) + i)/(2 pi i).
VectorXcd cauchy_periodic(const VectorXcd& f, const CurveSamples& c, const WeightedGrid& g);

}  // namespace crestwave
