#include "crestwave/cauchy.hpp"

#include "crestwave/transforms.hpp"

#include <cmath>

namespace crestwave {

namespace {

void check_curve(const CurveSamples& c, const WeightedGrid& g) {
  if (c.z.size() != g.n || c.z_alpha.size() != g.n)
    throw config_error("curve: size mismatch with grid");
  for (int j = 0; j < g.n; ++j)
    if (std::abs(c.z_alpha[j]) <= 0.0) throw numeric_error("curve: vanishing tangent");
}

}  // namespace

VectorXcd curve_zalphaalpha(const CurveSamples& c, const WeightedGrid& g) {
  return derivative_onesided(c.z_alpha, g);
}

VectorXcd unit_tangent(const CurveSamples& c) {
  VectorXcd t(c.z_alpha.size());
  for (int j = 0; j < c.z_alpha.size(); ++j) t[j] = c.z_alpha[j] / std::abs(c.z_alpha[j]);
  return t;
}

double arc_chord(const CurveSamples& c, const WeightedGrid& g) {
  check_curve(c, g);
  const int n = g.n;
  double diam = 0.0;
  for (int j = 0; j < n; ++j) diam = std::max(diam, std::abs(c.z[j] - c.z[0]));
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    best = std::max(best, 1.0 / std::abs(c.z_alpha[j]));
    for (int jp = j + 1; jp < n; ++jp) {
      double den = std::abs(c.z[j] - c.z[jp]);
      if (den < 1e-12 * diam) throw numeric_error("arc_chord: curve self-intersects");
      double num = std::abs(std::exp(cplx(0, g.nodes[j])) - std::exp(cplx(0, g.nodes[jp])));
      best = std::max(best, num / den);
    }
  }
  return best;
}

VectorXcd cauchy_apply(const VectorXcd& f, const CurveSamples& c, const WeightedGrid& g) {
  check_curve(c, g);
  if (f.size() != g.n) throw config_error("cauchy_apply: size mismatch");
  if (!f.allFinite()) throw numeric_error("cauchy_apply: non-finite field");
  const int n = g.n;
  VectorXcd zaa = curve_zalphaalpha(c, g);
  VectorXcd fp = derivative_onesided(f, g);
  const cplx pref = cplx(0, -1) * (g.h / kPi);  // h/(pi i)
  VectorXcd out(n);
  for (int j = 0; j < n; ++j) {
    cplx s(0, 0);
    for (int jp = 0; jp < n; ++jp) {
      if (jp == j) continue;
      s += f[jp] * c.z_alpha[jp] / (c.z[j] - c.z[jp]);
    }
    s -= fp[j] + f[j] * zaa[j] / (2.0 * c.z_alpha[j]);
    out[j] = pref * s;
  }
  return out;
}

MatrixXcd cauchy_matrix(const CurveSamples& c, const WeightedGrid& g) {
  check_curve(c, g);
  const int n = g.n;
  VectorXcd zaa = curve_zalphaalpha(c, g);
  MatrixXd d = fd_derivative_matrix(n, g.h);
  const cplx pref = cplx(0, -1) * (g.h / kPi);
  MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int jp = 0; jp < n; ++jp) {
      cplx v = (jp == j) ? cplx(0, 0) : c.z_alpha[jp] / (c.z[j] - c.z[jp]);
      v -= d(j, jp);
      if (jp == j) v -= zaa[j] / (2.0 * c.z_alpha[j]);
      m(j, jp) = pref * v;
    }
  }
  return m;
}

VectorXcd cauchy_corrected(const VectorXcd& f, int j, const CurveSamples& c,
                           const WeightedGrid& g) {
  check_curve(c, g);
  const int n = g.n;
  VectorXcd w(n), lifted(n);
  for (int i = 0; i < n; ++i) {
    w[i] = c.z[i] - c.z_star;
    lifted[i] = f[i] * std::pow(w[i], double(j));
  }
  VectorXcd cv = cauchy_apply(lifted, c, g);
  VectorXcd out(n);
  for (int i = 0; i < n; ++i) out[i] = cv[i] * std::pow(w[i], -double(j));
  return out;
}

std::vector<cplx> polynomial_constants(const VectorXcd& f, int k, const CurveSamples& c,
                                       const WeightedGrid& g) {
  check_curve(c, g);
  if (k < 1) throw config_error("polynomial_constants: k must be >= 1");
  const int n = g.n;
  std::vector<cplx> out(k);
  const cplx pref = cplx(0, -1) * (g.h / kPi);
  for (int j = 0; j < k; ++j) {
    cplx s(0, 0);
    for (int i = 0; i < n; ++i)
      s += f[i] * c.z_alpha[i] / std::pow(c.z[i] - c.z_star, double(j + 1));
    out[j] = pref * s;
    if (!std::isfinite(out[j].real()) || !std::isfinite(out[j].imag()))
      throw numeric_error("polynomial_constants: non-finite result");
  }
  return out;
}

VectorXcd cancellation_defect(const VectorXcd& f, const CurveSamples& c,
                              const WeightedGrid& g) {
  VectorXcd cf = cauchy_apply(f, c, g);
  VectorXcd hf = hilbert(f, g);
  return cplx(0, 1) * cf - hf;
}

VectorXcd cauchy_periodic(const VectorXcd& f, const CurveSamples& c, const WeightedGrid& g) {
  check_curve(c, g);
  if (f.size() != g.n) throw config_error("cauchy_periodic: size mismatch");
  // periodicity proxy: mean of z_alpha must be 1 (z(a + 2 pi) = z(a) + 2 pi)
  cplx mean_za = c.z_alpha.mean();
  if (std::abs(mean_za - 1.0) > 1e-6)
    throw config_error("cauchy_periodic: curve does not satisfy z(a+2pi) = z(a) + 2pi");
  const int n = g.n;
  VectorXcd zaa = curve_zalphaalpha(c, g);
  VectorXcd fp = derivative_onesided(f, g);
  const cplx pref = cplx(0, -0.5) * (g.h / kPi);  // h/(2 pi i)
  VectorXcd out(n);
  for (int j = 0; j < n; ++j) {
    cplx s(0, 0);
    for (int jp = 0; jp < n; ++jp) {
      if (jp == j) continue;
      cplx u = 0.5 * (c.z[j] - c.z[jp]);
      s += f[jp] * c.z_alpha[jp] * (std::cos(u) / std::sin(u) + cplx(0, 1));
    }
    s += -2.0 * fp[j] - f[j] * zaa[j] / c.z_alpha[j] + cplx(0, 1) * f[j] * c.z_alpha[j];
    out[j] = pref * s;
  }
  return out;
}

}  // namespace crestwave
