#include "crestwave/interface.hpp"

#include "crestwave/corner_laplace.hpp"

#include <cmath>

namespace crestwave {

double corner_angle(const CornerInterface& iface) {
  return kPi + iface.nu_plus - iface.nu_minus;
}

VectorXd assemble_theta(const CornerInterface& iface, const WeightedGrid& g) {
  if (iface.Theta.size() != g.n) throw config_error("assemble_theta: size mismatch");
  VectorXd cp = chi_plus(g);
  VectorXd theta(g.n);
  for (int j = 0; j < g.n; ++j)
    theta[j] = iface.Theta[j] + iface.nu_plus * cp[j] + iface.nu_minus * (1.0 - cp[j]);
  return theta;
}

VectorXd strip_winding(const VectorXd& Theta, const WeightedGrid& g, double* winding) {
  double w = 2.0 * kPi * std::round(Theta[g.n - 1] / (2.0 * kPi));
  if (winding) *winding = w;
  if (w == 0.0) return Theta;
  VectorXd cm = chi_minus(g);
  return Theta - w * cm;
}

Reconstruction reconstruct_curve(const CornerInterface& iface, const WeightedGrid& g,
                                 double tol_rel) {
  VectorXd theta = assemble_theta(iface, g);
  if (iface.log_mod_zalpha.size() != g.n) throw config_error("reconstruct_curve: size mismatch");
  Reconstruction r;
  const int n = g.n;
  r.curve.z.resize(n);
  r.curve.z_alpha.resize(n);
  r.curve.z_star = iface.z_star;
  cplx total(0, 0);
  double len = 0.0;
  VectorXcd za(n);
  for (int j = 0; j < n; ++j) {
    double mod = std::exp(iface.log_mod_zalpha[j]);
    za[j] = mod * std::exp(cplx(0, theta[j]));
    total += za[j] * g.h;
    len += mod * g.h;
    r.curve.z_alpha[j] = za[j];
  }
  cplx acc = iface.z_star + za[0] * (0.5 * g.h);
  r.curve.z[0] = acc;
  for (int j = 1; j < n; ++j) {
    acc += 0.5 * g.h * (za[j - 1] + za[j]);
    r.curve.z[j] = acc;
  }
  r.closure_defect = std::abs(total);
  r.length = len;
  r.curve.closed = r.closure_defect <= tol_rel * len;
  if (!r.curve.closed)
    throw numeric_error("reconstruct_curve: curve not closed (defect " +
                        std::to_string(r.closure_defect) + ")");
  return r;
}

VelocityFields assemble_velocity_trace(const BoundaryVelocity& vel, const CurveSamples& c,
                                       const WeightedGrid& g, double tol) {
  const int n = g.n;
  if (vel.W.size() != n || c.z.size() != n)
    throw config_error("assemble_velocity_trace: size mismatch");
  VelocityFields f;
  VectorXcd integrand(n);
  cplx total(0, 0);
  double scale = 0.0;
  for (int j = 0; j < n; ++j) {
    integrand[j] = vel.W[j] * c.z_alpha[j];
    total += integrand[j] * g.h;
    scale = std::max(scale, std::abs(integrand[j]));
  }
  f.w_defect = std::abs(total);
  if (f.w_defect > tol * (1.0 + scale) * 2.0 * kPi)
    throw numeric_error("assemble_velocity_trace: int W z_s ds constraint violated");
  f.U_star.resize(n);
  cplx acc = integrand[0] * (0.5 * g.h);
  f.U_star[0] = acc;
  for (int j = 1; j < n; ++j) {
    acc += 0.5 * g.h * (integrand[j - 1] + integrand[j]);
    f.U_star[j] = acc;
  }
  f.V_star.resize(n);
  f.DsV.resize(n);
  f.Phi_s.resize(n);
  f.phi_s.resize(n);
  VectorXcd zs = unit_tangent(c);
  for (int j = 0; j < n; ++j) {
    f.V_star[j] = vel.b0 + vel.b1 * (c.z[j] - c.z_star) + f.U_star[j];
    f.DsV[j] = vel.b1 + vel.W[j];
    cplx zs2 = zs[j] * zs[j];
    f.Phi_s[j] = (zs2 * vel.W[j]).real();
    f.phi_s[j] = f.Phi_s[j] + (vel.b1 * zs2).real();
  }
  return f;
}

VectorXcd dtn_velocity_closure(const VectorXd& V1, const CurveSamples& c,
                               const WeightedGrid& g) {
  DtnSolver solver(c, g);
  VectorXd V2 = solver.conjugate(V1);
  // fix the additive constant: zero mean in arclength
  double num = 0.0, den = 0.0;
  for (int j = 0; j < g.n; ++j) {
    double ds = std::abs(c.z_alpha[j]) * g.h;
    num += V2[j] * ds;
    den += ds;
  }
  V2.array() -= num / den;
  VectorXcd out(g.n);
  for (int j = 0; j < g.n; ++j) out[j] = cplx(V1[j], V2[j]);
  return out;
}

ConstraintDefects constraint_defects(const FullState& state, const WeightedGrid& g) {
  ConstraintDefects d;
  Reconstruction r = reconstruct_curve(state.iface, g, 1e30);
  d.closure = r.closure_defect / r.length;
  cplx total(0, 0);
  for (int j = 0; j < g.n; ++j) total += state.vel.W[j] * r.curve.z_alpha[j] * g.h;
  d.w_integral = std::abs(total);
  d.rt_proxy = std::abs(state.vel.b1);
  d.arc_chord = arc_chord(r.curve, g);
  return d;
}

namespace {

// smooth ramp S: 0 at -pi, 1 at +pi, flat to 8th order at both endpoints;
// S' proportional to cos^8(a/2), with closed-form antiderivative
double winding_ramp(double a) {
  double W = (35.0 * a + 56.0 * std::sin(a) + 14.0 * std::sin(2.0 * a) +
              (8.0 / 3.0) * std::sin(3.0 * a) + 0.25 * std::sin(4.0 * a)) /
             8.0;
  double Wlo = -35.0 * kPi / 8.0;
  return (W - Wlo) / (35.0 * kPi / 4.0);
}

}  // namespace

CornerInterface make_corner_fixture(double two_nu, double perturb, const WeightedGrid& g) {
  if (!(two_nu > 0.0 && two_nu < 0.5 * kPi))
    throw config_error("make_corner_fixture: two_nu outside (0, pi/2)");
  const int n = g.n;
  CornerInterface iface;
  iface.z_star = cplx(0, 0);
  iface.nu_plus = 0.5 * (two_nu - kPi);
  iface.nu_minus = 0.5 * (kPi - two_nu);
  VectorXd theta(n), B1(n), B2(n);
  for (int j = 0; j < n; ++j) {
    double a = g.nodes[j];
    double mh = g.weights_m[j] / (kPi * kPi);
    theta[j] = iface.nu_plus - (kPi + two_nu) * winding_ramp(a) +
               perturb * std::sin(a) * mh * mh;
    B1[j] = mh * mh * mh * std::cos(a);
    B2[j] = mh * mh * mh * std::sin(a);
  }
  // close the curve: Newton on the two log|z_alpha| bump amplitudes
  double c1 = 0.0, c2 = 0.0;
  auto closure = [&](double u1, double u2) {
    cplx F(0, 0);
    for (int j = 0; j < n; ++j)
      F += std::exp(cplx(u1 * B1[j] + u2 * B2[j], theta[j])) * g.h;
    return F;
  };
  cplx F = closure(c1, c2);
  for (int it = 0; it < 80 && std::abs(F) > 1e-13; ++it) {
    cplx J1(0, 0), J2(0, 0);
    for (int j = 0; j < n; ++j) {
      cplx e = std::exp(cplx(c1 * B1[j] + c2 * B2[j], theta[j])) * g.h;
      J1 += B1[j] * e;
      J2 += B2[j] * e;
    }
    Eigen::Matrix2d J;
    J << J1.real(), J2.real(), J1.imag(), J2.imag();
    Eigen::Vector2d rhs(F.real(), F.imag());
    Eigen::Vector2d step = J.fullPivLu().solve(rhs);
    double damp = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      cplx Fn = closure(c1 - damp * step[0], c2 - damp * step[1]);
      if (std::abs(Fn) < std::abs(F)) {
        c1 -= damp * step[0];
        c2 -= damp * step[1];
        F = Fn;
        break;
      }
      damp *= 0.5;
      if (ls == 39) throw numeric_error("make_corner_fixture: closure Newton stalled");
    }
  }
  if (std::abs(F) > 1e-12) throw numeric_error("make_corner_fixture: closure Newton failed");
  iface.log_mod_zalpha.resize(n);
  for (int j = 0; j < n; ++j) iface.log_mod_zalpha[j] = c1 * B1[j] + c2 * B2[j];
  VectorXd cp = chi_plus(g);
  iface.Theta.resize(n);
  for (int j = 0; j < n; ++j)
    iface.Theta[j] = theta[j] - iface.nu_plus * cp[j] - iface.nu_minus * (1.0 - cp[j]);
  return iface;
}

void project_closure(CornerInterface& iface, const WeightedGrid& g) {
  const int n = g.n;
  VectorXd cp = chi_plus(g);
  auto closure = [&](double np, double nm) {
    cplx F(0, 0);
    for (int j = 0; j < n; ++j) {
      double th = iface.Theta[j] + np * cp[j] + nm * (1.0 - cp[j]);
      F += std::exp(cplx(iface.log_mod_zalpha[j], th)) * g.h;
    }
    return F;
  };
  cplx F = closure(iface.nu_plus, iface.nu_minus);
  cplx J1(0, 0), J2(0, 0);
  for (int j = 0; j < n; ++j) {
    double th = iface.Theta[j] + iface.nu_plus * cp[j] + iface.nu_minus * (1.0 - cp[j]);
    cplx e = cplx(0, 1) * std::exp(cplx(iface.log_mod_zalpha[j], th)) * g.h;
    J1 += cp[j] * e;
    J2 += (1.0 - cp[j]) * e;
  }
  Eigen::Matrix2d J;
  J << J1.real(), J2.real(), J1.imag(), J2.imag();
  Eigen::Vector2d step = J.fullPivLu().solve(Eigen::Vector2d(F.real(), F.imag()));
  iface.nu_plus -= step[0];
  iface.nu_minus -= step[1];
}

void project_w_constraint(BoundaryVelocity& vel, const CurveSamples& c,
                          const WeightedGrid& g) {
  cplx defect(0, 0);
  double len = 0.0;
  for (int j = 0; j < g.n; ++j) {
    defect += vel.W[j] * c.z_alpha[j] * g.h;
    len += std::abs(c.z_alpha[j]) * g.h;
  }
  cplx mu = defect / len;
  VectorXcd zs = unit_tangent(c);
  for (int j = 0; j < g.n; ++j) vel.W[j] -= mu * std::conj(zs[j]);
}

}  // namespace crestwave
