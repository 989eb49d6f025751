#include "crestwave/evolution.hpp"

#include "crestwave/corner_laplace.hpp"

#include <cmath>

namespace crestwave {

namespace {

// orientation of the normal in V_s . V_perp; fixed so that the pressure
// gradient is positive on admissible states (sigma ~ |b1|^2 |z-z*| tan 2nu)
constexpr double kPerpSign = 1.0;

struct Eval {
  Reconstruction rec;
  VectorXcd zs;
  VelocityFields vf;
  VectorXcd V;  // velocity proper, conjugate of the holomorphic trace
  cplx b1t;
  double two_nu = 0.0;
  double tan2nu = 0.0;
};

Eval evaluate(const FullState& st, const WeightedGrid& g) {
  Eval e;
  e.rec = reconstruct_curve(st.iface, g, 1e-2);
  e.zs = unit_tangent(e.rec.curve);
  e.vf = assemble_velocity_trace(st.vel, e.rec.curve, g, 1e6);
  e.V.resize(g.n);
  for (int j = 0; j < g.n; ++j) e.V[j] = std::conj(e.vf.V_star[j]);
  e.two_nu = corner_angle(st.iface);
  double c2 = std::cos(e.two_nu);
  if (std::abs(c2) < 1e-12) throw numeric_error("evolution: angle degenerate, cos 2nu ~ 0");
  e.b1t = std::norm(st.vel.b1) *
          std::exp(cplx(0, -(st.iface.nu_plus + st.iface.nu_minus))) / c2;
  e.tan2nu = std::tan(e.two_nu);
  return e;
}

VectorXd arc_derivative(const VectorXd& f, const Eval& e, const WeightedGrid& g) {
  VectorXd d = derivative_onesided(f, g);
  for (int j = 0; j < g.n; ++j) d[j] /= std::abs(e.rec.curve.z_alpha[j]);
  return d;
}

VectorXcd arc_derivative(const VectorXcd& f, const Eval& e, const WeightedGrid& g) {
  VectorXcd d = derivative_onesided(f, g);
  for (int j = 0; j < g.n; ++j) d[j] /= std::abs(e.rec.curve.z_alpha[j]);
  return d;
}

VectorXcd a_delta(const VectorXcd& f, double delta, const WeightedGrid& g) {
  if (delta == 0.0) return f;
  MollifierConfig cfg{delta};
  VectorXd re = mollify_adjoint(mollify(f.real(), cfg, g), cfg, g);
  VectorXd im = mollify_adjoint(mollify(f.imag(), cfg, g), cfg, g);
  VectorXcd out(g.n);
  for (int j = 0; j < g.n; ++j) out[j] = cplx(re[j], im[j]);
  return out;
}

PressureFields sigma_impl(const Eval& e, const FullState& st, double eps,
                          const WeightedGrid& g, const DtnSolver& solver) {
  const int n = g.n;
  PressureFields pf;
  pf.psi_trace.resize(n);
  pf.psi_eps.resize(n);
  for (int j = 0; j < n; ++j) {
    pf.psi_trace[j] = -st.gravity * e.rec.curve.z[j].imag() - 0.5 * std::norm(e.V[j]);
    pf.psi_eps[j] = eps * g.weights_m[j] * g.weights_m[j] * e.vf.Phi_s[j];
  }
  VectorXd gpsi = solver.apply(pf.psi_trace + pf.psi_eps);
  pf.sigma.resize(n);
  pf.sigma0.resize(n);
  pf.sigma_tilde.resize(n);
  double b1sq = std::norm(st.vel.b1);
  for (int j = 0; j < n; ++j) {
    cplx Vs = std::conj(e.zs[j] * e.vf.DsV[j]);  // d/ds of the velocity proper
    cplx vperp = kPerpSign * cplx(0, 1) * e.V[j];
    double dot = (Vs * std::conj(vperp)).real();
    pf.sigma[j] = gpsi[j] + st.gravity * e.zs[j].real() + dot;
    pf.sigma0[j] = b1sq * std::abs(e.rec.curve.z[j] - e.rec.curve.z_star) * e.tan2nu;
    pf.sigma_tilde[j] = pf.sigma[j] - pf.sigma0[j];
  }
  return pf;
}

// the mollified tangential datum (1/z_s)(-i sigma~ + eps d_s(m^2 Phi_s))
VectorXcd regularized_datum(const Eval& e, const PressureFields& pf, double eps,
                            double delta, const WeightedGrid& g) {
  const int n = g.n;
  VectorXd m2phi(n);
  for (int j = 0; j < n; ++j) m2phi[j] = g.weights_m[j] * g.weights_m[j] * e.vf.Phi_s[j];
  VectorXd dm2phi = arc_derivative(m2phi, e, g);
  VectorXcd term(n);
  for (int j = 0; j < n; ++j)
    term[j] = (cplx(0, -1) * pf.sigma_tilde[j] + eps * dm2phi[j]) / e.zs[j];
  return a_delta(term, delta, g);
}

VectorXd xi_impl(const Eval& e, const FullState& st, const PressureFields& pf,
                 const VectorXcd& adat, const WeightedGrid& g, const DtnSolver& solver) {
  const int n = g.n;
  VectorXcd vdsv(n), isig0(n);
  for (int j = 0; j < n; ++j) {
    vdsv[j] = e.V[j] * e.vf.DsV[j];
    isig0[j] = cplx(0, 1) * pf.sigma0[j] / e.zs[j];
  }
  VectorXd u(n);
  for (int j = 0; j < n; ++j) {
    cplx w = e.rec.curve.z[j] - e.rec.curve.z_star;
    u[j] = (-vdsv[j] - (e.b1t * w + isig0[j]) + adat[j]).real();
  }
  VectorXd gu = solver.apply(u);
  VectorXcd d_vdsv = arc_derivative(vdsv, e, g);
  VectorXcd d_isig0 = arc_derivative(isig0, e, g);
  VectorXcd d_adat = arc_derivative(adat, e, g);
  VectorXd xi(n);
  for (int j = 0; j < n; ++j)
    xi[j] = gu[j] +
            (-d_vdsv[j] - (e.b1t * e.zs[j] + d_isig0[j]) + d_adat[j]).imag();
  return xi;
}

}  // namespace

PressureFields compute_sigma(const FullState& state, double eps, const WeightedGrid& g) {
  Eval e = evaluate(state, g);
  DtnSolver solver(e.rec.curve, g);
  return sigma_impl(e, state, eps, g, solver);
}

VectorXd compute_xi(const FullState& state, double eps, double delta, const WeightedGrid& g) {
  Eval e = evaluate(state, g);
  DtnSolver solver(e.rec.curve, g);
  PressureFields pf = sigma_impl(e, state, eps, g, solver);
  VectorXcd adat = regularized_datum(e, pf, eps, delta, g);
  return xi_impl(e, state, pf, adat, g, solver);
}

StateDeriv rhs_epsilon_delta(const FullState& state, double eps, double delta,
                             const WeightedGrid& g) {
  const int n = g.n;
  Eval e = evaluate(state, g);
  DtnSolver solver(e.rec.curve, g);

  StateDeriv d;
  CornerState ps;
  ps.z_star = state.iface.z_star;
  ps.nu_plus = state.iface.nu_plus;
  ps.nu_minus = state.iface.nu_minus;
  ps.b0 = state.vel.b0;
  ps.b1 = state.vel.b1;
  ps.g = state.gravity;
  d.params = rhs_cartesian(ps);

  d.pressure = sigma_impl(e, state, eps, g, solver);
  VectorXcd adat = regularized_datum(e, d.pressure, eps, delta, g);
  d.xi = xi_impl(e, state, d.pressure, adat, g, solver);

  d.dlog_mod.resize(n);
  d.theta_t.resize(n);
  d.dTheta.resize(n);
  VectorXd cp = chi_plus(g);
  for (int j = 0; j < n; ++j) {
    cplx G = e.zs[j] * e.zs[j] * (state.vel.b1 + state.vel.W[j]);
    d.dlog_mod[j] = G.real();
    d.theta_t[j] = -G.imag();
    d.dTheta[j] =
        d.theta_t[j] - d.params.nu_plus * cp[j] - d.params.nu_minus * (1.0 - cp[j]);
  }

  VectorXcd isig0(n);
  for (int j = 0; j < n; ++j) isig0[j] = cplx(0, 1) * d.pressure.sigma0[j] / e.zs[j];
  VectorXcd d_isig0 = arc_derivative(isig0, e, g);
  VectorXcd d_adat = arc_derivative(adat, e, g);
  d.dW.resize(n);
  for (int j = 0; j < n; ++j) {
    cplx zs2 = e.zs[j] * e.zs[j];
    cplx dsv = state.vel.b1 + state.vel.W[j];
    d.dW[j] = -std::norm(dsv) / zs2 - (e.b1t + d_isig0[j]) + d_adat[j] -
              cplx(0, 1) * d.xi[j] / e.zs[j];
  }
  return d;
}

double cfl_cap(const FullState& state, double delta, const WeightedGrid& g, double c_cfl) {
  PressureFields pf = compute_sigma(state, 0.0, g);
  double smax = pf.sigma.lpNorm<Eigen::Infinity>();
  double cap = 1.0 / (1.0 + smax);
  if (delta > 0.0) {
    double m_min = g.weights_m.minCoeff();
    cap = std::min(cap, delta * delta * m_min * m_min);
  }
  return c_cfl * (2.0 * kPi / g.n) * cap;
}

namespace {

FullState axpy(const FullState& s, const StateDeriv& d, double dt) {
  FullState out = s;
  out.iface.z_star += dt * d.params.z_star;
  out.iface.nu_plus += dt * d.params.nu_plus;
  out.iface.nu_minus += dt * d.params.nu_minus;
  out.iface.Theta += dt * d.dTheta;
  out.iface.log_mod_zalpha += dt * d.dlog_mod;
  out.vel.b0 += dt * d.params.b0;
  out.vel.b1 += dt * d.params.b1;
  out.vel.W += dt * d.dW;
  return out;
}

}  // namespace

FullState step(const FullState& state, double dt, double eps, double delta,
               const WeightedGrid& g, const StepControls& ctl) {
  if (!(dt > 0.0)) throw config_error("step: dt must be positive");
  if (ctl.enforce_cfl) {
    double cap = cfl_cap(state, delta, g, ctl.c_cfl);
    if (dt > cap) throw config_error("step: dt exceeds the stability cap");
  }
  StateDeriv k1 = rhs_epsilon_delta(state, eps, delta, g);
  StateDeriv k2 = rhs_epsilon_delta(axpy(state, k1, 0.5 * dt), eps, delta, g);
  StateDeriv k3 = rhs_epsilon_delta(axpy(state, k2, 0.5 * dt), eps, delta, g);
  StateDeriv k4 = rhs_epsilon_delta(axpy(state, k3, dt), eps, delta, g);

  FullState out = state;
  out = axpy(out, k1, dt / 6.0);
  out = axpy(out, k2, dt / 3.0);
  out = axpy(out, k3, dt / 3.0);
  out = axpy(out, k4, dt / 6.0);

  ConstraintDefects defects = constraint_defects(out, g);
  if (defects.closure > ctl.constraint_tol) project_closure(out.iface, g);
  Reconstruction rec = reconstruct_curve(out.iface, g, 1e30);
  if (defects.w_integral > ctl.constraint_tol * rec.length)
    project_w_constraint(out.vel, rec.curve, g);
  defects = constraint_defects(out, g);
  if (defects.closure > 10.0 * ctl.constraint_tol ||
      defects.w_integral > 10.0 * ctl.constraint_tol * rec.length)
    throw numeric_error("step: constraint defects persist after re-projection");
  return out;
}

EnergyReport energy(const FullState& state, double eps, const WeightedGrid& g) {
  const SpaceParams& p = state.params;
  EnergyReport rep;
  Eval e = evaluate(state, g);

  SpaceParams pk = make_space_params(p.k, p.beta);  // gamma = beta + k - 1
  SpaceParams pv = make_space_params(p.k, p.beta, p.beta + p.k - 2.0);

  VectorXd theta_core = strip_winding(state.iface.Theta, g, nullptr);
  double n_theta2 = state.iface.nu_plus * state.iface.nu_plus +
                    state.iface.nu_minus * state.iface.nu_minus +
                    std::pow(sobolev_norm_L(theta_core, pk, g), 2);
  double n_log2 = std::pow(sobolev_norm_H(state.iface.log_mod_zalpha, pk, g), 2);
  double n_v2 = std::norm(state.vel.b0) + std::norm(state.vel.b1) +
                std::pow(sobolev_norm_L(e.vf.U_star, pv, g), 2);
  double n_phis2 = std::pow(sobolev_norm_H(e.vf.phi_s, pk, g), 2);
  double fz = arc_chord(e.rec.curve, g);
  rep.components["theta"] = std::sqrt(n_theta2);
  rep.components["log_zalpha"] = std::sqrt(n_log2);
  rep.components["velocity"] = std::sqrt(n_v2);
  rep.components["phi_s"] = std::sqrt(n_phis2);
  rep.components["arc_chord"] = fz;
  rep.E_low = std::sqrt(n_theta2 + n_log2 + n_v2 + n_phis2 + fz);

  DtnSolver solver(e.rec.curve, g);
  PressureFields pf = sigma_impl(e, state, eps, g, solver);
  VectorXd theta = assemble_theta(state.iface, g);
  VectorXd dtheta = theta;
  for (int i = 0; i < p.k + 1; ++i) dtheta = arc_derivative(dtheta, e, g);
  VectorXd wtheta(g.n);
  for (int j = 0; j < g.n; ++j)
    wtheta[j] = std::sqrt(std::max(pf.sigma[j], 0.0)) * dtheta[j];
  double t_theta = weighted_l2_norm(wtheta, p.beta + p.k - 0.5, g);

  VectorXd dphi = e.vf.phi_s;
  for (int i = 0; i < p.k; ++i) dphi = arc_derivative(dphi, e, g);
  double t_half = half_norm(dphi, p.beta + p.k - 0.5, p.lambda_half, g);
  rep.components["high_theta"] = t_theta;
  rep.components["high_half"] = t_half;
  rep.E_high = std::sqrt(t_theta * t_theta + t_half * t_half);

  if (eps > 0.0) {
    SpaceParams pe = make_space_params(p.k + 1, p.beta);  // gamma = beta + k
    rep.components["eps_phi_s"] = sobolev_norm_H(e.vf.Phi_s, pe, g);
    rep.components["eps_log_zalpha"] = sobolev_norm_H(state.iface.log_mod_zalpha, pe, g);
  }

  rep.E_total = std::sqrt(rep.E_low * rep.E_low + rep.E_high * rep.E_high);
  rep.finite = std::isfinite(rep.E_total);
  for (auto& kv : rep.components)
    if (!std::isfinite(kv.second)) rep.finite = false;
  return rep;
}

Monitors monitors(const FullState& state, const WeightedGrid& g) {
  Monitors mon;
  Eval e = evaluate(state, g);
  DtnSolver solver(e.rec.curve, g);
  PressureFields pf = sigma_impl(e, state, 0.0, g, solver);
  double rt = std::numeric_limits<double>::infinity();
  double sm = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.n; ++j) {
    double r = std::abs(e.rec.curve.z[j] - e.rec.curve.z_star);
    if (r > 0.0) rt = std::min(rt, pf.sigma[j] / r);
    sm = std::min(sm, pf.sigma[j] / g.weights_m[j]);
  }
  mon.rt_ratio_min = rt;
  mon.sigma_min_over_m = sm;
  mon.arc_chord = arc_chord(e.rec.curve, g);
  mon.energy_snapshot = energy(state, 0.0, g).E_total;
  return mon;
}

}  // namespace crestwave
