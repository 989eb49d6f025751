#include "crestwave/corner_ode.hpp"

#include <algorithm>
#include <cmath>

namespace crestwave {

namespace {

using Vec8 = Eigen::Matrix<double, 8, 1>;
// layout: Re z*, Im z*, nu_plus, nu_minus, Re b0, Im b0, Re c, Im c
// (c is b1 in the bounded system, b1 e^{-i z*} in the periodic one; the
// equations for the packed vector coincide)

double angle_of(const Vec8& v) { return kPi + v[2] - v[3]; }

Vec8 rhs_vec(const Vec8& v, double g) {
  double two_nu = angle_of(v);
  double c2 = std::cos(two_nu);
  if (std::abs(c2) < 1e-12) throw numeric_error("corner ode: angle degenerate, cos 2nu ~ 0");
  cplx c(v[6], v[7]);
  cplx b0(v[4], v[5]);
  cplx dz = std::conj(b0);
  double dnup = (cplx(0, 1) * c * std::exp(cplx(0, 2.0 * v[2]))).real();
  double dnum = (cplx(0, 1) * c * std::exp(cplx(0, 2.0 * v[3]))).real();
  cplx db0(0, g);
  cplx dc = std::norm(c) * std::exp(cplx(0, -(v[2] + v[3]))) / c2;
  Vec8 d;
  d << dz.real(), dz.imag(), dnup, dnum, db0.real(), db0.imag(), dc.real(), dc.imag();
  return d;
}

Vec8 pack(const CornerState& s, bool periodic) {
  cplx c = periodic ? s.b1 * std::exp(cplx(0, -1) * s.z_star) : s.b1;
  Vec8 v;
  v << s.z_star.real(), s.z_star.imag(), s.nu_plus, s.nu_minus, s.b0.real(), s.b0.imag(),
      c.real(), c.imag();
  return v;
}

CornerState unpack(const Vec8& v, double g, double t, bool periodic) {
  CornerState s;
  s.z_star = cplx(v[0], v[1]);
  s.nu_plus = v[2];
  s.nu_minus = v[3];
  s.b0 = cplx(v[4], v[5]);
  cplx c(v[6], v[7]);
  s.b1 = periodic ? c * std::exp(cplx(0, 1) * s.z_star) : c;
  s.g = g;
  s.t = t;
  return s;
}

void fit_line(const std::vector<double>& x, const std::vector<double>& y, double& a,
              double& b) {
  const int n = int(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  b = (n * sxy - sx * sy) / det;
  a = (sy - b * sx) / n;
}

}  // namespace

CornerState rhs_cartesian(const CornerState& s) {
  Vec8 d = rhs_vec(pack(s, false), s.g);
  return unpack(d, 0.0, 1.0, false);
}

CornerState rhs_periodic(const CornerState& s) {
  double two_nu = kPi + s.nu_plus - s.nu_minus;
  double c2 = std::cos(two_nu);
  if (std::abs(c2) < 1e-12) throw numeric_error("corner ode: angle degenerate, cos 2nu ~ 0");
  cplx c = s.b1 * std::exp(cplx(0, -1) * s.z_star);
  CornerState d;
  d.z_star = std::conj(s.b0);
  d.nu_plus = (cplx(0, 1) * c * std::exp(cplx(0, 2.0 * s.nu_plus))).real();
  d.nu_minus = (cplx(0, 1) * c * std::exp(cplx(0, 2.0 * s.nu_minus))).real();
  d.b0 = cplx(0, s.g);
  // c obeys the bounded-domain b1 equation; convert back to a b1 derivative
  cplx dc = std::norm(c) * std::exp(cplx(0, -(s.nu_plus + s.nu_minus))) / c2;
  d.b1 = (dc + cplx(0, 1) * d.z_star * c) * std::exp(cplx(0, 1) * s.z_star);
  d.g = 0.0;
  d.t = 1.0;
  return d;
}

PolarState to_polar(const CornerState& s) {
  PolarState p;
  p.nu = 0.5 * (kPi + s.nu_plus - s.nu_minus);
  p.beta_hat = s.nu_plus + s.nu_minus;
  p.R = std::abs(s.b1);
  p.psi = std::arg(s.b1);
  return p;
}

PolarState rhs_polar(const PolarState& s) {
  double two_nu = 2.0 * s.nu;
  double c2 = std::cos(two_nu);
  if (std::abs(c2) < 1e-12) throw numeric_error("corner ode: angle degenerate, cos 2nu ~ 0");
  double phase = std::cos(s.beta_hat + s.psi);
  double sphase = std::sin(s.beta_hat + s.psi);
  PolarState d;
  d.nu = s.R * phase * std::sin(two_nu);
  d.beta_hat = 2.0 * s.R * sphase * c2;
  d.R = s.R * s.R * phase / c2;
  d.psi = -s.R * sphase / c2;
  return d;
}

double conserved_quantity(const CornerState& s) { return conserved_quantity(to_polar(s)); }

double conserved_quantity(const PolarState& s) {
  double t2 = std::tan(2.0 * s.nu);
  if (!std::isfinite(t2) || t2 == 0.0)
    throw numeric_error("conserved_quantity: tan 2nu degenerate");
  return s.R * s.R / t2;
}

OdeRun integrate(const CornerState& s0, double t_end, double dt0, const OdeControls& ctl) {
  if (!(t_end > s0.t) || !(dt0 > 0.0)) throw config_error("integrate: bad horizon or step");
  // Dormand-Prince 5(4) embedded pair
  static const double A[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double E[7] = {71.0 / 57600, 0, -71.0 / 16695, 71.0 / 1920,
                              -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

  OdeRun run;
  double g = s0.g;
  Vec8 y = pack(s0, ctl.periodic);
  double t = s0.t;
  double dt = dt0;
  const double atol = 1e-12;

  run.trajectory.push_back(unpack(y, g, t, ctl.periodic));
  std::string reason = "t_end";
  bool blew = false;
  Vec8 k[7];
  k[0] = rhs_vec(y, g);  // FSAL

  while (t < t_end) {
    dt = std::min(dt, t_end - t);
    if (dt < 1e-15) throw numeric_error("integrate: step underflow");
    bool ok = false;
    Vec8 ynew;
    for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
      try {
        for (int i = 1; i < 7; ++i) {
          Vec8 acc = y;
          for (int j = 0; j < i; ++j) acc += dt * A[i][j] * k[j];
          k[i] = rhs_vec(acc, g);
          if (i == 6) ynew = acc;  // stage 7 evaluates at the 5th-order solution
        }
      } catch (const numeric_error&) {
        // degeneracy inside a trial stage: shrink and retry
        dt *= 0.25;
        if (dt < 1e-15) throw;
        continue;
      }
      Vec8 err = Vec8::Zero();
      for (int i = 0; i < 7; ++i) err += dt * E[i] * k[i];
      double en = 0.0;
      for (int i = 0; i < 8; ++i) {
        double sc = atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        en += std::pow(err[i] / sc, 2);
      }
      en = std::sqrt(en / 8.0);
      double fac = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
      if (en <= 1.0) {
        ok = true;
        t += dt;
        y = ynew;
        k[0] = k[6];
        dt *= fac;
      } else {
        dt *= fac;
        if (dt < 1e-15) throw numeric_error("integrate: step underflow");
      }
    }
    if (!ok) throw numeric_error("integrate: repeated step rejection");

    run.trajectory.push_back(unpack(y, g, t, ctl.periodic));
    ++run.report.steps;

    double R = std::hypot(y[6], y[7]);
    double two_nu = angle_of(y);
    if (R >= ctl.R_max) {
      reason = "R_max";
      blew = true;
      break;
    }
    if (two_nu >= 0.5 * kPi - ctl.eps_stop || two_nu <= ctl.eps_stop) {
      reason = "angle_window";
      blew = two_nu >= 0.5 * kPi - ctl.eps_stop;
      break;
    }
  }

  BlowupReport& rep = run.report;
  rep.stop_reason = reason;
  rep.blew_up = blew;
  rep.steps = int(run.trajectory.size()) - 1;
  const CornerState& last = run.trajectory.back();
  rep.terminal_two_nu = kPi + last.nu_plus - last.nu_minus;

  double q0 = 0.0;
  bool have_q0 = false;
  for (const CornerState& s : run.trajectory) {
    double q;
    try {
      q = conserved_quantity(s);
    } catch (const numeric_error&) {
      continue;
    }
    if (!have_q0) {
      q0 = q;
      have_q0 = true;
      continue;
    }
    double ref = std::max(std::abs(q0), 1e-300);
    rep.conserved_drift = std::max(rep.conserved_drift, std::abs(q - q0) / ref);
  }

  if (blew) {
    const int m = int(run.trajectory.size());
    int lo = std::max(0, m - 50);
    std::vector<double> ts, invR;
    for (int i = lo; i < m; ++i) {
      double R = std::abs(run.trajectory[i].b1);
      if (ctl.periodic)
        R = std::abs(run.trajectory[i].b1 *
                     std::exp(cplx(0, -1) * run.trajectory[i].z_star));
      if (R <= 0.0) continue;
      ts.push_back(run.trajectory[i].t);
      invR.push_back(1.0 / R);
    }
    if (ts.size() >= 5) {
      // center the abscissa: the tail steps cluster tightly near the blow-up
      // time, and uncentered normal equations cancel catastrophically there
      double tbar = 0.0;
      for (double t : ts) tbar += t;
      tbar /= double(ts.size());
      std::vector<double> tc(ts);
      for (double& t : tc) t -= tbar;
      double a, b;
      fit_line(tc, invR, a, b);
      if (b < 0.0) rep.T_fit = tbar - a / b;
    }
    // rate fit over the final decade of R. The blow-up time enters the fit
    // nonlinearly, and log R vs -log(T - t) is exquisitely sensitive to it so
    // close to T, so T is refined by minimizing the least-squares residual of
    // the power law over a bracket above the last accepted time.
    {
      double R_end = std::abs(last.b1);
      std::vector<double> ts2, lR;
      for (const CornerState& s : run.trajectory) {
        double R = std::abs(s.b1);
        if (ctl.periodic) R = std::abs(s.b1 * std::exp(cplx(0, -1) * s.z_star));
        if (R >= 0.1 * R_end && R > 0.0) {
          ts2.push_back(s.t);
          lR.push_back(std::log(R));
        }
      }
      if (ts2.size() >= 5) {
        double slope_at = 0.0;
        auto sse_for = [&](double Tc, double& slope) -> double {
          std::vector<double> xs, ys;
          for (std::size_t i = 0; i < ts2.size(); ++i) {
            double rem = Tc - ts2[i];
            if (rem <= 0.0) return 1e300;
            xs.push_back(-std::log(rem));
            ys.push_back(lR[i]);
          }
          double a, b;
          fit_line(xs, ys, a, b);
          slope = b;
          double sse = 0.0;
          for (std::size_t i = 0; i < xs.size(); ++i) {
            double r = ys[i] - a - b * xs[i];
            sse += r * r;
          }
          return sse;
        };
        double span = std::max(last.t - ts2.front(), 1e-300);
        // golden-section search on log(T - t_last)
        double lo = std::log(span) - 25.0, hi = std::log(10.0 * span);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
        double s1, s2;
        double f1 = sse_for(last.t + std::exp(c1), s1);
        double f2 = sse_for(last.t + std::exp(c2), s2);
        for (int it = 0; it < 120; ++it) {
          if (f1 < f2) {
            hi = c2;
            c2 = c1;
            f2 = f1;
            c1 = hi - gr * (hi - lo);
            f1 = sse_for(last.t + std::exp(c1), s1);
          } else {
            lo = c1;
            c1 = c2;
            f1 = f2;
            c2 = lo + gr * (hi - lo);
            f2 = sse_for(last.t + std::exp(c2), s2);
          }
        }
        double T_best = last.t + std::exp(0.5 * (lo + hi));
        sse_for(T_best, slope_at);
        rep.rate_exponent = slope_at;
        // the 1/R tangent fit misplaces T by far more than the distance of the
        // last samples to it; the nonlinear refinement is the usable estimate
        rep.T_fit = T_best;
        double pmin = 1e300, pmax = -1e300, psum = 0.0;
        for (std::size_t i = 0; i < ts2.size(); ++i) {
          double p = std::exp(lR[i]) * (T_best - ts2[i]);
          pmin = std::min(pmin, p);
          pmax = std::max(pmax, p);
          psum += p;
        }
        rep.rate_spread = (pmax - pmin) / (psum / double(ts2.size()));
      }
    }
  }
  return run;
}

MonotonicityReport monotonicity_probe(const std::vector<CornerState>& traj) {
  MonotonicityReport rep;
  if (traj.size() < 2) {
    rep.cos_phase_monotone = rep.nu_monotone = true;
    return rep;
  }
  double worst_cos = 0.0, worst_nu = 0.0;
  PolarState prev = to_polar(traj[0]);
  double prev_cos = std::cos(prev.beta_hat + prev.psi);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    PolarState p = to_polar(traj[i]);
    double c = std::cos(p.beta_hat + p.psi);
    worst_cos = std::max(worst_cos, prev_cos - c);
    worst_nu = std::max(worst_nu, prev.nu - p.nu);
    prev = p;
    prev_cos = c;
  }
  rep.cos_phase_monotone = worst_cos <= 1e-12;
  rep.nu_monotone = worst_nu <= 1e-12;
  rep.max_violation = std::max(worst_cos, worst_nu);
  return rep;
}

}  // namespace crestwave
