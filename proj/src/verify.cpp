#include "crestwave/verify.hpp"

#include "crestwave/cauchy.hpp"
#include "crestwave/interface.hpp"
#include "crestwave/transforms.hpp"

#include <cmath>
#include <limits>

namespace crestwave {

namespace {

VectorXd weighted_field(FieldRng& rng, const WeightedGrid& g, int m_power, int bw) {
  VectorXd f = random_band_limited(rng, bw, 1.0, g);
  for (int j = 0; j < g.n; ++j) f[j] *= std::pow(g.weights_m[j], m_power);
  return f;
}

double stability_ratio(double c1, double c2) {
  if (c1 <= 0.0 || c2 <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(c1 / c2, c2 / c1);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = int(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------- hilbert

double hilbert_fitted(int n, double gamma, std::uint64_t seed) {
  WeightedGrid g = make_grid(n);
  FieldRng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    VectorXd f = random_band_limited(rng, 24, 0.5, g);
    double den = weighted_l2_norm(f, gamma, g);
    if (den < 1e-12) continue;
    worst = std::max(worst, weighted_l2_norm(hilbert(f, g), gamma, g) / den);
  }
  return worst;
}

SuiteReport suite_hilbert(int n, double gamma, std::uint64_t seed) {
  SuiteReport rep{"hilbert", n, gamma};
  WeightedGrid g = make_grid(n);
  double id_err = 0.0;
  for (int k = 1; k <= 8; ++k) {
    VectorXd c(g.n), s(g.n);
    for (int j = 0; j < g.n; ++j) {
      c[j] = std::cos(k * g.nodes[j]);
      s[j] = std::sin(k * g.nodes[j]);
    }
    id_err = std::max(id_err, (hilbert(c, g) - s).lpNorm<Eigen::Infinity>());
  }
  rep.details["identity_err"] = id_err;

  FieldRng rng(seed);
  VectorXd f = random_band_limited(rng, 16, 1.0, g);
  VectorXd hh = hilbert(hilbert(f, g), g);
  VectorXd centered = f.array() - f.mean();
  rep.details["involution_err"] = (hh + centered).lpNorm<Eigen::Infinity>();

  WeightedGrid g512 = make_grid(std::max(n, 512));
  VectorXd fs(g512.n);
  for (int j = 0; j < g512.n; ++j)
    fs[j] = std::cos(g512.nodes[j]) + 0.3 * std::sin(3.0 * g512.nodes[j]);
  rep.details["backend_err"] =
      (hilbert(fs, g512) - hilbert_pv(fs, g512)).lpNorm<Eigen::Infinity>();

  rep.fitted_C = hilbert_fitted(n, gamma, seed);
  rep.fitted_C_refined = hilbert_fitted(2 * n, gamma, seed);
  double stab = stability_ratio(rep.fitted_C, rep.fitted_C_refined);
  rep.details["stability"] = stab;
  bool muckenhaupt = std::abs(gamma) < 0.5;
  rep.pass = id_err <= 1e-12 && rep.details["involution_err"] <= 1e-10 &&
             rep.details["backend_err"] <= 1e-6 && std::isfinite(rep.fitted_C) &&
             (!muckenhaupt || stab < 2.0);
  if (!muckenhaupt)
    rep.note = "gamma outside the Muckenhaupt window: constant growth reported, not asserted";
  return rep;
}

// ------------------------------------------------------------------ hardy

double hardy_fitted(int n, double gamma, std::uint64_t seed) {
  FieldRng rng(seed);
  double h = 1.0 / n;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    // nonnegative random field on (0,1)
    std::vector<double> a(9), b(9);
    for (int k = 0; k < 9; ++k) {
      a[k] = rng.normal();
      b[k] = rng.normal();
    }
    VectorXd f(n);
    for (int i = 0; i < n; ++i) {
      double x = (i + 0.5) * h, v = 0.0;
      for (int k = 1; k <= 8; ++k)
        v += (a[k] * std::cos(kPi * k * x) + b[k] * std::sin(kPi * k * x)) / k;
      f[i] = std::abs(v);
    }
    // forward average (1/x) int_0^x f and the dual int_x^1 f/t dt
    VectorXd Tf(n), Sf(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = (i + 0.5) * h;
      acc += f[i] * h;
      Tf[i] = (acc - 0.5 * f[i] * h) / x;
    }
    acc = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      double x = (i + 0.5) * h;
      Sf[i] = acc + 0.5 * f[i] / x * h;
      acc += f[i] / x * h;
    }
    double nf = 0.0, nT = 0.0, nS = 0.0;
    for (int i = 0; i < n; ++i) {
      double w = std::pow((i + 0.5) * h, 2.0 * gamma);
      nf += w * f[i] * f[i];
      nT += w * Tf[i] * Tf[i];
      nS += w * Sf[i] * Sf[i];
    }
    if (nf < 1e-24) continue;
    worst = std::max(worst, std::sqrt(std::max(nT, nS) / nf));
  }
  return worst;
}

SuiteReport suite_hardy(int n, double gamma, std::uint64_t seed) {
  SuiteReport rep{"hardy", n, gamma};
  if (!(gamma > -0.5 && gamma < 0.5)) {
    gamma = 0.3;
    rep.gamma = gamma;
    rep.note = "gamma reset to 0.3 (both Hardy windows require |gamma| < 1/2)";
  }
  rep.fitted_C = hardy_fitted(n, gamma, seed);
  rep.fitted_C_refined = hardy_fitted(2 * n, gamma, seed);
  double stab = stability_ratio(rep.fitted_C, rep.fitted_C_refined);
  rep.details["stability"] = stab;
  rep.pass = std::isfinite(rep.fitted_C) && stab < 2.0;
  return rep;
}

// ------------------------------------------------------------------ riesz

double riesz_fitted(int n, double gamma, std::uint64_t seed) {
  WeightedGrid g = make_grid(n);
  FieldRng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd f = weighted_field(rng, g, 2, 12);
    VectorXd df = derivative_onesided(f, g);
    double den = weighted_l2_norm(df, gamma, g);
    if (den < 1e-12) continue;
    double num = weighted_l2_norm(half_laplacian_pv(f, g), gamma - 0.5, g);
    worst = std::max(worst, num / den);
  }
  return worst;
}

SuiteReport suite_riesz(int n, double gamma, std::uint64_t seed) {
  SuiteReport rep{"riesz", n, gamma};
  if (!(gamma > 0.0 && gamma < 0.5)) {
    gamma = 0.25;
    rep.gamma = gamma;
    rep.note = "gamma reset to 0.25 (bound requires gamma in (0, 1/2))";
  }
  rep.fitted_C = riesz_fitted(n, gamma, seed);
  rep.fitted_C_refined = riesz_fitted(2 * n, gamma, seed);
  double stab = stability_ratio(rep.fitted_C, rep.fitted_C_refined);
  rep.details["stability"] = stab;
  rep.pass = std::isfinite(rep.fitted_C) && stab < 2.0;
  return rep;
}

// ----------------------------------------------------------------- cauchy

void cauchy_fitted(int n, double gamma, std::uint64_t seed, double& bound_C,
                   double& smooth_C, double& const_err) {
  WeightedGrid g = make_grid(n);
  CornerInterface iface = make_corner_fixture(0.9, 0.1, g);
  CurveSamples curve = reconstruct_curve(iface, g).curve;
  // constant identity on the smooth circle; on corner fixtures the node at
  // the corner itself carries an O(1) principal-value constant
  CurveSamples circle;
  circle.z.resize(n);
  circle.z_alpha.resize(n);
  circle.closed = true;
  circle.z_star = cplx(0, 0);
  for (int j = 0; j < n; ++j) {
    circle.z[j] = std::exp(cplx(0, -g.nodes[j]));
    circle.z_alpha[j] = cplx(0, -1) * circle.z[j];
  }
  VectorXcd ones = VectorXcd::Constant(n, cplx(1, 0));
  const_err = (cauchy_apply(ones, circle, g) - ones).lpNorm<Eigen::Infinity>();
  FieldRng rng(seed);
  bound_C = smooth_C = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    VectorXd fr = weighted_field(rng, g, 1, 10);
    VectorXd fi = weighted_field(rng, g, 1, 10);
    VectorXcd f(n);
    for (int j = 0; j < n; ++j) f[j] = cplx(fr[j], fi[j]);
    double den = weighted_l2_norm(f, gamma, g);
    if (den < 1e-12) continue;
    bound_C = std::max(bound_C, weighted_l2_norm(cauchy_apply(f, curve, g), gamma, g) / den);
    smooth_C =
        std::max(smooth_C, weighted_l2_norm(cancellation_defect(f, curve, g), gamma, g) / den);
  }
}

SuiteReport suite_cauchy(int n, double gamma, std::uint64_t seed) {
  SuiteReport rep{"cauchy", n, gamma};
  double c1, s1, e1, c2, s2, e2;
  cauchy_fitted(n, gamma, seed, c1, s1, e1);
  cauchy_fitted(2 * n, gamma, seed, c2, s2, e2);
  rep.fitted_C = c1;
  rep.fitted_C_refined = c2;
  rep.details["const_err"] = e1;
  rep.details["const_err_refined"] = e2;
  rep.details["smoothing_C"] = s1;
  rep.details["smoothing_C_refined"] = s2;
  double stab = stability_ratio(c1, c2);
  rep.details["stability"] = stab;
  rep.pass = e1 <= 1e-7 && std::isfinite(c1) && stab < 2.0;
  return rep;
}

// -------------------------------------------------------------- mollifier

double mollifier_commutator_fitted(int n, double gamma, std::uint64_t seed) {
  WeightedGrid g = make_grid(n);
  MollifierConfig cfg{0.2};
  FieldRng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    VectorXd f = weighted_field(rng, g, 1, 12);
    double den = weighted_l2_norm(f, gamma, g);
    if (den < 1e-12) continue;
    VectorXd kf = mollifier_derivative_commutator(f, cfg, g);
    worst = std::max(worst, weighted_l2_norm(kf, gamma + 1.0, g) / den);
  }
  return worst;
}

SuiteReport suite_mollifier(int n, double gamma, std::uint64_t seed) {
  SuiteReport rep{"mollifier", n, gamma};
  WeightedGrid g = make_grid(n);
  MollifierConfig cfg{0.2};

  VectorXd ones = VectorXd::Constant(n, 1.0);
  rep.details["unit_err"] = (mollify(ones, cfg, g) - ones).lpNorm<Eigen::Infinity>();

  FieldRng rng(seed);
  VectorXd f = weighted_field(rng, g, 4, 8);
  VectorXd h = weighted_field(rng, g, 4, 8);
  double ip1 = (mollify(f, cfg, g).array() * h.array()).sum() * g.h;
  double ip2 = (f.array() * mollify_adjoint(h, cfg, g).array()).sum() * g.h;
  double scale = std::max(1.0, std::max(std::abs(ip1), std::abs(ip2)));
  rep.details["adjoint_err"] = std::abs(ip1 - ip2) / scale;

  // approximation rate in delta for a field with one weighted derivative
  VectorXd f1(n);
  for (int j = 0; j < n; ++j) {
    double a = g.nodes[j];
    f1[j] = g.weights_m[j] * (std::cos(2.0 * a) + 0.5 * std::sin(a));
  }
  std::vector<double> lx, ly;
  for (double d : {0.4, 0.2, 0.1, 0.05}) {
    MollifierConfig c{d};
    double err = weighted_l2_norm(VectorXd(mollify(f1, c, g) - f1), gamma, g);
    lx.push_back(std::log(d));
    ly.push_back(std::log(err));
  }
  rep.details["rate_slope"] = fit_slope(lx, ly);

  rep.fitted_C = mollifier_commutator_fitted(n, gamma, seed);
  rep.fitted_C_refined = mollifier_commutator_fitted(2 * n, gamma, seed);
  double stab = stability_ratio(rep.fitted_C, rep.fitted_C_refined);
  rep.details["stability"] = stab;
  rep.pass = rep.details["unit_err"] <= 1e-10 && rep.details["adjoint_err"] <= 1e-8 &&
             rep.details["rate_slope"] >= 0.45 && std::isfinite(rep.fitted_C) && stab < 2.0;
  return rep;
}

// ------------------------------------------------------------ commutators

void commutator_fitted(int n, double gamma, std::uint64_t seed, double& weight_C,
                       double& half_C, double& moll_C) {
  WeightedGrid g = make_grid(n);
  FieldRng rng(seed);
  MollifierConfig cfg{0.2};
  weight_C = half_C = moll_C = 0.0;
  VectorXd m2(n), tg(n);
  for (int j = 0; j < n; ++j) {
    m2[j] = g.weights_m[j] * g.weights_m[j];
    tg[j] = std::tanh(g.nodes[j]);
  }
  for (int trial = 0; trial < 30; ++trial) {
    VectorXd f = weighted_field(rng, g, 1, 12);
    double den = weighted_l2_norm(f, gamma, g);
    double den_half = weighted_l2_norm(f, gamma - 0.5, g);
    if (den < 1e-12 || den_half < 1e-12) continue;
    // [m^2, H]
    VectorXd comm = m2.asDiagonal() * hilbert(f, g) -
                    hilbert(VectorXd(m2.asDiagonal() * f), g);
    weight_C = std::max(
        weight_C, weighted_l2_norm(derivative_onesided(comm, g), gamma + 1.0, g) / den);
    // [Lambda^{1/2}, tanh]
    VectorXd ch = half_laplacian_pv(VectorXd(tg.asDiagonal() * f), g) -
                  tg.asDiagonal() * half_laplacian_pv(f, g);
    half_C = std::max(half_C, weighted_l2_norm(ch, gamma, g) / den_half);
    // [B_delta, H]
    VectorXd cm = mollify(hilbert(f, g), cfg, g) - hilbert(mollify(f, cfg, g), g);
    moll_C = std::max(moll_C, weighted_l2_norm(cm, gamma, g) / den);
  }
}

SuiteReport suite_commutators(int n, double gamma, std::uint64_t seed) {
  SuiteReport rep{"commutators", n, gamma};
  double w1, h1, m1, w2, h2, m2;
  commutator_fitted(n, gamma, seed, w1, h1, m1);
  commutator_fitted(2 * n, gamma, seed, w2, h2, m2);
  rep.fitted_C = std::max({w1, h1, m1});
  rep.fitted_C_refined = std::max({w2, h2, m2});
  rep.details["weight_C"] = w1;
  rep.details["half_C"] = h1;
  rep.details["mollifier_C"] = m1;
  double stab = std::max({stability_ratio(w1, w2), stability_ratio(h1, h2),
                          stability_ratio(m1, m2)});
  rep.details["stability"] = stab;
  rep.pass = std::isfinite(rep.fitted_C) && stab < 2.0;
  return rep;
}

// --------------------------------------------------------------- halfnorm

double sobolev_pointwise_fitted(int n, double gamma, std::uint64_t seed) {
  WeightedGrid g = make_grid(n);
  FieldRng rng(seed);
  SpaceParams p = make_space_params(1, 0.0, gamma + 1.0);
  double lam = 0.5 - gamma;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd f = weighted_field(rng, g, 2, 10);
    double den = sobolev_norm_L(f, p, g);
    if (den < 1e-12) continue;
    double num = 0.0;
    for (int j = 0; j < n; ++j)
      num = std::max(num, std::abs(f[j]) * std::pow(g.weights_m[j], 1.0 - lam));
    worst = std::max(worst, num / den);
  }
  return worst;
}

SuiteReport suite_halfnorm(int n, double gamma, std::uint64_t seed) {
  SuiteReport rep{"halfnorm", n, gamma};
  if (!(gamma > -0.5 && gamma < 0.5)) {
    gamma = 0.25;
    rep.gamma = gamma;
    rep.note = "gamma reset to 0.25";
  }
  // the PV backend is calibrated at n = 1024; compare there
  WeightedGrid g = make_grid(std::max(n, 1024));
  VectorXd fs(g.n);
  for (int j = 0; j < g.n; ++j) fs[j] = std::cos(2.0 * g.nodes[j]);
  VectorXd spec = half_laplacian(fs, g);
  rep.details["backend_err"] = (spec - half_laplacian_pv(fs, g)).lpNorm<Eigen::Infinity>() /
                               spec.lpNorm<Eigen::Infinity>();

  rep.fitted_C = sobolev_pointwise_fitted(n, gamma, seed);
  rep.fitted_C_refined = sobolev_pointwise_fitted(2 * n, gamma, seed);
  double stab = stability_ratio(rep.fitted_C, rep.fitted_C_refined);
  rep.details["stability"] = stab;
  rep.pass = rep.details["backend_err"] <= 1e-2 && std::isfinite(rep.fitted_C) && stab < 2.0;
  return rep;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"hilbert", "hardy", "riesz", "cauchy", "mollifier", "commutators", "halfnorm"};
}

SuiteReport verify_suite(const std::string& name, int n, double gamma, std::uint64_t seed) {
  if (n < 32) throw config_error("verify_suite: n too small");
  if (name == "hilbert") return suite_hilbert(n, gamma, seed);
  if (name == "hardy") return suite_hardy(n, gamma, seed);
  if (name == "riesz") return suite_riesz(n, gamma, seed);
  if (name == "cauchy") return suite_cauchy(n, gamma, seed);
  if (name == "mollifier") return suite_mollifier(n, gamma, seed);
  if (name == "commutators") return suite_commutators(n, gamma, seed);
  if (name == "halfnorm") return suite_halfnorm(n, gamma, seed);
  throw config_error("verify_suite: unknown suite " + name);
}

}  // namespace crestwave
