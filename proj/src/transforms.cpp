#include "crestwave/transforms.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <functional>
#include <mutex>

namespace crestwave {

namespace {

VectorXcd spectral_multiplier(const VectorXcd& f, const WeightedGrid& g,
                              const std::function<cplx(int)>& mult) {
  const int n = g.n;
  Eigen::FFT<double> fft;
  std::vector<cplx> in(f.data(), f.data() + n), coef(n), out(n);
  fft.fwd(coef, in);
  for (int k = 0; k < n; ++k) {
    int kk = (k <= n / 2) ? k : k - n;
    coef[k] *= mult(kk);
  }
  fft.inv(out, coef);
  VectorXcd r(n);
  for (int j = 0; j < n; ++j) r[j] = out[j];
  return r;
}

}  // namespace

VectorXcd hilbert(const VectorXcd& f, const WeightedGrid& g) {
  if (f.size() != g.n) throw config_error("hilbert: size mismatch");
  if (!f.allFinite()) throw numeric_error("hilbert: non-finite field");
  return spectral_multiplier(f, g, [](int k) {
    if (k == 0) return cplx(0, 0);
    return k > 0 ? cplx(0, -1) : cplx(0, 1);
  });
}

VectorXd hilbert(const VectorXd& f, const WeightedGrid& g) {
  VectorXcd fc = f.cast<cplx>();
  return hilbert(fc, g).real();
}

VectorXd hilbert_pv(const VectorXd& f, const WeightedGrid& g) {
  const int n = g.n;
  if (f.size() != n) throw config_error("hilbert_pv: size mismatch");
  if (!f.allFinite()) throw numeric_error("hilbert_pv: non-finite field");
  VectorXd r(n);
  // alternating-point trapezoid: only nodes at odd offset, doubled weight
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int jp = (j + 1) % 2; jp < n; jp += 2) {
      double u = 0.5 * (g.nodes[j] - g.nodes[jp]);
      s += f[jp] * (std::cos(u) / std::sin(u));
    }
    // each retained node stands for a cell of width 2h
    r[j] = s * g.h / kPi;
  }
  return r;
}

VectorXd half_laplacian(const VectorXd& f, const WeightedGrid& g) {
  if (f.size() != g.n) throw config_error("half_laplacian: size mismatch");
  if (!f.allFinite()) throw numeric_error("half_laplacian: non-finite field");
  VectorXcd fc = f.cast<cplx>();
  return spectral_multiplier(fc, g, [](int k) {
           return cplx(std::sqrt(std::abs(double(k))), 0);
         })
      .real();
}

namespace {

// antiderivatives of u^p/|u|^{3/2} for p = 1, 2, 3
inline double anti1(double u) { return 2.0 * std::sqrt(std::abs(u)); }
inline double anti2(double u) {
  return (u >= 0 ? 1.0 : -1.0) * (2.0 / 3.0) * std::pow(std::abs(u), 1.5);
}
inline double anti3(double u) { return 0.4 * std::pow(std::abs(u), 2.5); }

// periodized |u|^{-3/2} kernel: sum over 2 pi translates of the argument, so
// the quadrature sees the kernel of the transform on periodic functions rather
// than the whole-line one (the difference is frequency-dependent and would not
// be absorbed by a single calibration constant)
double periodized_kernel(double u) {
  double s = std::pow(std::abs(u), -1.5);
  const int M = 4000;
  for (int m = 1; m <= M; ++m)
    s += std::pow(2.0 * kPi * m + u, -1.5) + std::pow(2.0 * kPi * m - u, -1.5);
  // tail of the image sum, integral approximation
  s += 4.0 / std::sqrt(2.0 * kPi * (M + 0.5));
  return s;
}

const VectorXd& kernel_table(const WeightedGrid& g) {
  static std::mutex mu;
  static std::map<int, VectorXd> cache;
  std::lock_guard<std::mutex> lock(mu);
  VectorXd& tab = cache[g.n];
  if (tab.size() == 0) {
    tab.resize(g.n);  // index |j - jp|
    tab[0] = 0.0;
    for (int d = 1; d < g.n; ++d) tab[d] = periodized_kernel(d * g.h);
  }
  return tab;
}

VectorXd half_laplacian_pv_raw(const VectorXd& f, const WeightedGrid& g) {
  const int n = g.n;
  VectorXd f1 = derivative_onesided(f, g);
  VectorXd f2 = derivative_onesided(f1, g);
  VectorXd f3 = derivative_onesided(f2, g);
  const VectorXd& ker = kernel_table(g);
  VectorXd r(n);
  const int bw = 3;  // half-width of the analytically integrated band
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    int lo = std::max(0, j - bw), hi = std::min(n - 1, j + bw);
    for (int jp = 0; jp < lo; ++jp) s += (f[j] - f[jp]) * ker[j - jp] * g.h;
    for (int jp = hi + 1; jp < n; ++jp) s += (f[j] - f[jp]) * ker[jp - j] * g.h;
    // band cells cover u in (ua, ub), u = a_j - a'
    double ua = (j - hi) * g.h - 0.5 * g.h;
    double ub = (j - lo) * g.h + 0.5 * g.h;
    s += f1[j] * (anti1(ub) - anti1(ua)) - 0.5 * f2[j] * (anti2(ub) - anti2(ua)) +
         (f3[j] / 6.0) * (anti3(ub) - anti3(ua));
    r[j] = s;
  }
  return r;
}

}  // namespace

double half_laplacian_constant() {
  static std::once_flag flag;
  static double c = 0.0;
  std::call_once(flag, [] {
    WeightedGrid g = make_grid(1024);
    VectorXd f(g.n);
    for (int j = 0; j < g.n; ++j) f[j] = std::cos(g.nodes[j]);
    VectorXd spec = half_laplacian(f, g);
    VectorXd raw = half_laplacian_pv_raw(f, g);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < g.n; ++j) {
      if (std::abs(g.nodes[j]) < 0.5 * kPi) {
        num += spec[j] * raw[j];
        den += raw[j] * raw[j];
      }
    }
    c = num / den;
  });
  return c;
}

VectorXd half_laplacian_pv(const VectorXd& f, const WeightedGrid& g) {
  if (f.size() != g.n) throw config_error("half_laplacian_pv: size mismatch");
  if (!f.allFinite()) throw numeric_error("half_laplacian_pv: non-finite field");
  return half_laplacian_constant() * half_laplacian_pv_raw(f, g);
}

double half_norm(const VectorXd& f, double gamma, double lambda, const WeightedGrid& g) {
  double shifted = gamma - lambda;
  if (!(shifted > -0.5 && shifted < 0.5))
    throw config_error("half_norm: gamma - lambda outside (-1/2, 1/2)");
  VectorXd mf(g.n);
  for (int j = 0; j < g.n; ++j) mf[j] = std::pow(g.weights_m[j], lambda) * f[j];
  return weighted_l2_norm(half_laplacian_pv(mf, g), shifted, g);
}

void gauss_legendre(int n, VectorXd& nodes, VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

namespace {

constexpr int kGL = 48;

struct GLRule {
  VectorXd x, w;
};

const GLRule& gl_rule() {
  static const GLRule rule = [] {
    GLRule r;
    gauss_legendre(kGL, r.x, r.w);
    return r;
  }();
  return rule;
}

const VectorXd& gl_nodes() { return gl_rule().x; }
const VectorXd& gl_weights() { return gl_rule().w; }

double bump_unnormalized(double x) {
  double t = 1.0 - x * x;
  return t > 1e-14 ? std::exp(-1.0 / t) : 0.0;
}

double bump_norm_constant() {
  static std::once_flag flag;
  static double c = 0.0;
  std::call_once(flag, [] {
    VectorXd x, w;
    gauss_legendre(kGL, x, w);
    double s = 0.0;
    for (int i = 0; i < kGL; ++i) s += w[i] * bump_unnormalized(x[i]);
    c = 1.0 / s;
  });
  return c;
}

void check_delta(const MollifierConfig& cfg) {
  if (cfg.delta < 0.0 || cfg.delta >= 1.0)
    throw config_error("mollifier: delta must be in [0, 1) (sup|eta'| = 1)");
}

}  // namespace

double mollifier_eta(double a) { return (kPi * kPi - a * a) / (2.0 * kPi); }
double mollifier_eta_prime(double a) { return -a / kPi; }
double mollifier_bump(double x) { return bump_norm_constant() * bump_unnormalized(x); }

double interpolate_quintic(const VectorXd& f, const WeightedGrid& g, double x) {
  const int n = g.n;
  int base = int(std::floor((x - g.nodes[0]) / g.h)) - 2;
  base = std::min(std::max(base, 0), n - 6);
  double r = 0.0;
  for (int i = 0; i < 6; ++i) {
    double li = 1.0;
    for (int k = 0; k < 6; ++k) {
      if (k == i) continue;
      li *= (x - g.nodes[base + k]) / (g.nodes[base + i] - g.nodes[base + k]);
    }
    r += li * f[base + i];
  }
  return r;
}

VectorXd mollify(const VectorXd& f, const MollifierConfig& cfg, const WeightedGrid& g) {
  check_delta(cfg);
  if (f.size() != g.n) throw config_error("mollify: size mismatch");
  if (cfg.delta == 0.0) return f;
  const VectorXd& x = gl_nodes();
  const VectorXd& w = gl_weights();
  VectorXd out(g.n);
  for (int j = 0; j < g.n; ++j) {
    double step = cfg.delta * mollifier_eta(g.nodes[j]);
    double s = 0.0;
    for (int i = 0; i < kGL; ++i)
      s += w[i] * mollifier_bump(x[i]) * interpolate_quintic(f, g, g.nodes[j] - step * x[i]);
    out[j] = s;
  }
  return out;
}

namespace {

// solve x -+ delta*eta(x) = y; sign = -1 gives x_plus (>= y), +1 gives x_minus
double adjoint_endpoint(double y, double delta, int sign) {
  double x = y;
  for (int it = 0; it < 100; ++it) {
    double fval = x + sign * delta * mollifier_eta(x) - y;
    double fder = 1.0 + sign * delta * mollifier_eta_prime(x);
    double dx = fval / fder;
    x -= dx;
    if (std::abs(dx) < 1e-13) return std::min(kPi, std::max(-kPi, x));
  }
  // bisection fallback
  double lo = sign > 0 ? std::max(-kPi, y - delta * kPi) : y;
  double hi = sign > 0 ? y : std::min(kPi, y + delta * kPi);
  auto fn = [&](double t) { return t + sign * delta * mollifier_eta(t) - y; };
  if (fn(lo) * fn(hi) > 0.0) throw numeric_error("mollify_adjoint: root bracketing failed");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (fn(mid) * fn(lo) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

VectorXd mollify_adjoint(const VectorXd& f, const MollifierConfig& cfg, const WeightedGrid& g) {
  check_delta(cfg);
  if (f.size() != g.n) throw config_error("mollify_adjoint: size mismatch");
  if (cfg.delta == 0.0) return f;
  const VectorXd& x = gl_nodes();
  const VectorXd& w = gl_weights();
  VectorXd out(g.n);
  for (int j = 0; j < g.n; ++j) {
    double y = g.nodes[j];
    double xm = adjoint_endpoint(y, cfg.delta, +1);
    double xp = adjoint_endpoint(y, cfg.delta, -1);
    double mid = 0.5 * (xp + xm), rad = 0.5 * (xp - xm);
    double s = 0.0;
    for (int i = 0; i < kGL; ++i) {
      double xi = mid + rad * x[i];
      double step = cfg.delta * mollifier_eta(xi);
      if (step <= 0.0) continue;
      s += w[i] * rad * mollifier_bump((xi - y) / step) / step *
           interpolate_quintic(f, g, xi);
    }
    out[j] = s;
  }
  return out;
}

VectorXd smooth(const VectorXd& f, const MollifierConfig& cfg, const WeightedGrid& g) {
  if (cfg.delta == 0.0) return f;
  return mollify_adjoint(mollify(f, cfg, g), cfg, g);
}

VectorXcd smooth(const VectorXcd& f, const MollifierConfig& cfg, const WeightedGrid& g) {
  if (cfg.delta == 0.0) return f;
  VectorXd re = smooth(VectorXd(f.real()), cfg, g);
  VectorXd im = smooth(VectorXd(f.imag()), cfg, g);
  VectorXcd out(g.n);
  for (int j = 0; j < g.n; ++j) out[j] = cplx(re[j], im[j]);
  return out;
}

VectorXd mollifier_derivative_commutator(const VectorXd& f, const MollifierConfig& cfg,
                                         const WeightedGrid& g) {
  check_delta(cfg);
  if (f.size() != g.n) throw config_error("mollifier commutator: size mismatch");
  if (cfg.delta == 0.0) return VectorXd::Zero(g.n);
  const VectorXd& x = gl_nodes();
  const VectorXd& w = gl_weights();
  VectorXd out(g.n);
  for (int j = 0; j < g.n; ++j) {
    double a = g.nodes[j];
    double step = cfg.delta * mollifier_eta(a);
    double s = 0.0;
    for (int i = 0; i < kGL; ++i) {
      double v = x[i];
      double phi = mollifier_bump(v);
      double t = 1.0 - v * v;
      double dphi = t > 1e-14 ? -2.0 * v * phi / (t * t) : 0.0;
      s += w[i] * (phi + v * dphi) * interpolate_quintic(f, g, a - step * v);
    }
    out[j] = -(mollifier_eta_prime(a) / mollifier_eta(a)) * s;
  }
  return out;
}

}  // namespace crestwave
