#include "crestwave/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <cstring>

namespace crestwave {

WeightedGrid make_grid(int n) {
  if (n < 16 || n % 2 != 0) throw config_error("make_grid: n must be even and >= 16");
  WeightedGrid g;
  g.n = n;
  g.h = 2.0 * kPi / n;
  g.nodes.resize(n);
  g.weights_m.resize(n);
  g.quad = VectorXd::Constant(n, g.h);
  for (int j = 0; j < n; ++j) {
    double a = -kPi + (j + 0.5) * g.h;
    g.nodes[j] = a;
    g.weights_m[j] = (kPi + a) * (kPi - a);
  }
  return g;
}

SpaceParams make_space_params(int k, double beta, double gamma) {
  if (k < 1) throw config_error("make_space_params: k must be >= 1");
  if (!(beta > -0.5 && beta <= 0.5)) throw config_error("make_space_params: beta outside (-1/2, 1/2]");
  SpaceParams p;
  p.k = k;
  p.beta = beta;
  p.gamma = gamma;
  p.lambda_half = beta + k - 1 + 0.25;
  p.lambda_gamma = 0.5 - gamma;
  return p;
}

SpaceParams make_space_params(int k, double beta) {
  return make_space_params(k, beta, beta + k - 1);
}

double chi_plus_at(double alpha) { return 0.5 * (1.0 - std::tanh(4.0 * alpha)); }

VectorXd chi_plus(const WeightedGrid& g) {
  VectorXd c(g.n);
  for (int j = 0; j < g.n; ++j) c[j] = chi_plus_at(g.nodes[j]);
  return c;
}

VectorXd chi_minus(const WeightedGrid& g) {
  return VectorXd::Ones(g.n) - chi_plus(g);
}

VectorXcd derivative_periodic(const VectorXcd& f, const WeightedGrid& g) {
  const int n = g.n;
  if (f.size() != n) throw config_error("derivative_periodic: size mismatch");
  Eigen::FFT<double> fft;
  std::vector<cplx> in(f.data(), f.data() + n), coef(n);
  fft.fwd(coef, in);
  for (int k = 0; k < n; ++k) {
    int kk = (k <= n / 2) ? k : k - n;
    if (k == n / 2) kk = 0;  // drop the unpaired Nyquist mode
    coef[k] *= cplx(0.0, double(kk));
  }
  std::vector<cplx> out(n);
  fft.inv(out, coef);
  VectorXcd r(n);
  for (int j = 0; j < n; ++j) r[j] = out[j];
  return r;
}

VectorXd derivative_periodic(const VectorXd& f, const WeightedGrid& g) {
  VectorXcd fc = f.cast<cplx>();
  return derivative_periodic(fc, g).real();
}

namespace {

// Fornberg finite-difference weights for the m-th derivative at x0 on nodes x.
MatrixXd fornberg_weights(double x0, const VectorXd& x, int m) {
  const int nd = int(x.size());
  MatrixXd c = MatrixXd::Zero(nd, m + 1);
  double c1 = 1.0, c4 = x[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < nd; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

// First-derivative weights on a 7-point uniform window, evaluated at offset p.
const MatrixXd& stencil_table() {
  static const MatrixXd table = [] {
    VectorXd x(7);
    for (int i = 0; i < 7; ++i) x[i] = i;
    MatrixXd t(7, 7);
    for (int p = 0; p < 7; ++p) t.row(p) = fornberg_weights(double(p), x, 1).col(1).transpose();
    return t;
  }();
  return table;
}

template <typename Vec>
Vec fd_derivative_impl(const Vec& f, double h) {
  const int n = int(f.size());
  if (n < 7) throw config_error("fd derivative: need at least 7 samples");
  const MatrixXd& t = stencil_table();
  Vec r(n);
  for (int j = 0; j < n; ++j) {
    int base = std::min(std::max(j - 3, 0), n - 7);
    int p = j - base;
    typename Vec::Scalar acc{};
    for (int i = 0; i < 7; ++i) acc += t(p, i) * f[base + i];
    r[j] = acc / h;
  }
  return r;
}

}  // namespace

VectorXd fd_derivative_uniform(const VectorXd& f, double h) {
  return fd_derivative_impl(f, h);
}

MatrixXd fd_derivative_matrix(int n, double h) {
  if (n < 7) throw config_error("fd_derivative_matrix: need n >= 7");
  const MatrixXd& t = stencil_table();
  MatrixXd d = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    int base = std::min(std::max(j - 3, 0), n - 7);
    for (int i = 0; i < 7; ++i) d(j, base + i) = t(j - base, i) / h;
  }
  return d;
}

VectorXd derivative_onesided(const VectorXd& f, const WeightedGrid& g) {
  if (f.size() != g.n) throw config_error("derivative_onesided: size mismatch");
  return fd_derivative_impl(f, g.h);
}

VectorXcd derivative_onesided(const VectorXcd& f, const WeightedGrid& g) {
  if (f.size() != g.n) throw config_error("derivative_onesided: size mismatch");
  return fd_derivative_impl(f, g.h);
}

double weighted_l2_norm(const VectorXd& f, double gamma, const WeightedGrid& g) {
  if (f.size() != g.n) throw config_error("weighted_l2_norm: size mismatch");
  if (!f.allFinite()) throw numeric_error("weighted_l2_norm: non-finite field");
  double s = 0.0;
  for (int j = 0; j < g.n; ++j)
    s += std::pow(g.weights_m[j], 2.0 * gamma) * f[j] * f[j] * g.quad[j];
  return std::sqrt(s);
}

double weighted_l2_norm(const VectorXcd& f, double gamma, const WeightedGrid& g) {
  if (f.size() != g.n) throw config_error("weighted_l2_norm: size mismatch");
  if (!f.allFinite()) throw numeric_error("weighted_l2_norm: non-finite field");
  double s = 0.0;
  for (int j = 0; j < g.n; ++j)
    s += std::pow(g.weights_m[j], 2.0 * gamma) * std::norm(f[j]) * g.quad[j];
  return std::sqrt(s);
}

namespace {

template <typename Vec>
double sobolev_impl(const Vec& f, const SpaceParams& p, const WeightedGrid& g, bool lscale) {
  Vec d = f;
  double s = 0.0;
  for (int j = 0; j <= p.k; ++j) {
    double expo = lscale ? p.gamma + j - p.k : p.gamma;
    double nj = weighted_l2_norm(d, expo, g);
    s += nj * nj;
    if (j < p.k) d = derivative_onesided(d, g);
  }
  return std::sqrt(s);
}

}  // namespace

double sobolev_norm_L(const VectorXd& f, const SpaceParams& p, const WeightedGrid& g) {
  return sobolev_impl(f, p, g, true);
}
double sobolev_norm_H(const VectorXd& f, const SpaceParams& p, const WeightedGrid& g) {
  return sobolev_impl(f, p, g, false);
}
double sobolev_norm_L(const VectorXcd& f, const SpaceParams& p, const WeightedGrid& g) {
  return sobolev_impl(f, p, g, true);
}
double sobolev_norm_H(const VectorXcd& f, const SpaceParams& p, const WeightedGrid& g) {
  return sobolev_impl(f, p, g, false);
}

int jump_degree(const SpaceParams& p) {
  // largest integer l < k with gamma + l - k < -1/2
  double bound = p.k - p.gamma - 0.5;
  int l = int(std::ceil(bound)) - 1;
  if (double(l) >= bound) --l;  // strict inequality
  l = std::min(l, p.k - 1);
  return l;
}

JumpDecomposition decompose_jump(const VectorXd& f, const SpaceParams& p,
                                 const WeightedGrid& g) {
  if (f.size() != g.n) throw config_error("decompose_jump: size mismatch");
  JumpDecomposition d;
  d.cutoff = chi_plus(g);
  int l = jump_degree(p);
  if (l < 0) {
    d.regular = f;
    return d;
  }
  const int ncoef = l + 1;
  const int extra = 3;  // absorb the regular part's own endpoint behavior
  const int nfit = std::max(2 * (ncoef + extra), 10);
  if (nfit > g.n / 3) throw config_error("decompose_jump: grid too coarse for fit");

  auto fit_side = [&](bool left) {
    // distance variable s = a + pi (left) or s = a - pi (right, signed)
    MatrixXd A(nfit, ncoef + extra);
    VectorXd b(nfit);
    double w = left ? (g.nodes[nfit - 1] + kPi) : (kPi - g.nodes[g.n - nfit]);
    for (int r = 0; r < nfit; ++r) {
      int j = left ? r : g.n - nfit + r;
      double s = left ? (g.nodes[j] + kPi) : (g.nodes[j] - kPi);
      double t = s / w;  // scaled for conditioning
      double tp = 1.0;
      for (int c = 0; c < ncoef + extra; ++c) {
        A(r, c) = tp;
        tp *= t;
      }
      b[r] = f[j];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    if (qr.rank() < ncoef + extra)
      throw numeric_error("decompose_jump: ill-conditioned endpoint fit");
    VectorXd coef = qr.solve(b);
    std::vector<double> out(ncoef);
    double wp = 1.0;
    for (int c = 0; c < ncoef; ++c) {
      out[c] = coef[c] / wp;  // undo scaling
      wp *= w;
    }
    return out;
  };

  d.coeffs_plus = fit_side(true);
  d.coeffs_minus = fit_side(false);
  VectorXd jump = VectorXd::Zero(g.n);
  for (int j = 0; j < g.n; ++j) {
    double sp = g.nodes[j] + kPi, sm = g.nodes[j] - kPi;
    double cp = d.cutoff[j], cm = 1.0 - cp;
    double pp = 1.0, pm = 1.0;
    for (int i = 0; i < ncoef; ++i) {
      jump[j] += d.coeffs_plus[i] * pp * cp + d.coeffs_minus[i] * pm * cm;
      pp *= sp;
      pm *= sm;
    }
  }
  d.regular = f - jump;
  return d;
}

VectorXd reconstruct_jump(const JumpDecomposition& d, const WeightedGrid& g) {
  VectorXd out = d.regular;
  int ncoef = int(d.coeffs_plus.size());
  for (int j = 0; j < g.n; ++j) {
    double sp = g.nodes[j] + kPi, sm = g.nodes[j] - kPi;
    double cp = d.cutoff.size() ? d.cutoff[j] : chi_plus_at(g.nodes[j]);
    double cm = 1.0 - cp;
    double pp = 1.0, pm = 1.0;
    for (int i = 0; i < ncoef; ++i) {
      out[j] += d.coeffs_plus[i] * pp * cp + d.coeffs_minus[i] * pm * cm;
      pp *= sp;
      pm *= sm;
    }
  }
  return out;
}

// xoshiro256** -- fixed algorithm so seeded streams are identical everywhere.
namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

FieldRng::FieldRng(std::uint64_t seed) {
  // splitmix64 expansion of the seed
  std::uint64_t z = seed;
  for (int i = 0; i < 4; ++i) {
    z += 0x9e3779b97f4a7c15ULL;
    std::uint64_t t = z;
    t = (t ^ (t >> 30)) * 0xbf58476d1ce4e5b9ULL;
    t = (t ^ (t >> 27)) * 0x94d049bb133111ebULL;
    s_[i] = t ^ (t >> 31);
  }
}

std::uint64_t FieldRng::raw() {
  std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double FieldRng::uniform() {
  return double(raw() >> 11) * 0x1.0p-53;
}

double FieldRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0, u2;
  while (u1 <= 1e-300) u1 = uniform();
  u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

VectorXd random_band_limited(FieldRng& rng, int bandwidth, double decay,
                             const WeightedGrid& g) {
  VectorXd f = VectorXd::Zero(g.n);
  for (int k = 1; k <= bandwidth; ++k) {
    double a = rng.normal() / std::pow(double(k), decay);
    double b = rng.normal() / std::pow(double(k), decay);
    for (int j = 0; j < g.n; ++j)
      f[j] += a * std::cos(k * g.nodes[j]) + b * std::sin(k * g.nodes[j]);
  }
  return f;
}

}  // namespace crestwave
