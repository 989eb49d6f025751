#include "crestwave/corner_laplace.hpp"

#include "crestwave/transforms.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace crestwave {

DtnSolver::DtnSolver(const CurveSamples& c, const WeightedGrid& g) : curve_(c), grid_(g) {
  const int n = g.n;
  MatrixXcd C = cauchy_matrix(c, g);
  // Row-sum correction: move the quadrature defect of the constant identity
  // C(1) = 1 into the diagonal. Near a corner the plain principal-value
  // diagonal carries an O(1) angle-dependent error; this repairs it without
  // touching the smooth part of the operator.
  for (int j = 0; j < n; ++j) C(j, j) += cplx(1.0, 0.0) - C.row(j).sum();
  // The conjugate trace solves (I - Re C) psi~ = (Im C) psi up to constants;
  // the rank-one mean term pins the constant and makes the system invertible.
  MatrixXd M = MatrixXd::Identity(n, n) - C.real();
  M.array() += 1.0 / n;
  B_ = C.imag();
  lu_.compute(M);
}

VectorXd DtnSolver::conjugate(const VectorXd& psi) const {
  if (psi.size() != grid_.n) throw config_error("DtnSolver: size mismatch");
  VectorXd x = lu_.solve(B_ * psi);
  x.array() -= x.mean();
  return x;
}

VectorXd DtnSolver::apply(const VectorXd& psi) const {
  VectorXd conj_trace = conjugate(psi);
  VectorXd d = derivative_onesided(conj_trace, grid_);
  VectorXd out(grid_.n);
  for (int j = 0; j < grid_.n; ++j) out[j] = -d[j] / std::abs(curve_.z_alpha[j]);
  return out;
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t curve_key(const CurveSamples& c) {
  std::uint64_t h = 1469598103934665603ull;
  std::int64_t n = c.z.size();
  h = fnv1a(&n, sizeof n, h);
  h = fnv1a(c.z.data(), sizeof(cplx) * c.z.size(), h);
  h = fnv1a(c.z_alpha.data(), sizeof(cplx) * c.z_alpha.size(), h);
  return h;
}

}  // namespace

VectorXd dtn_apply(const VectorXd& psi, const CurveSamples& c, const WeightedGrid& g) {
  static std::mutex mtx;
  static std::map<std::uint64_t, std::shared_ptr<const DtnSolver>> cache;
  std::uint64_t key = curve_key(c);
  std::shared_ptr<const DtnSolver> solver;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) solver = it->second;
  }
  if (!solver) {
    solver = std::make_shared<const DtnSolver>(c, g);
    std::lock_guard<std::mutex> lock(mtx);
    if (cache.size() > 32) cache.clear();
    cache.emplace(key, solver);
  }
  return solver->apply(psi);
}

void DiffeoTables::eval(double xq, double& tp, double& tm, double& dtp, double& dtm) const {
  const int m = int(x.size());
  double s = (xq - x[0]) / hx;
  int base = std::clamp(int(std::floor(s)) - 1, 0, m - 4);
  double t = s - base;
  double w[4];
  w[0] = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  w[1] = t * (t - 2.0) * (t - 3.0) / 2.0;
  w[2] = -t * (t - 1.0) * (t - 3.0) / 2.0;
  w[3] = t * (t - 1.0) * (t - 2.0) / 6.0;
  tp = tm = dtp = dtm = 0.0;
  for (int k = 0; k < 4; ++k) {
    tp += w[k] * theta_p[base + k];
    tm += w[k] * theta_m[base + k];
    dtp += w[k] * dtheta_p[base + k];
    dtm += w[k] * dtheta_m[base + k];
  }
}

cplx DiffeoTables::to_physical(double xq, double y) const {
  double tp, tm, dtp, dtm;
  eval(xq, tp, tm, dtp, dtm);
  double nu = 0.5 * two_nu;
  double thp = frame_angle + two_nu * tp;
  double thm = frame_angle + two_nu * tm;
  double th = thm + ((y + nu) / two_nu) * (thp - thm);
  return z_star + std::exp(xq) * std::exp(cplx(0, th));
}

DiffeoTables exact_wedge_tables(double two_nu, double L, double x_max, int mx) {
  if (!(two_nu > 0.0 && two_nu < 2.0 * kPi)) throw config_error("exact_wedge_tables: angle");
  if (mx < 8 || x_max <= -L) throw config_error("exact_wedge_tables: mesh");
  DiffeoTables t;
  t.two_nu = two_nu;
  t.L = L;
  t.x_max = x_max;
  t.hx = (x_max + L) / (mx - 1);
  t.x.resize(mx);
  for (int i = 0; i < mx; ++i) t.x[i] = -L + i * t.hx;
  t.theta_p = VectorXd::Constant(mx, 0.5);
  t.theta_m = VectorXd::Constant(mx, -0.5);
  t.dtheta_p = VectorXd::Zero(mx);
  t.dtheta_m = VectorXd::Zero(mx);
  return t;
}

namespace {

// 4-point Lagrange on a strictly increasing nonuniform table
double table_interp(const std::vector<double>& xs, const std::vector<double>& ys, double xq) {
  const int m = int(xs.size());
  int hi = int(std::upper_bound(xs.begin(), xs.end(), xq) - xs.begin());
  int base = std::clamp(hi - 2, 0, m - 4);
  double out = 0.0;
  for (int k = 0; k < 4; ++k) {
    double w = 1.0;
    for (int l = 0; l < 4; ++l) {
      if (l == k) continue;
      w *= (xq - xs[base + l]) / (xs[base + k] - xs[base + l]);
    }
    out += w * ys[base + k];
  }
  return out;
}

}  // namespace

DiffeoTables build_diffeo(const CurveSamples& c, const WeightedGrid& g, double L, int mx) {
  const int n = g.n;
  if (c.z.size() != n || c.z_alpha.size() != n) throw config_error("build_diffeo: size mismatch");
  if (L <= 0.0 || mx < 8) throw config_error("build_diffeo: mesh parameters");
  const double two_pi = 2.0 * kPi;

  // corner ray directions: outgoing tangent on the first arc, reversed
  // incoming tangent on the second
  double a_up = std::arg(c.z_alpha[0]);
  double a_lo = std::arg(-c.z_alpha[n - 1]);
  while (a_lo >= a_up) a_lo -= two_pi;
  while (a_up - a_lo > two_pi) a_lo += two_pi;
  double two_nu = a_up - a_lo;
  double frame = 0.5 * (a_up + a_lo);

  auto trace_arc = [&](bool upper, double asym, std::vector<double>& r, std::vector<double>& th,
                       std::vector<double>& al) {
    r.assign(1, 0.0);
    th.assign(1, asym);
    al.assign(1, upper ? -kPi : kPi);
    double prev_r = 0.0, prev_th = asym;
    for (int s = 0; s < n; ++s) {
      int j = upper ? s : n - 1 - s;
      cplx w = c.z[j] - c.z_star;
      double rj = std::abs(w);
      if (rj <= prev_r) break;
      double a = std::arg(w);
      a += two_pi * std::round((prev_th - a) / two_pi);
      r.push_back(rj);
      th.push_back(a);
      al.push_back(g.nodes[j]);
      prev_r = rj;
      prev_th = a;
    }
    if (int(r.size()) < 9)
      throw numeric_error("build_diffeo: arc radius not monotone near the corner");
  };

  std::vector<double> r_up, th_up, al_up, r_lo, th_lo, al_lo;
  trace_arc(true, a_up, r_up, th_up, al_up);
  trace_arc(false, a_lo, r_lo, th_lo, al_lo);

  double r_cap = std::min(r_up.back(), r_lo.back());
  double x_max = std::log(0.75 * r_cap);
  if (x_max <= -L) throw config_error("build_diffeo: truncation length exceeds arc extent");

  DiffeoTables t;
  t.two_nu = two_nu;
  t.L = L;
  t.x_max = x_max;
  t.frame_angle = frame;
  t.z_star = c.z_star;
  t.hx = (x_max + L) / (mx - 1);
  t.x.resize(mx);
  t.theta_p.resize(mx);
  t.theta_m.resize(mx);
  t.alpha_p.resize(mx);
  t.alpha_m.resize(mx);
  for (int i = 0; i < mx; ++i) {
    double x = -L + i * t.hx;
    double r = std::exp(x);
    t.x[i] = x;
    t.theta_p[i] = (table_interp(r_up, th_up, r) - frame) / two_nu;
    t.theta_m[i] = (table_interp(r_lo, th_lo, r) - frame) / two_nu;
    t.alpha_p[i] = table_interp(r_up, al_up, r);
    t.alpha_m[i] = table_interp(r_lo, al_lo, r);
    if (t.theta_p[i] - t.theta_m[i] <= 0.0)
      throw numeric_error("build_diffeo: degenerate angular width");
  }
  t.dtheta_p = fd_derivative_uniform(t.theta_p, t.hx);
  t.dtheta_m = fd_derivative_uniform(t.theta_m, t.hx);
  return t;
}

void strip_coefficients(const DiffeoTables& t, double xq, double y, double& a11, double& a12,
                        double& a22) {
  double tp, tm, dtp, dtm;
  t.eval(xq, tp, tm, dtp, dtm);
  double nu = 0.5 * t.two_nu;
  double width = tp - tm;
  double Y = (y - nu) * dtm - (y + nu) * dtp;
  a11 = width;
  a12 = Y;
  a22 = (Y * Y + 1.0) / width;
}

StripSolution solve_strip(const DiffeoTables& t, int my, const StripFunc2& rhs,
                          const StripFunc& bottom, const StripFunc& top,
                          const StripFunc& right) {
  const int mx = int(t.x.size());
  if (my < 8) throw config_error("solve_strip: my too small");
  const double nu = 0.5 * t.two_nu;
  const double hx = t.hx;
  const double hy = t.two_nu / my;

  StripSolution sol;
  sol.xs = t.x;
  sol.ys.resize(my + 1);
  for (int j = 0; j <= my; ++j) sol.ys[j] = -nu + j * hy;

  // SPD window check at the nodes
  for (int i = 0; i < mx; ++i)
    for (int j = 0; j <= my; ++j) {
      double a11, a12, a22;
      strip_coefficients(t, sol.xs[i], sol.ys[j], a11, a12, a22);
      double det = a11 * a22 - a12 * a12;
      if (!(a11 > 0.0 && det > 0.5 && det < 2.0))
        throw numeric_error("solve_strip: coefficients outside the elliptic window");
    }

  // unknowns: i = 0..mx-2 (Dirichlet at i = mx-1), j = 1..my-1
  const int ni = mx - 1, nj = my - 1;
  const int N = ni * nj;
  auto idx = [&](int i, int j) { return i * nj + (j - 1); };

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(std::size_t(N) * 9);
  VectorXd b(N);

  auto boundary_value = [&](int i, int j) -> double {
    if (j == 0) return bottom(sol.xs[i]);
    if (j == my) return top(sol.xs[i]);
    return right(sol.ys[j]);
  };

  for (int i = 0; i < ni; ++i) {
    for (int j = 1; j < my; ++j) {
      const int row = idx(i, j);
      double rv = rhs(sol.xs[i], sol.ys[j]);
      auto add = [&](int ii, int jj, double coef) {
        if (coef == 0.0) return;
        if (jj == 0 || jj == my || ii == mx - 1)
          rv -= coef * boundary_value(ii, jj);
        else
          trips.emplace_back(row, idx(ii, jj), coef);
      };
      // flux through the four faces of the dual cell; zero conormal flux at
      // the left face of the i = 0 column realizes the Neumann condition
      struct Face {
        double a11, a12, a22;
      };
      auto coeff = [&](double x, double y) {
        Face f;
        strip_coefficients(t, x, y, f.a11, f.a12, f.a22);
        return f;
      };
      // east face; at i = 0 the west face is its mirror image through the
      // reflecting wall, which doubles the normal flux difference and cancels
      // the tangential terms
      {
        Face f = coeff(sol.xs[i] + 0.5 * hx, sol.ys[j]);
        double scale = (i == 0) ? 2.0 : 1.0;
        double cn = scale * f.a11 / (hx * hx);
        add(i + 1, j, -cn);
        add(i, j, cn);
        if (i > 0) {
          double ct = f.a12 / (4.0 * hx * hy);
          add(i, j + 1, -ct);
          add(i + 1, j + 1, -ct);
          add(i, j - 1, ct);
          add(i + 1, j - 1, ct);
        }
      }
      // west face
      if (i > 0) {
        Face f = coeff(sol.xs[i] - 0.5 * hx, sol.ys[j]);
        double cn = f.a11 / (hx * hx);
        add(i - 1, j, -cn);
        add(i, j, cn);
        double ct = f.a12 / (4.0 * hx * hy);
        add(i, j + 1, ct);
        add(i - 1, j + 1, ct);
        add(i, j - 1, -ct);
        add(i - 1, j - 1, -ct);
      }
      // north face
      {
        Face f = coeff(sol.xs[i], sol.ys[j] + 0.5 * hy);
        double cn = f.a22 / (hy * hy);
        add(i, j + 1, -cn);
        add(i, j, cn);
        double ct = f.a12 / (4.0 * hx * hy);
        // at the reflecting left wall U is even in x, so the mirrored
        // tangential term cancels
        if (i > 0) {
          add(i + 1, j, -ct);
          add(i + 1, j + 1, -ct);
          add(i - 1, j, ct);
          add(i - 1, j + 1, ct);
        }
      }
      // south face
      {
        Face f = coeff(sol.xs[i], sol.ys[j] - 0.5 * hy);
        double cn = f.a22 / (hy * hy);
        add(i, j - 1, -cn);
        add(i, j, cn);
        double ct = f.a12 / (4.0 * hx * hy);
        if (i > 0) {
          add(i + 1, j, ct);
          add(i + 1, j - 1, ct);
          add(i - 1, j, -ct);
          add(i - 1, j - 1, -ct);
        }
      }
      b[row] = rv;
    }
  }

  Eigen::SparseMatrix<double> S(N, N);
  S.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(S);
  if (lu.info() != Eigen::Success)
    throw numeric_error("solve_strip: sparse factorization failed");
  VectorXd u = lu.solve(b);
  double scale = 1.0 + b.lpNorm<Eigen::Infinity>();
  sol.residual = (S * u - b).lpNorm<Eigen::Infinity>() / scale;
  if (sol.residual > 1e-8) throw numeric_error("solve_strip: discrete residual too large");

  sol.U.resize(mx, my + 1);
  for (int i = 0; i < mx; ++i) {
    sol.U(i, 0) = bottom(sol.xs[i]);
    sol.U(i, my) = top(sol.xs[i]);
  }
  for (int j = 1; j < my; ++j) {
    sol.U(mx - 1, j) = right(sol.ys[j]);
    for (int i = 0; i < ni; ++i) sol.U(i, j) = u[idx(i, j)];
  }
  return sol;
}

StripExtension harmonic_extension_strip(const DiffeoTables& t, int my, const StripFunc& bottom,
                                        const StripFunc& top, const StripFunc& right) {
  if (my < 8) throw config_error("harmonic_extension_strip: my too small");
  StripExtension ext;
  ext.sol = solve_strip(
      t, my, [](double, double) { return 0.0; }, bottom, top, right);
  const int mx = int(t.x.size());
  const double hy = t.two_nu / my;
  const MatrixXd& U = ext.sol.U;

  VectorXd top_row(mx), bot_row(mx);
  for (int i = 0; i < mx; ++i) {
    top_row[i] = U(i, my);
    bot_row[i] = U(i, 0);
  }
  VectorXd top_dx = fd_derivative_uniform(top_row, t.hx);
  VectorXd bot_dx = fd_derivative_uniform(bot_row, t.hx);

  ext.dn_top.resize(mx);
  ext.dn_bottom.resize(mx);
  for (int i = 0; i < mx; ++i) {
    double tp, tm, dtp, dtm;
    t.eval(t.x[i], tp, tm, dtp, dtm);
    double a11, a12, a22;
    double nu = 0.5 * t.two_nu;
    // top arc
    strip_coefficients(t, t.x[i], nu, a11, a12, a22);
    double uy_top = (25.0 / 12.0 * U(i, my) - 4.0 * U(i, my - 1) + 3.0 * U(i, my - 2) -
                     4.0 / 3.0 * U(i, my - 3) + 0.25 * U(i, my - 4)) /
                    hy;
    double jac_top = std::exp(t.x[i]) * std::sqrt(1.0 + std::pow(t.two_nu * dtp, 2));
    ext.dn_top[i] = (a12 * top_dx[i] + a22 * uy_top) / jac_top;
    // bottom arc, outward normal points toward -y
    strip_coefficients(t, t.x[i], -nu, a11, a12, a22);
    double uy_bot = (-25.0 / 12.0 * U(i, 0) + 4.0 * U(i, 1) - 3.0 * U(i, 2) +
                     4.0 / 3.0 * U(i, 3) - 0.25 * U(i, 4)) /
                    hy;
    double jac_bot = std::exp(t.x[i]) * std::sqrt(1.0 + std::pow(t.two_nu * dtm, 2));
    ext.dn_bottom[i] = -(a12 * bot_dx[i] + a22 * uy_bot) / jac_bot;
  }
  return ext;
}

StripExtension harmonic_extension(const VectorXd& psi, const CurveSamples& c,
                                  const WeightedGrid& g, const DiffeoTables& t, int my) {
  if (psi.size() != g.n) throw config_error("harmonic_extension: size mismatch");
  if (t.alpha_p.size() != t.x.size())
    throw config_error("harmonic_extension: tables lack curve pullback data");
  (void)c;
  const int mx = int(t.x.size());
  auto top_v = std::make_shared<VectorXd>(mx);
  auto bot_v = std::make_shared<VectorXd>(mx);
  for (int i = 0; i < mx; ++i) {
    (*top_v)[i] = interpolate_quintic(psi, g, t.alpha_p[i]);
    (*bot_v)[i] = interpolate_quintic(psi, g, t.alpha_m[i]);
  }
  double x0 = t.x[0], hx = t.hx;
  auto node_of = [x0, hx, mx](double x) {
    return std::clamp(int(std::lround((x - x0) / hx)), 0, mx - 1);
  };
  double nu = 0.5 * t.two_nu;
  StripFunc bottom = [bot_v, node_of](double x) { return (*bot_v)[node_of(x)]; };
  StripFunc top = [top_v, node_of](double x) { return (*top_v)[node_of(x)]; };
  StripFunc right = [bot_v, top_v, nu, mx](double y) {
    double fr = (y + nu) / (2.0 * nu);
    return (*bot_v)[mx - 1] + fr * ((*top_v)[mx - 1] - (*bot_v)[mx - 1]);
  };
  return harmonic_extension_strip(t, my, bottom, top, right);
}

QuadraticExtension quadratic_data_extension(cplx c0, cplx c1, double c_plus, double c_minus,
                                            double nu) {
  (void)c0;  // constants extend harmonically with zero normal derivative
  double s4 = std::sin(4.0 * nu);
  if (std::abs(s4) < 1e-10)
    throw config_error("quadratic_data_extension: resonant angle, sin(4 nu) = 0");
  cplx e2 = std::exp(cplx(0, 2.0 * nu));
  cplx den = e2 * e2 - std::conj(e2 * e2);  // e^{4i nu} - e^{-4i nu}
  QuadraticExtension q;
  q.a_plus = (c_plus * e2 - c_minus * std::conj(e2)) / den;
  q.a_minus = (c_minus * e2 - c_plus * std::conj(e2)) / den;
  double c4 = std::cos(4.0 * nu);
  q.slope_plus = (2.0 / s4) * (c_plus * c4 - c_minus);
  q.slope_minus = (2.0 / s4) * (c_minus * c4 - c_plus);
  q.lin_plus = -(c1 * std::exp(cplx(0, nu))).imag();
  q.lin_minus = -(c1 * std::exp(cplx(0, -nu))).imag();
  return q;
}

}  // namespace crestwave
