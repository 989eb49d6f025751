#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crestwave/corner_laplace.hpp"
#include "crestwave/interface.hpp"

#include <cmath>

using namespace crestwave;

namespace {

CurveSamples clockwise_circle(const WeightedGrid& g) {
  CurveSamples c;
  c.z.resize(g.n);
  c.z_alpha.resize(g.n);
  for (int j = 0; j < g.n; ++j) {
    c.z[j] = std::exp(cplx(0, -g.nodes[j]));
    c.z_alpha[j] = cplx(0, -1) * c.z[j];
  }
  return c;
}

}  // namespace

TEST_CASE("disk map reproduces the mode eigenvalues") {
  WeightedGrid g = make_grid(256);
  CurveSamples c = clockwise_circle(g);
  DtnSolver solver(c, g);
  for (int k = 1; k <= 8; ++k) {
    VectorXd psi(g.n);
    for (int j = 0; j < g.n; ++j) psi[j] = std::cos(k * (-g.nodes[j]));
    VectorXd out = solver.apply(psi);
    double err = (out - double(k) * psi).lpNorm<Eigen::Infinity>() / k;
    CHECK(err < 1e-3);
  }
}

TEST_CASE("constants map to zero and the flux integral vanishes") {
  WeightedGrid g = make_grid(256);
  CornerInterface iface = make_corner_fixture(0.9, 0.1, g);
  CurveSamples c = reconstruct_curve(iface, g).curve;
  DtnSolver solver(c, g);
  VectorXd one = VectorXd::Ones(g.n);
  CHECK(solver.apply(one).lpNorm<Eigen::Infinity>() < 1e-8);
  FieldRng rng(4);
  VectorXd psi = g.weights_m.cwiseProduct(random_band_limited(rng, 6, 2.0, g));
  VectorXd out = solver.apply(psi);
  double flux = 0.0;
  for (int j = 0; j < g.n; ++j) flux += out[j] * std::abs(c.z_alpha[j]) * g.h;
  double scale = out.lpNorm<Eigen::Infinity>();
  // one-sided differentiation does not telescope exactly, so the discrete
  // flux vanishes only to discretization accuracy
  CHECK(std::abs(flux) < 1e-4 * std::max(1.0, scale));
}

TEST_CASE("map is symmetric in the boundary pairing") {
  WeightedGrid g = make_grid(256);
  CornerInterface iface = make_corner_fixture(0.9, 0.1, g);
  CurveSamples c = reconstruct_curve(iface, g).curve;
  DtnSolver solver(c, g);
  FieldRng rng(8);
  VectorXd f = g.weights_m.cwiseProduct(random_band_limited(rng, 5, 2.0, g));
  VectorXd w = g.weights_m.cwiseProduct(random_band_limited(rng, 5, 2.0, g));
  double lhs = 0.0, rhs = 0.0;
  VectorXd Gf = solver.apply(f), Gw = solver.apply(w);
  for (int j = 0; j < g.n; ++j) {
    double ds = std::abs(c.z_alpha[j]) * g.h;
    lhs += Gf[j] * w[j] * ds;
    rhs += f[j] * Gw[j] * ds;
  }
  double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  CHECK(std::abs(lhs - rhs) / scale < 1e-4);
}

TEST_CASE("wedge tables are the constant-angle strip") {
  double two_nu = 0.8;
  DiffeoTables t = exact_wedge_tables(two_nu, 5.0, 0.0, 200);
  CHECK(t.two_nu == doctest::Approx(two_nu));
  for (int i : {0, 50, 199}) {
    CHECK(t.theta_p[i] == doctest::Approx(0.5));
    CHECK(t.theta_m[i] == doctest::Approx(-0.5));
    CHECK(t.dtheta_p[i] == doctest::Approx(0.0));
    CHECK(t.dtheta_m[i] == doctest::Approx(0.0));
  }
  double a11, a12, a22;
  strip_coefficients(t, -2.0, 0.1, a11, a12, a22);
  CHECK(a11 == doctest::Approx(1.0));
  CHECK(a12 == doctest::Approx(0.0));
  CHECK(a22 == doctest::Approx(1.0));
}

TEST_CASE("strip coefficients have unit determinant and SPD window on the fixture") {
  WeightedGrid g = make_grid(512);
  CornerInterface iface = make_corner_fixture(0.9, 0.1, g);
  CurveSamples c = reconstruct_curve(iface, g).curve;
  DiffeoTables t = build_diffeo(c, g, 6.0, 400);
  double nu = 0.5 * t.two_nu;
  for (double xq : {t.x[0] + 0.5, -3.0, t.x_max - 0.5})
    for (double y : {-0.8 * nu, 0.0, 0.8 * nu}) {
      double a11, a12, a22;
      strip_coefficients(t, xq, y, a11, a12, a22);
      CHECK(a11 > 0.0);
      double det = a11 * a22 - a12 * a12;
      CHECK(det == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("inverse map matches a finite-difference Jacobian determinant") {
  WeightedGrid g = make_grid(512);
  CornerInterface iface = make_corner_fixture(0.9, 0.1, g);
  CurveSamples c = reconstruct_curve(iface, g).curve;
  DiffeoTables t = build_diffeo(c, g, 6.0, 400);
  double nu = 0.5 * t.two_nu;
  for (double xq : {-4.0, -2.5})
    for (double y : {-0.4 * nu, 0.3 * nu}) {
      double eps = 1e-5;
      cplx zx = (t.to_physical(xq + eps, y) - t.to_physical(xq - eps, y)) / (2 * eps);
      cplx zy = (t.to_physical(xq, y + eps) - t.to_physical(xq, y - eps)) / (2 * eps);
      double jac_fd = zx.real() * zy.imag() - zx.imag() * zy.real();
      // analytic: the physical angle is linear in y with slope Theta_+ - Theta_-,
      // so |det D h^{-1}| = e^{2x} (Theta_+ - Theta_-)
      double tp, tm, dtp, dtm;
      t.eval(xq, tp, tm, dtp, dtm);
      double jac = std::exp(2.0 * xq) * (tp - tm);
      CHECK(std::abs(jac_fd) == doctest::Approx(std::abs(jac)).epsilon(1e-4));
    }
}

TEST_CASE("separable wedge mode solves the strip problem exactly to 2nd order") {
  double nu = kPi / 8.0;
  double mu = kPi / (4.0 * nu);  // = 2, harmonic r^2 cos(2 theta)
  auto run = [&](int mx, int my) {
    DiffeoTables t = exact_wedge_tables(2.0 * nu, 5.0, 0.0, mx);
    auto top = [&](double x) { return std::exp(mu * x) * std::cos(mu * nu); };
    auto right = [&](double y) { return std::cos(mu * y); };
    StripSolution sol = solve_strip(
        t, my, [](double, double) { return 0.0; }, top, top, right);
    double err = 0.0;
    for (int i = 0; i < int(t.x.size()); ++i)
      for (int j = 0; j <= my; ++j)
        err = std::max(err, std::abs(sol.U(i, j) -
                                     std::exp(mu * t.x[i]) * std::cos(mu * sol.ys[j])));
    return err;
  };
  double e1 = run(128, 32), e2 = run(256, 64);
  CHECK(e1 < 2e-3);
  CHECK(e1 / e2 > 2.5);  // ~4x for 2nd order, some slack for boundary layers
}

TEST_CASE("zero data forces the zero solution") {
  DiffeoTables t = exact_wedge_tables(0.8, 4.0, 0.0, 100);
  auto zero = [](double) { return 0.0; };
  StripSolution sol = solve_strip(
      t, 24, [](double, double) { return 0.0; }, zero, zero, zero);
  CHECK(sol.U.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("manufactured source converges at 2nd order") {
  double nu = 0.4;
  const double L = 3.0;
  auto run = [&](int mx, int my) {
    DiffeoTables t = exact_wedge_tables(2.0 * nu, L, 0.0, mx);
    // exact U = (x + L)^2 + y^2: satisfies the homogeneous-flux condition
    // U_x(-L) = 0 at the left wall and -Lap U = -4 on the identity-coefficient
    // wedge
    auto rhs = [](double, double) { return -4.0; };
    auto top = [&](double x) { return (x + L) * (x + L) + nu * nu; };
    auto right = [&](double y) { return L * L + y * y; };
    StripSolution sol = solve_strip(t, my, rhs, top, top, right);
    double err = 0.0;
    for (int i = 0; i < int(t.x.size()); ++i)
      for (int j = 0; j <= my; ++j)
        err = std::max(err, std::abs(sol.U(i, j) - ((t.x[i] + L) * (t.x[i] + L) +
                                                    sol.ys[j] * sol.ys[j])));
    return err;
  };
  // second-order flux differences are exact on quadratics
  CHECK(run(96, 24) < 1e-10);

  // genuine convergence on a non-polynomial harmonic respecting the left wall
  auto run_h = [&](int mx, int my) {
    DiffeoTables t = exact_wedge_tables(2.0 * nu, L, 0.0, mx);
    auto exact = [&](double x, double y) { return std::cos(x + L) * std::cosh(y); };
    auto top = [&](double x) { return exact(x, nu); };
    auto right = [&](double y) { return exact(0.0, y); };
    StripSolution sol = solve_strip(
        t, my, [](double, double) { return 0.0; }, top, top, right);
    double err = 0.0;
    for (int i = 0; i < int(t.x.size()); ++i)
      for (int j = 0; j <= my; ++j)
        err = std::max(err, std::abs(sol.U(i, j) - exact(t.x[i], sol.ys[j])));
    return err;
  };
  double e1 = run_h(96, 24), e2 = run_h(192, 48);
  CHECK(e2 < e1);
  CHECK(e1 / e2 > 2.5);
}

TEST_CASE("wedge power harmonic has the closed-form conormal derivative") {
  double nu = kPi / 8.0;
  double mu = kPi / (4.0 * nu);
  DiffeoTables t = exact_wedge_tables(2.0 * nu, 6.0, 0.0, 256);
  auto top = [&](double x) { return std::exp(mu * x) * std::cos(mu * nu); };
  auto right = [&](double y) { return std::cos(mu * y); };
  StripExtension ext = harmonic_extension_strip(t, 64, top, top, right);
  // exact: d/dn psi at theta = nu is -mu r^{mu-1} sin(mu nu)
  int mx = int(t.x.size());
  double err = 0.0;
  for (int i = mx / 4; i < 3 * mx / 4; ++i) {
    double r = std::exp(t.x[i]);
    double expect = -mu * std::pow(r, mu - 1.0) * std::sin(mu * nu);
    err = std::max(err, std::abs(ext.dn_top[i] - expect) / std::pow(r, mu - 1.0));
  }
  CHECK(err < 1e-3);
}

TEST_CASE("quadratic closed form matches the hand-computed example") {
  // c_plus = c_minus = -1/2 at nu = pi/8: a_pm = -sqrt(2)/4
  QuadraticExtension q = quadratic_data_extension(0.0, 0.0, -0.5, -0.5, kPi / 8.0);
  CHECK(q.a_plus.real() == doctest::Approx(-std::sqrt(2.0) / 4.0).epsilon(1e-12));
  CHECK(q.a_plus.imag() == doctest::Approx(0.0));
  CHECK(std::abs(q.a_minus - std::conj(q.a_plus)) < 1e-14);
  // resonance guard: the angle parameter itself is invalid
  CHECK_THROWS_AS(quadratic_data_extension(0.0, 0.0, 1.0, 1.0, kPi / 4.0), config_error);
}

TEST_CASE("quadratic strip solve recovers the closed-form coefficient") {
  double nu = kPi / 8.0;
  QuadraticExtension q = quadratic_data_extension(0.0, 0.0, -0.5, -0.5, nu);
  DiffeoTables t = exact_wedge_tables(2.0 * nu, 6.0, 0.0, 256);
  auto top = [&](double x) { return -0.5 * std::exp(2.0 * x); };
  auto right = [&](double y) {
    return (q.a_plus * std::exp(cplx(0, 2.0 * y)) + q.a_minus * std::exp(cplx(0, -2.0 * y)))
        .real();
  };
  StripSolution sol = solve_strip(
      t, 64, [](double, double) { return 0.0; }, top, top, right);
  // read the coefficient off the center line y = 0: U = e^{2x} 2 Re(a_plus)
  int im = int(t.x.size()) / 2;
  double fit = sol.U(im, 32) / std::exp(2.0 * t.x[im]);
  CHECK(fit == doctest::Approx(2.0 * q.a_plus.real()).epsilon(2e-4));
}

TEST_CASE("grid-field extension agrees with the full-curve map away from the cap") {
  WeightedGrid g = make_grid(512);
  CornerInterface iface = make_corner_fixture(0.9, 0.05, g);
  CurveSamples c = reconstruct_curve(iface, g).curve;
  VectorXd psi(g.n);
  for (int j = 0; j < g.n; ++j) psi[j] = (c.z[j] - c.z_star).real();  // harmonic trace
  StripExtension ext = harmonic_extension(psi, c, g, build_diffeo(c, g, 6.0, 300), 48);
  CHECK(std::isfinite(ext.sol.residual));
  CHECK(ext.sol.residual < 1e-8);
  CHECK(ext.dn_top.allFinite());
  CHECK(ext.dn_bottom.allFinite());
}
