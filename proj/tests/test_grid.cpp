#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crestwave/grid.hpp"

#include <cmath>

using namespace crestwave;

TEST_CASE("grid nodes avoid endpoints and weights are the parabola") {
  WeightedGrid g = make_grid(64);
  CHECK(g.n == 64);
  CHECK(g.h == doctest::Approx(2.0 * kPi / 64));
  CHECK(g.nodes[0] == doctest::Approx(-kPi + 0.5 * g.h));
  CHECK(g.nodes[63] == doctest::Approx(kPi - 0.5 * g.h));
  for (int j = 0; j < g.n; ++j) {
    double a = g.nodes[j];
    CHECK(g.weights_m[j] == doctest::Approx((kPi + a) * (kPi - a)));
    CHECK(g.weights_m[j] > 0.0);
  }
}

TEST_CASE("periodic derivative is spectrally exact on band-limited fields") {
  WeightedGrid g = make_grid(128);
  VectorXd f(g.n), df(g.n);
  for (int j = 0; j < g.n; ++j) {
    f[j] = std::sin(3.0 * g.nodes[j]) + 0.5 * std::cos(7.0 * g.nodes[j]);
    df[j] = 3.0 * std::cos(3.0 * g.nodes[j]) - 3.5 * std::sin(7.0 * g.nodes[j]);
  }
  VectorXd d = derivative_periodic(f, g);
  CHECK((d - df).lpNorm<Eigen::Infinity>() < 1e-11);
}

TEST_CASE("one-sided derivative handles non-periodic smooth fields at 6th order") {
  auto err_at = [](int n) {
    WeightedGrid g = make_grid(n);
    VectorXd f(n), df(n);
    for (int j = 0; j < n; ++j) {
      f[j] = std::exp(0.3 * g.nodes[j]);
      df[j] = 0.3 * f[j];
    }
    return (derivative_onesided(f, g) - df).lpNorm<Eigen::Infinity>();
  };
  double e1 = err_at(64), e2 = err_at(128);
  CHECK(e1 / e2 > 30.0);  // ~2^6 up to constants
}

TEST_CASE("weighted L2 norm matches a closed-form integral") {
  // int m(a)^{2*0.5} da = int (pi^2 - a^2) da = 4 pi^3 / 3 over (-pi, pi)
  WeightedGrid g = make_grid(4096);
  VectorXd one = VectorXd::Ones(g.n);
  double nrm = weighted_l2_norm(one, 0.5, g);
  CHECK(nrm == doctest::Approx(std::sqrt(4.0 * kPi * kPi * kPi / 3.0)).epsilon(1e-6));
}

TEST_CASE("L-scale and H-scale norms agree at k = 0 exponent alignment") {
  WeightedGrid g = make_grid(256);
  FieldRng rng(11);
  VectorXd f = g.weights_m.cwiseProduct(random_band_limited(rng, 6, 2.0, g));
  SpaceParams p = make_space_params(1, 0.25);
  // for k = 1 the L-scale puts f at gamma - 1 and f' at gamma; H keeps both at gamma
  double L = sobolev_norm_L(f, p, g);
  double H = sobolev_norm_H(f, p, g);
  CHECK(std::isfinite(L));
  CHECK(std::isfinite(H));
  CHECK(L >= H * 0.1);  // the weaker weight on f makes L larger on m-flat fields
}

TEST_CASE("jump decomposition reproduces one-sided polynomial data") {
  WeightedGrid g = make_grid(512);
  SpaceParams p = make_space_params(2, 0.25);
  CHECK(jump_degree(p) >= 0);
  VectorXd f(g.n);
  for (int j = 0; j < g.n; ++j) {
    double a = g.nodes[j];
    f[j] = 1.5 * chi_plus_at(a) - 0.7 * (1.0 - chi_plus_at(a)) +
           g.weights_m[j] * g.weights_m[j] * std::sin(a) / 50.0;
  }
  JumpDecomposition d = decompose_jump(f, p, g);
  CHECK(d.coeffs_plus[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(d.coeffs_minus[0] == doctest::Approx(-0.7).epsilon(1e-6));
  VectorXd back = reconstruct_jump(d, g);
  CHECK((back - f).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("chi partition of unity") {
  WeightedGrid g = make_grid(100);
  VectorXd cp = chi_plus(g), cm = chi_minus(g);
  for (int j = 0; j < g.n; ++j) {
    CHECK(cp[j] + cm[j] == doctest::Approx(1.0));
    CHECK(cp[j] >= 0.0);
    CHECK(cp[j] <= 1.0);
  }
  CHECK(cp[0] == doctest::Approx(1.0));
  CHECK(cp[g.n - 1] == doctest::Approx(0.0));
}

TEST_CASE("rng is deterministic across instances with the same seed") {
  FieldRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  WeightedGrid g = make_grid(32);
  FieldRng c(7), d(7);
  VectorXd f1 = random_band_limited(c, 8, 1.5, g);
  VectorXd f2 = random_band_limited(d, 8, 1.5, g);
  CHECK((f1 - f2).lpNorm<Eigen::Infinity>() == 0.0);
}
