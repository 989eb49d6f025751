#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crestwave/transforms.hpp"

#include <cmath>

using namespace crestwave;

TEST_CASE("Hilbert transform maps cos k to sin k exactly") {
  WeightedGrid g = make_grid(256);
  for (int k = 1; k <= 8; ++k) {
    VectorXd c(g.n), s(g.n);
    for (int j = 0; j < g.n; ++j) {
      c[j] = std::cos(k * g.nodes[j]);
      s[j] = std::sin(k * g.nodes[j]);
    }
    CHECK((hilbert(c, g) - s).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((hilbert(s, g) + c).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("Hilbert squared is minus the mean-free projection") {
  WeightedGrid g = make_grid(128);
  FieldRng rng(3);
  VectorXd f = random_band_limited(rng, 20, 1.0, g);
  VectorXd hhf = hilbert(hilbert(f, g), g);
  VectorXd proj = f.array() - f.mean();
  CHECK((hhf + proj).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("principal-value backend agrees with the spectral one") {
  WeightedGrid g = make_grid(512);
  FieldRng rng(5);
  VectorXd f = random_band_limited(rng, 12, 2.0, g);
  CHECK((hilbert_pv(f, g) - hilbert(f, g)).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("half-Laplacian multiplier and PV backend") {
  WeightedGrid g = make_grid(512);
  VectorXd c2(g.n);
  for (int j = 0; j < g.n; ++j) c2[j] = std::cos(2.0 * g.nodes[j]);
  VectorXd lam = half_laplacian(c2, g);
  CHECK((lam - std::sqrt(2.0) * c2).lpNorm<Eigen::Infinity>() < 1e-11);
  VectorXd pv = half_laplacian_pv(c2, g);
  CHECK((pv - lam).lpNorm<Eigen::Infinity>() / std::sqrt(2.0) < 1e-2);
}

TEST_CASE("half norm rejects exponents outside the weight window") {
  WeightedGrid g = make_grid(64);
  VectorXd f = VectorXd::Ones(g.n);
  CHECK_THROWS_AS(half_norm(f, 2.0, 1.0, g), config_error);
  CHECK(std::isfinite(half_norm(f, 0.25, 0.0, g)));
  CHECK(std::isfinite(half_norm(f, 1.0, 0.75, g)));  // gamma - lambda = +1/4
}

TEST_CASE("mollifier preserves constants exactly") {
  WeightedGrid g = make_grid(200);
  MollifierConfig cfg{0.2};
  VectorXd one = VectorXd::Ones(g.n);
  CHECK((mollify(one, cfg, g) - one).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("delta = 0 collapses the mollifier family to the identity") {
  WeightedGrid g = make_grid(100);
  FieldRng rng(9);
  VectorXd f = random_band_limited(rng, 10, 1.0, g);
  MollifierConfig cfg{0.0};
  CHECK((mollify(f, cfg, g) - f).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((mollify_adjoint(f, cfg, g) - f).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((smooth(f, cfg, g) - f).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("mollifier adjoint pairing in plain L2") {
  WeightedGrid g = make_grid(256);
  FieldRng rng(13);
  VectorXd f = g.weights_m.array().pow(4.0) * random_band_limited(rng, 8, 1.0, g).array();
  VectorXd w = g.weights_m.array().pow(4.0) * random_band_limited(rng, 8, 1.0, g).array();
  MollifierConfig cfg{0.15};
  double lhs = (mollify(f, cfg, g).cwiseProduct(w)).sum() * g.h;
  double rhs = (f.cwiseProduct(mollify_adjoint(w, cfg, g))).sum() * g.h;
  CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("mollifier converges to the identity as delta shrinks") {
  WeightedGrid g = make_grid(1024);
  VectorXd f(g.n);
  for (int j = 0; j < g.n; ++j)
    f[j] = g.weights_m[j] * (std::cos(2.0 * g.nodes[j]) + 0.5 * std::sin(g.nodes[j]));
  double prev = -1.0;
  for (double delta : {0.4, 0.2, 0.1, 0.05}) {
    MollifierConfig cfg{delta};
    double err = weighted_l2_norm(VectorXd(mollify(f, cfg, g) - f), 0.0, g);
    if (prev > 0.0) CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("derivative commutator identity (B f)' = B f' + K f") {
  WeightedGrid g = make_grid(512);
  FieldRng rng(21);
  VectorXd f = g.weights_m.array().square() * random_band_limited(rng, 6, 2.0, g).array();
  MollifierConfig cfg{0.2};
  VectorXd lhs = derivative_onesided(mollify(f, cfg, g), g);
  VectorXd rhs = mollify(derivative_onesided(f, g), cfg, g) +
                 mollifier_derivative_commutator(f, cfg, g);
  double scale = lhs.lpNorm<Eigen::Infinity>();
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-4 * std::max(1.0, scale));
}

TEST_CASE("quintic interpolation reproduces grid values and smooth fields") {
  WeightedGrid g = make_grid(128);
  VectorXd f(g.n);
  for (int j = 0; j < g.n; ++j) f[j] = std::sin(2.0 * g.nodes[j]);
  CHECK(interpolate_quintic(f, g, g.nodes[10]) == doctest::Approx(f[10]));
  double x = 0.371;
  CHECK(interpolate_quintic(f, g, x) == doctest::Approx(std::sin(2.0 * x)).epsilon(1e-9));
}

TEST_CASE("Gauss-Legendre rule integrates high-degree polynomials") {
  VectorXd nodes, weights;
  gauss_legendre(8, nodes, weights);
  CHECK(weights.sum() == doctest::Approx(2.0));
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += weights[i] * std::pow(nodes[i], 14);
  CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
}
