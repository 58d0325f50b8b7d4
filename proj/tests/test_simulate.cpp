#include "support.hpp"

#include <stlasso/errors.hpp>
#include <stlasso/simulate.hpp>

#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdlib>

using namespace stlasso;
using namespace testkit;

TEST_SUITE("simulate") {
  TEST_CASE("queen weights on small lattices") {
    const Matrix w2 = queen_lattice_weights(2);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j) CHECK(w2(i, j) == (i == j ? 0.0 : 1.0 / 3.0));

    const Matrix w3 = queen_lattice_weights(3);
    for (Index j = 0; j < 9; ++j) CHECK(w3(4, j) == (j == 4 ? 0.0 : 1.0 / 8.0));
    for (Index corner : {0, 2, 6, 8}) CHECK((w3.row(corner).array() == 1.0 / 3.0).count() == 3);
    CHECK_THROWS_AS(queen_lattice_weights(1), DomainError);
  }

  TEST_CASE("queen support matches the adjacency enumeration") {
    for (int side = 2; side <= 6; ++side) {
      const Matrix w = queen_lattice_weights(side);
      const Index n = side * side;
      for (Index i = 0; i < n; ++i) {
        CHECK(w.row(i).sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(w(i, i) == 0.0);
        for (Index j = 0; j < n; ++j) {
          const bool adjacent = i != j && std::abs(i / side - j / side) <= 1 && std::abs(i % side - j % side) <= 1;
          CHECK((w(i, j) > 0.0) == adjacent);
          CHECK((w(i, j) > 0.0) == (w(j, i) > 0.0));
        }
      }
    }
  }

  TEST_CASE("true parameters of the lattice design") {
    DgpConfig cfg;
    const ModelParams p2 = make_true_params(cfg);
    for (Index i = 0; i < 4; ++i) {
      CHECK(p2.w.row(i).sum() == doctest::Approx(0.6).epsilon(1e-14));
      for (Index j = 0; j < 4; ++j)
        if (i != j) CHECK(p2.w(i, j) == doctest::Approx(0.2).epsilon(1e-14));
    }
    CHECK(p2.beta == (Vector(3) << 3.0, 0.0, 2.0).finished());
    CHECK(p2.phi(0, 0) == 0.0);
    CHECK(p2.phi(0, 1) == 0.3);

    cfg.side = 3;
    const ModelParams p3 = make_true_params(cfg);
    // floor(0.25 * 9) = 2 locations without temporal dependence
    CHECK(p3.phi(0, 0) == 0.0);
    CHECK(p3.phi(0, 1) == 0.0);
    for (Index i = 2; i < 9; ++i) CHECK(p3.phi(0, i) == 0.3);

    cfg.rho = 0.0;
    CHECK(make_true_params(cfg).w.isZero(0.0));
  }

  TEST_CASE("regressor draws") {
    DgpConfig cfg;
    cfg.side = 10;
    cfg.T = 1000;
    const auto x = simulate_regressors(cfg);
    double sum = 0.0, sq = 0.0;
    for (const Matrix& m : x) {
      sum += m.sum();
      sq += m.squaredNorm();
    }
    const double count = 1e5 * 3;
    const double mean = sum / count;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(sq / count - mean * mean - 1.0) < 0.02);
    const auto again = simulate_regressors(cfg);
    for (std::size_t t = 0; t < x.size(); ++t) CHECK(x[t] == again[t]);
    cfg.seed = 2;
    CHECK(simulate_regressors(cfg)[0] != x[0]);
  }

  TEST_CASE("no forcing gives an all-zero panel") {
    DgpConfig cfg;
    cfg.sigma2_true = 0.0;
    cfg.beta_true.setZero();
    cfg.phi.value = 0.0;
    ModelParams p = make_true_params(cfg);
    p.sigma2 = 0.0;
    const PanelData panel = simulate_panel(p, cfg);
    CHECK(panel.y.isZero(0.0));
  }

  TEST_CASE("simulation matches a scalar-loop oracle") {
    Rng rng(9);
    const ModelParams p = random_params(rng, 4, 2, 1);
    std::vector<Matrix> x;
    for (int t = 0; t < 3; ++t) x.push_back(normal_matrix(rng, 4, 2));
    const Matrix eps = normal_matrix(rng, 4, 3);
    const Matrix init = normal_matrix(rng, 4, 1);
    const PanelData panel = simulate_panel(p, x, eps, init);
    const auto inv = adjugate_inverse(i_minus_w(p));
    std::array<double, 4> prev{};
    for (Index i = 0; i < 4; ++i) prev[static_cast<std::size_t>(i)] = init(i, 0);
    for (Index t = 0; t < 3; ++t) {
      std::array<double, 4> rhs{}, y{};
      for (Index i = 0; i < 4; ++i) {
        double v = eps(i, t) + p.phi(0, i) * prev[static_cast<std::size_t>(i)];
        for (Index c = 0; c < 2; ++c) v += x[static_cast<std::size_t>(t)](i, c) * p.beta[c];
        rhs[static_cast<std::size_t>(i)] = v;
      }
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) y[i] += inv[i][j] * rhs[j];
      for (Index i = 0; i < 4; ++i) CHECK(panel.y(i, t) == doctest::Approx(y[static_cast<std::size_t>(i)]).epsilon(1e-12));
      prev = y;
    }
  }

  TEST_CASE("configured simulation is deterministic") {
    DgpConfig cfg;
    cfg.seed = 42;
    const ModelParams p = make_true_params(cfg);
    const PanelData a = simulate_panel(p, cfg);
    const PanelData b = simulate_panel(p, cfg);
    CHECK(a.y == b.y);
    CHECK(a.T() == cfg.T);
    cfg.seed = 43;
    CHECK(simulate_panel(p, cfg).y != a.y);
  }

  TEST_CASE("long simulation stays bounded") {
    DgpConfig cfg;
    cfg.side = 3;
    cfg.T = 5000;
    const PanelData panel = simulate_panel(make_true_params(cfg), cfg);
    const auto var = [&](Index from, Index to) {
      const Matrix block = panel.y.middleCols(from, to - from);
      const double mean = block.mean();
      return (block.array() - mean).square().mean();
    };
    const double first = var(0, 2500);
    const double second = var(2500, 5000);
    CHECK(std::isfinite(second));
    CHECK(second / first == doctest::Approx(1.0).epsilon(0.15));
  }

  TEST_CASE("independent series have covariance sigma2 I") {
    DgpConfig cfg;
    cfg.rho = 0.0;
    cfg.phi.value = 0.0;
    cfg.beta_true.setZero();
    cfg.sigma2_true = 1.5;
    cfg.T = 10000;
    const PanelData panel = simulate_panel(make_true_params(cfg), cfg);
    const Matrix centered = panel.y.colwise() - panel.y.rowwise().mean();
    const Matrix cov = centered * centered.transpose() / static_cast<double>(cfg.T);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j) {
        if (i == j) CHECK(cov(i, j) == doctest::Approx(1.5).epsilon(0.05));
        else CHECK(std::abs(cov(i, j)) < 0.05 * 1.5);
      }
  }

  TEST_CASE("unstable parameters are rejected") {
    DgpConfig cfg;
    ModelParams p = make_true_params(cfg);
    p.phi.setConstant(0.9);
    CHECK_THROWS_AS(simulate_panel(p, cfg), DomainError);
    cfg.side = 1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
  }
}
