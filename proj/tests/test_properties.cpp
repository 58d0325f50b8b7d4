// Randomized invariants over many generated instances.

#include "support.hpp"

#include <stlasso/inference.hpp>
#include <stlasso/likelihood.hpp>

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace stlasso;
using namespace testkit;

TEST_SUITE("properties") {
  TEST_CASE("residuals are linear in each parameter block") {
    Rng rng(91);
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = pick(rng, 2, 5);
      const int lags = static_cast<int>(pick(rng, 1, 3));
      const ModelParams p = random_params(rng, n, 2, lags);
      const PanelData panel = random_panel(rng, n, 10, 2);
      ModelParams zero = p;
      zero.phi.setZero();
      ModelParams twice = p;
      twice.phi *= 2.0;
      const Matrix base = residuals(zero, panel);
      CHECK(max_abs((residuals(twice, panel) - base) - 2.0 * (residuals(p, panel) - base)) < 1e-12);

      const Index row = pick(rng, 0, n - 1);
      ModelParams no_row = p;
      no_row.w.row(row).setZero();
      ModelParams double_row = p;
      double_row.w.row(row) *= 2.0;
      const Matrix rbase = residuals(no_row, panel);
      CHECK(max_abs((residuals(double_row, panel) - rbase) - 2.0 * (residuals(p, panel) - rbase)) < 1e-12);
    }
  }

  TEST_CASE("penalized objective bounds the negative log-likelihood") {
    Rng rng(92);
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = pick(rng, 2, 4);
      ModelParams p = random_params(rng, n, 2, 1, 0.5, 0.4, true);
      const PanelData panel = random_panel(rng, n, 8, 2);
      const PenaltyConfig pen{uniform(rng, 0.0, 2.0), uniform(rng, 0.0, 2.0), uniform(rng, 0.0, 2.0)};
      const double nll = -log_likelihood(p, panel);
      CHECK(penalized_objective(p, panel, pen) >= nll);
      CHECK(penalized_objective(p, panel, PenaltyConfig{}) == nll);
      p.w.setZero();
      p.phi.setZero();
      p.beta.setZero();
      CHECK(penalized_objective(p, panel, pen) == -log_likelihood(p, panel));
    }
  }

  TEST_CASE("likelihood agrees with the density product on small instances") {
    Rng rng(93);
    for (int trial = 0; trial < 50; ++trial) {
      const Index n = pick(rng, 2, 4);
      const Index T = pick(rng, 3, 6);
      const ModelParams p = random_params(rng, n, pick(rng, 0, 2), 1, 0.9, 0.9);
      const PanelData panel = random_panel(rng, n, T, p.k());
      CHECK(log_likelihood(p, panel) == doctest::Approx(density_product_loglik(p, panel)).epsilon(1e-10));
    }
  }

  TEST_CASE("stationarity norm is invariant to relabelling") {
    Rng rng(94);
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = pick(rng, 2, 7);
      const int lags = static_cast<int>(pick(rng, 1, 2));
      const ModelParams p = random_params(rng, n, 0, lags, 0.9, 0.9, true);
      std::vector<int> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
      for (Index i = 0; i < n; ++i) perm.indices()[i] = order[static_cast<std::size_t>(i)];
      ModelParams q = p;
      q.w = perm * p.w * perm.transpose();
      q.phi = p.phi * perm.transpose();
      CHECK(stationarity_check(q).norm_value == doctest::Approx(stationarity_check(p).norm_value).epsilon(1e-12));
    }
  }

  TEST_CASE("without spatial weights the norm is the largest phi sum") {
    Rng rng(95);
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = pick(rng, 2, 7);
      const int lags = static_cast<int>(pick(rng, 1, 3));
      ModelParams p = random_params(rng, n, 0, lags, 0.5, 1.2);
      p.w.setZero();
      CHECK(stationarity_check(p).norm_value == doctest::Approx(p.phi.colwise().sum().maxCoeff()).epsilon(1e-13));
    }
  }

  TEST_CASE("numerical Hessian is exactly symmetric") {
    Rng rng(96);
    for (int trial = 0; trial < 20; ++trial) {
      const ModelParams p = random_params(rng, 3, 1, 1);
      const PanelData panel = random_panel(rng, 3, 10, 1);
      const ParamLayout layout(p);
      const Matrix h = numerical_hessian([&](const Vector& t) { return -log_likelihood(layout.unpack(t), panel); },
                                         layout.pack(p));
      CHECK(h == h.transpose());
    }
  }

  TEST_CASE("precision of a model without weights is I / sigma2") {
    Rng rng(97);
    for (int trial = 0; trial < 20; ++trial) {
      ModelParams p = random_params(rng, pick(rng, 2, 6), 1, 1);
      p.w.setZero();
      CHECK(precision_diagnostic(p) == Matrix::Identity(p.n(), p.n()) / p.sigma2);
    }
  }
}
