#include "support.hpp"

#include <stlasso/errors.hpp>
#include <stlasso/inference.hpp>

#include <doctest.h>

#include <cmath>

using namespace stlasso;
using namespace testkit;

TEST_SUITE("inference") {
  TEST_CASE("support extraction") {
    ModelParams p = ModelParams::zeros(3, 2, 1);
    CHECK(support(p, 1e-4).count() == 0);
    const Support all = support(p, 0.0);
    CHECK(all.count() == 0);
    p.w.setConstant(0.1);
    p.w.diagonal().setZero();
    p.phi.setConstant(0.2);
    p.beta << 1.0, -2.0;
    CHECK(support(p, 0.0) == Support::all(3, 2, 1));
  }

  TEST_CASE("quadratic Hessian is recovered") {
    Rng rng(51);
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix b = normal_matrix(rng, 6, 6);
      const Matrix a = b * b.transpose() + Matrix::Identity(6, 6);
      const Vector x0 = normal_matrix(rng, 6, 1);
      const auto f = [&](const Vector& x) { return 0.5 * x.dot(a * x); };
      const Matrix h = numerical_hessian(f, x0, Vector::Constant(6, 1e-4));
      CHECK(max_abs(h - a) / max_abs(a) < 1e-6);
      CHECK(h == h.transpose());
    }
  }

  TEST_CASE("Hessian is thread-count independent and exactly symmetric") {
    const auto f = [](const Vector& x) { return std::exp(x[0] * x[1]) + std::sin(x[2]) * x[0] * x[0] + x[1] * x[2] * x[2]; };
    const Vector x0 = Vector::LinSpaced(3, 0.2, 0.9);
    const Matrix one = numerical_hessian(f, x0, std::nullopt, {}, 1);
    const Matrix four = numerical_hessian(f, x0, std::nullopt, {}, 4);
    CHECK(one == four);
    CHECK(one == one.transpose());
  }

  TEST_CASE("failing stencil point names the coordinate") {
    const auto f = [](const Vector& x) {
      if (x[1] > 1.0) throw DomainError("outside");
      return x.squaredNorm();
    };
    Vector x0(2);
    x0 << 0.0, 1.0;
    CHECK_THROWS_WITH_AS(numerical_hessian(f, x0, std::nullopt, {"a", "b"}), doctest::Contains("b"), DomainError);
  }

  TEST_CASE("Gaussian mean information and standard error") {
    Rng rng(52);
    const Index nobs = 400;
    const double sigma = 1.7;
    Vector y(nobs);
    for (Index i = 0; i < nobs; ++i) y[i] = 2.0 + sigma * normal(rng);
    const auto nll = [&](const Vector& mu) { return (y.array() - mu[0]).square().sum() / (2.0 * sigma * sigma); };
    const Vector mu(Vector::Constant(1, y.mean()));
    const Matrix h = numerical_hessian(nll, mu);
    CHECK(h(0, 0) == doctest::Approx(nobs / (sigma * sigma)).epsilon(1e-4));
    const InferenceResult r = standard_errors(h, mu, {"mu"}, {"beta"});
    CHECK(r.se[0] == doctest::Approx(sigma / std::sqrt(double(nobs))).epsilon(1e-6));
  }

  TEST_CASE("standard errors of a diagonal information") {
    Matrix info = Matrix::Zero(2, 2);
    info(0, 0) = 4.0;
    info(1, 1) = 25.0;
    Vector theta(2);
    theta << 1.3, -0.7;
    const InferenceResult r = standard_errors(info, theta);
    CHECK(r.hessian_ok);
    CHECK(r.se[0] == 0.5);
    CHECK(r.se[1] == 0.2);
    CHECK(r.ci_lower[0] == doctest::Approx(1.3 - 1.96 * 0.5));
    CHECK(r.ci_upper[1] == doctest::Approx(-0.7 + 1.96 * 0.2));
    for (Index i = 0; i < 2; ++i) {
      CHECK(r.z[i] == theta[i] / r.se[i]);
      CHECK(std::abs(r.z[i] * r.se[i] - theta[i]) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(theta[i]));
    }
  }

  TEST_CASE("indefinite information gives NaN errors") {
    Matrix info = Matrix::Identity(2, 2);
    info(1, 1) = -1.0;
    const InferenceResult r = standard_errors(info, Vector::Ones(2));
    CHECK_FALSE(r.hessian_ok);
    CHECK(std::isnan(r.se[0]));
  }

  TEST_CASE("refit with no spatial or temporal support is least squares") {
    Rng rng(53);
    ModelParams truth = ModelParams::zeros(3, 2, 1);
    truth.beta << 0.7, -1.1;
    const PanelData panel = simulated_panel(rng, truth, 50);
    Support s = Support::all(3, 2, 1);
    s.w.setConstant(false);
    s.phi.setConstant(false);
    const FitResult r = refit_unpenalized(panel, s, SolverOptions{});
    Matrix a(3 * 49, 2);
    Vector b(3 * 49);
    for (Index t = 1; t < 50; ++t) {
      a.middleRows((t - 1) * 3, 3) = panel.x[static_cast<std::size_t>(t)];
      b.segment((t - 1) * 3, 3) = panel.y.col(t);
    }
    const Vector ls = a.colPivHouseholderQr().solve(b);
    CHECK(max_abs(r.params.beta - ls) < 1e-6);
    CHECK(r.params.w.isZero(0.0));
    CHECK(r.params.phi.isZero(0.0));
  }

  TEST_CASE("refit does not lower the likelihood and nests") {
    DgpConfig cfg;
    cfg.T = 150;
    const ModelParams truth = make_true_params(cfg);
    const PanelData panel = simulate_panel(truth, cfg);
    const FitResult lasso = fit(panel, PenaltyConfig{1.0, 1.0, 1.0}, SolverOptions{});
    const Support big = support(lasso.params, 1e-4);
    SolverOptions from_lasso;
    from_lasso.init = InitStrategy::kGiven;
    from_lasso.start = lasso.params;
    const FitResult refit = refit_unpenalized(panel, big, from_lasso);
    CHECK(refit.loglik >= lasso.loglik);

    Support small = big;
    small.w.setConstant(false);
    const FitResult nested = refit_unpenalized(panel, small, SolverOptions{});
    CHECK(refit.loglik >= nested.loglik - 1e-8);
  }

  TEST_CASE("support recovery and refit accuracy on the 2x2 lattice") {
    DgpConfig cfg;
    cfg.T = 200;
    const ModelParams truth = make_true_params(cfg);
    const Support true_support = Support::of(truth, 0.0);
    int matching = 0, total = 0;
    double refit_sq = 0.0, lasso_sq = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      cfg.seed = 300 + static_cast<std::uint64_t>(rep);
      const PanelData panel = simulate_panel(truth, cfg);
      const FitResult r = fit(panel, PenaltyConfig{0.1, 0.1, 0.1}, SolverOptions{});
      const Support s = support(r.params, 1e-4);
      for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j)
          if (i != j) {
            matching += s.w(i, j) == true_support.w(i, j);
            ++total;
          }
      const FitResult refit = refit_unpenalized(panel, true_support, SolverOptions{});
      refit_sq += (refit.params.beta - truth.beta).squaredNorm();
      lasso_sq += (r.params.beta - truth.beta).squaredNorm();
    }
    CHECK(matching >= 0.9 * total);
    CHECK(refit_sq < lasso_sq);
  }

  TEST_CASE("boundary coordinates are excluded from inference") {
    ModelParams p = ModelParams::zeros(3, 1, 1);
    p.beta[0] = 1.0;
    p.phi(0, 0) = 0.4;
    p.w(0, 1) = 0.3;
    p.w(1, 0) = 0.5;
    p.w(1, 2) = 0.5 - 1e-6;
    Support s = Support::of(p, 0.0);
    s.w(2, 0) = true;  // in the support but sitting at zero
    const InferenceCoordinates c = inference_coordinates(p, s);
    CHECK(c.excluded.size() == 3);
    CHECK(c.indices.size() == 4);  // beta, phi1[0], w[0,1], sigma2
  }

  TEST_CASE("inference on a fitted lattice panel") {
    DgpConfig cfg;
    cfg.T = 200;
    const PanelData panel = simulate_panel(make_true_params(cfg), cfg);
    const FitResult r = fit(panel, PenaltyConfig{0.1, 0.1, 0.1}, SolverOptions{});
    const InferenceResult inf = infer(panel, r.params, 1e-4, SolverOptions{});
    CHECK(inf.hessian_ok);
    CHECK(inf.names.size() == static_cast<std::size_t>(inf.theta.size()));
    CHECK(inf.names.back() == "sigma2");
    CHECK((inf.se.array() > 0.0).all());
    CHECK((inf.ci_lower.array() < inf.theta.array()).all());
    CHECK(log_likelihood(inf.estimates, panel) >= r.loglik);
  }

  TEST_CASE("precision diagnostic") {
    ModelParams p = ModelParams::zeros(3, 0, 1, 2.0);
    CHECK(precision_diagnostic(p) == Matrix::Identity(3, 3) / 2.0);
    ModelParams q = ModelParams::zeros(2, 0, 1, 1.0);
    q.w(0, 1) = 0.3;
    Matrix expected(2, 2);
    expected << 1.0, -0.3, -0.3, 1.09;
    CHECK(max_abs(precision_diagnostic(q) - expected) < 1e-15);
    q.sigma2 = 0.0;
    CHECK_THROWS_AS(precision_diagnostic(q), DomainError);
  }

  TEST_CASE("precision matches the sample precision without temporal dependence") {
    DgpConfig cfg;
    cfg.T = 10000;
    cfg.phi.value = 0.0;
    cfg.beta_true.setZero();
    const ModelParams truth = make_true_params(cfg);
    const PanelData panel = simulate_panel(truth, cfg);
    const Matrix centered = panel.y.colwise() - panel.y.rowwise().mean();
    const Matrix cov = centered * centered.transpose() / static_cast<double>(cfg.T);
    const Matrix sample = cov.inverse();
    const Matrix omega = precision_diagnostic(truth);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j) CHECK(sample(i, j) == doctest::Approx(omega(i, j)).epsilon(0.10));
  }
}
