#include "stlasso/evaluate.hpp"

#include <cmath>
#include <numbers>

namespace stlasso {

namespace {

struct LsSolution {
  Vector coef;
  bool rank_deficient = false;
};

LsSolution solve_ls(const Matrix& a, const Vector& b) {
  if (a.cols() == 0) return {Vector(0), false};
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  return {cod.solve(b), cod.rank() < a.cols()};
}

/// Concentrated Gaussian log-likelihood at sigma2 = SSR / N.
double gaussian_loglik(double ssr, Index n_obs) {
  const double nn = static_cast<double>(n_obs);
  return -0.5 * nn * (std::log(2.0 * std::numbers::pi * ssr / nn) + 1.0);
}

void finish(BaselineResult& r, double ssr) {
  r.sigma2 = ssr / static_cast<double>(r.n_obs);
  r.mse = r.sigma2;
  r.loglik = gaussian_loglik(ssr, r.n_obs);
  const InformationCriteria ic = information_criteria(r.loglik, r.n_params, r.n_obs);
  r.aic = ic.aic;
  r.bic = ic.bic;
}

}  // namespace

BaselineResult fit_ols(const PanelData& panel, int lags) {
  panel.validate(lags);
  const Index n = panel.n();
  const Index k = panel.k();
  const Index teff = panel.T() - lags;
  Matrix a(n * teff, k);
  Vector b(n * teff);
  for (Index r = 0; r < teff; ++r) {
    const Index t = lags + r;
    if (k > 0) a.middleRows(r * n, n) = panel.x[static_cast<std::size_t>(t)];
    b.segment(r * n, n) = panel.y.col(t);
  }
  const LsSolution ls = solve_ls(a, b);
  BaselineResult r;
  r.model = "ols";
  r.n_params = k + 1;
  r.n_obs = n * teff;
  r.rank_deficient = ls.rank_deficient;
  r.coefficients = ls.coef;
  const double ssr = k > 0 ? (b - a * ls.coef).squaredNorm() : b.squaredNorm();
  finish(r, ssr);
  return r;
}

BaselineResult fit_var1(const PanelData& panel, int lags) {
  panel.validate(lags);
  const Index n = panel.n();
  const Index k = panel.k();
  const Index teff = panel.T() - lags;
  if (teff < n + k + 1) {
    throw DomainError("fit_var1: need T - P >= n + k + 1 (T - P = " + std::to_string(teff) +
                      ", n + k + 1 = " + std::to_string(n + k + 1) + ")");
  }
  BaselineResult r;
  r.model = "var1";
  r.n_params = n * n + n * k + 1;
  r.n_obs = n * teff;
  r.coefficients = Matrix::Zero(n, n + k);
  double ssr = 0.0;
  Matrix a(teff, n + k);
  for (Index row = 0; row < teff; ++row) a.row(row).head(n) = panel.y.col(lags + row - 1).transpose();
  for (Index i = 0; i < n; ++i) {
    for (Index row = 0; row < teff; ++row) {
      const Index t = lags + row;
      if (k > 0) a.row(row).tail(k) = panel.x[static_cast<std::size_t>(t)].row(i);
    }
    const Vector b = panel.y.row(i).segment(lags, teff).transpose();
    const LsSolution ls = solve_ls(a, b);
    r.rank_deficient = r.rank_deficient || ls.rank_deficient;
    r.coefficients.row(i) = ls.coef.transpose();
    ssr += (b - a * ls.coef).squaredNorm();
  }
  finish(r, ssr);
  return r;
}

BaselineResult summarize_fit(const PanelData& panel, const FitResult& fr) {
  const ModelParams& p = fr.params;
  check_compatible(p, panel);
  const int lags = p.lags();
  std::vector<Index> times;
  for (Index t = lags; t < panel.T(); ++t) times.push_back(t);
  const Matrix pred = one_step_predictions(p, panel, times);

  BaselineResult r;
  r.model = "spatiotemporal";
  r.n_params = Support::of(p, 0.0).count() + 1;
  r.n_obs = panel.n() * static_cast<Index>(times.size());
  r.sigma2 = p.sigma2;
  r.mse = (pred - panel.y.rightCols(static_cast<Index>(times.size()))).squaredNorm() /
          static_cast<double>(r.n_obs);
  r.loglik = log_likelihood(p, panel);
  const InformationCriteria ic = information_criteria(r.loglik, r.n_params, r.n_obs);
  r.aic = ic.aic;
  r.bic = ic.bic;
  r.coefficients = ParamLayout(p).pack(p);
  return r;
}

}  // namespace stlasso
