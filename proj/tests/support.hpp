#pragma once

// Shared generators and independent reference implementations for the tests. The oracles
// here deliberately avoid the library's matrix code paths: scalar loops, cofactor
// determinants and explicit adjugate inverses.

#include <stlasso/likelihood.hpp>
#include <stlasso/model.hpp>
#include <stlasso/simulate.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testkit {

using stlasso::Index;
using stlasso::Matrix;
using stlasso::ModelParams;
using stlasso::PanelData;
using stlasso::Vector;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline Index pick(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline Matrix normal_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Random parameters satisfying every invariant. Row sums of W stay below row_cap and
/// phi entries below phi_cap, which keeps the process stable whenever
/// phi_cap / (1 - row_cap) < 1. Some weights are exactly zero when sparse is set.
inline ModelParams random_params(Rng& rng, Index n, Index k, int lags, double row_cap = 0.5,
                                 double phi_cap = 0.4, bool sparse = false) {
  ModelParams p = ModelParams::zeros(n, k, lags, uniform(rng, 0.3, 2.0));
  for (Index j = 0; j < k; ++j) p.beta[j] = uniform(rng, -2.0, 2.0);
  for (int l = 0; l < lags; ++l)
    for (Index i = 0; i < n; ++i) p.phi(l, i) = uniform(rng, 0.0, phi_cap / lags);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (i == j || (sparse && uniform(rng, 0.0, 1.0) < 0.4)) continue;
      p.w(i, j) = uniform(rng, 0.0, 1.0);
      sum += p.w(i, j);
    }
    if (sum > 0.0) p.w.row(i) *= uniform(rng, 0.05, row_cap) / sum;
  }
  return p;
}

/// Panel with iid N(0,1) responses and regressors (no model structure).
inline PanelData random_panel(Rng& rng, Index n, Index T, Index k) {
  std::vector<Matrix> x;
  for (Index t = 0; t < T; ++t) x.push_back(normal_matrix(rng, n, k));
  return PanelData(normal_matrix(rng, n, T), std::move(x));
}

/// Panel simulated from params with iid regressors and the errors returned through eps.
inline PanelData simulated_panel(Rng& rng, const ModelParams& p, Index T, Matrix* eps_out = nullptr) {
  std::vector<Matrix> x;
  for (Index t = 0; t < T; ++t) x.push_back(normal_matrix(rng, p.n(), p.k()));
  Matrix eps = std::sqrt(p.sigma2) * normal_matrix(rng, p.n(), T);
  Matrix init = normal_matrix(rng, p.n(), p.lags());
  PanelData panel = stlasso::simulate_panel(p, std::move(x), eps, init);
  if (eps_out) *eps_out = eps;
  return panel;
}

/// Determinant by cofactor expansion along the first row.
inline double cofactor_det(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  if (n == 1) return a[0][0];
  double det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<double>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<double> row;
      for (std::size_t cc = 0; cc < n; ++cc)
        if (cc != c) row.push_back(a[r][cc]);
      minor.push_back(row);
    }
    det += (c % 2 == 0 ? 1.0 : -1.0) * a[0][c] * cofactor_det(minor);
  }
  return det;
}

inline std::vector<std::vector<double>> i_minus_w(const ModelParams& p) {
  const std::size_t n = static_cast<std::size_t>(p.n());
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i][j] = (i == j ? 1.0 : 0.0) - p.w(static_cast<Index>(i), static_cast<Index>(j));
  return a;
}

/// Inverse through the adjugate (cofactor matrix transposed over the determinant).
inline std::vector<std::vector<double>> adjugate_inverse(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  const double det = cofactor_det(a);
  std::vector<std::vector<double>> inv(n, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<std::vector<double>> minor;
      for (std::size_t rr = 0; rr < n; ++rr) {
        if (rr == r) continue;
        std::vector<double> row;
        for (std::size_t cc = 0; cc < n; ++cc)
          if (cc != c) row.push_back(a[rr][cc]);
        minor.push_back(row);
      }
      const double cof = ((r + c) % 2 == 0 ? 1.0 : -1.0) * (n == 1 ? 1.0 : cofactor_det(minor));
      inv[c][r] = cof / det;
    }
  }
  return inv;
}

/// Residual entry eps_i(t) by scalar arithmetic.
inline double scalar_residual(const ModelParams& p, const PanelData& panel, Index i, Index t) {
  double v = panel.y(i, t);
  for (Index j = 0; j < p.n(); ++j) v -= p.w(i, j) * panel.y(j, t);
  for (Index c = 0; c < p.k(); ++c) v -= panel.x[static_cast<std::size_t>(t)](i, c) * p.beta[c];
  for (int l = 0; l < p.lags(); ++l) v -= p.phi(l, i) * panel.y(i, t - l - 1);
  return v;
}

/// Log of the product over t of |det(I - W)| times the N(0, sigma2 I) density of eps_t.
inline double density_product_loglik(const ModelParams& p, const PanelData& panel) {
  const double jac = std::abs(cofactor_det(i_minus_w(p)));
  long double product = 1.0L;
  const long double pi = 3.141592653589793238462643383279502884L;
  for (Index t = p.lags(); t < panel.T(); ++t) {
    long double density = 1.0L;
    for (Index i = 0; i < p.n(); ++i) {
      const long double e = scalar_residual(p, panel, i, t);
      density *= std::exp(-e * e / (2.0L * p.sigma2)) / std::sqrt(2.0L * pi * p.sigma2);
    }
    product *= density * jac;
  }
  return static_cast<double>(std::log(product));
}

/// Central-difference gradient.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testkit
