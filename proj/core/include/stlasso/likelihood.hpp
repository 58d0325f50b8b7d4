#pragma once

#include "stlasso/model.hpp"

#include <limits>

namespace stlasso {

/// Determinants of (I - W) with absolute value below this are treated as singular.
inline constexpr double kSingularDeterminant = 1e-12;

/// Residuals eps_t = (I - W) y_t - X_t beta - sum_p Phi_p y_{t-p} for every t in `sample`
/// (one column per sample entry, in sample order).
Matrix residuals(const ModelParams& params, const PanelData& panel, const Sample& sample);
/// Residuals for t = P, ..., T-1 (n x (T - P)).
Matrix residuals(const ModelParams& params, const PanelData& panel);

/// ln|det(I - W)| from a partially pivoted LU factorization. Throws SingularityError.
double log_det_term(const Matrix& w);

/// Conditional Gaussian log-likelihood over the effective sample of size T_eff:
///   T_eff ln|det(I-W)| - (n T_eff / 2) ln(2 pi sigma2) - SSR / (2 sigma2).
double log_likelihood(const ModelParams& params, const PanelData& panel, const Sample& sample);
double log_likelihood(const ModelParams& params, const PanelData& panel);

/// L1 penalty sum lambda1 sum|w_ij| + lambda2 sum|phi| + lambda3 sum|beta|.
double penalty_value(const ModelParams& params, const PenaltyConfig& pen);

/// -log_likelihood + penalty_value.
double penalized_objective(const ModelParams& params, const PanelData& panel,
                           const PenaltyConfig& pen, const Sample& sample);
double penalized_objective(const ModelParams& params, const PanelData& panel,
                           const PenaltyConfig& pen);

/// One-step-ahead reduced-form predictions using observed lags:
///   yhat_t = (I - W)^{-1} (X_t beta + sum_p Phi_p y_{t-p}), one column per time in `times`.
/// Every t must satisfy t >= P.
Matrix one_step_predictions(const ModelParams& params, const PanelData& panel,
                            const std::vector<Index>& times);

struct StationarityReport {
  bool stationary = false;
  /// Spectral norm of sum_p (I - W)^{-1} Phi_p; +infinity when (I - W) is singular.
  double norm_value = std::numeric_limits<double>::infinity();
  bool invertible = false;
  double max_row_sum = 0.0;  // max_i sum_j |w_ij|
  double max_phi_sum = 0.0;  // max_i sum_p |phi_p(s_i)|
  bool row_sum_ok = false;   // max_row_sum < 1
  bool phi_sum_ok = false;   // max_phi_sum < 1
};

/// Stability check: the operator (spectral) norm of sum_p (I - W)^{-1} Phi_p must be below 1.
StationarityReport stationarity_check(const ModelParams& params);

}  // namespace stlasso
