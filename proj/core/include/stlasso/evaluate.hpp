#pragma once

// Parameter-recovery metrics, the Monte Carlo harness and baseline model comparison.

#include "stlasso/cv.hpp"
#include "stlasso/simulate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stlasso {

struct MetricRow {
  double bias = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  Index count = 0;  // entries per replication in the group
};

struct McSummary {
  MetricRow beta;
  MetricRow phi;
  MetricRow w_all;
  std::optional<MetricRow> w_zero;     // absent when the true W has no zero off-diagonals
  std::optional<MetricRow> w_nonzero;  // absent when the true W has no nonzero off-diagonals
  MetricRow sigma;
  /// Mean over replications of the share of true-zero weights estimated as exactly zero.
  std::optional<double> zero_recovery;
  double mean_seconds = 0.0;
  Index reps_ok = 0;
  Index reps_failed = 0;
};

/// Bias, MAE and RMSE per group, each normalized by m times the group size:
///   bias = sum (est - truth) / (m c), mae = sum |est - truth| / (m c),
///   rmse = sqrt(sum (est - truth)^2 / (m c)).
/// W groups cover off-diagonal entries only. Throws DomainError for an empty list.
McSummary group_metrics(const std::vector<ModelParams>& estimates, const ModelParams& truth);

/// sqrt( (1 / (n m)) sum_r sum_t ||yhat_t - y_t||^2 ) with one-step-ahead predictions over
/// t = P..T-1. Note the normalization: n m, not n m T_eff.
double full_model_rmse(const std::vector<ModelParams>& fits, const std::vector<PanelData>& panels);

struct McConfig {
  DgpConfig dgp;
  int reps = 20;
  /// Fixed penalty; when absent each replication selects lambda by grid_search over `plan`.
  std::optional<PenaltyConfig> penalty;
  CvPlan plan;
  SolverOptions opts;
  /// Start every fit at the true parameters (overrides opts.init).
  bool start_at_truth = false;
  int threads = 1;

  void validate() const;
};

struct ReplicationRecord {
  int rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string status;
  PenaltyConfig penalty;
  double cv_score = 0.0;
  ModelParams estimate;
  int iterations = 0;
  bool converged = false;
  bool feasible = false;
  bool stationary = false;
  double norm_value = 0.0;
  double zero_fraction = 0.0;  // NaN when the true W has no zeros
  double seconds = 0.0;
};

struct McResult {
  ModelParams truth;
  McSummary summary;
  std::vector<ReplicationRecord> records;  // replication order
};

/// Replication r simulates from seed dgp.seed + r, optionally runs the CV search, fits and
/// records the estimate. Failed replications are recorded and excluded from the summary; if
/// more than 10% fail the whole run throws NumericalError.
McResult monte_carlo(const McConfig& cfg);

struct InformationCriteria {
  double aic = 0.0;
  double bic = 0.0;
};

/// AIC = -2 ll + 2 p, BIC = -2 ll + ln(n_obs) p.
InformationCriteria information_criteria(double loglik, Index n_params, Index n_obs);

struct BaselineResult {
  std::string model;
  Index n_params = 0;
  Index n_obs = 0;  // n * T_eff
  double loglik = 0.0;
  double mse = 0.0;
  double sigma2 = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  bool rank_deficient = false;
  /// OLS: k x 1 pooled beta. VAR(1): n x (n + k), row i = [A_i., b_i'].
  Matrix coefficients;
};

/// Pooled least squares of y_t on X_t over t = lags..T-1 (no lags, no W).
/// Parameters: k + 1. Rank deficiency falls back to the minimum-norm solution and is flagged.
BaselineResult fit_ols(const PanelData& panel, int lags = 1);

/// Unrestricted VAR(1) with station-specific exogenous terms: equation i regresses y_it on
/// y_{t-1} (all stations) and x_ti. Uses t = lags..T-1. Parameters: n^2 + n k + 1.
/// Throws DomainError when T - lags < n + k + 1.
BaselineResult fit_var1(const PanelData& panel, int lags = 1);

/// Summary of a penalized fit on the same footing as the baselines: parameters = nonzero
/// entries + 1, log-likelihood = conditional log-likelihood, MSE = one-step-ahead error.
BaselineResult summarize_fit(const PanelData& panel, const FitResult& fit);

}  // namespace stlasso
