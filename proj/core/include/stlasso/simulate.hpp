#pragma once

#include "stlasso/model.hpp"

#include <cstdint>

namespace stlasso {

/// Temporal coefficients of the lattice design: the first floor(zero_fraction * n)
/// locations get phi_1 = 0, all others phi_1 = value. Higher lags are zero.
struct PhiScheme {
  double zero_fraction = 0.25;
  double value = 0.3;
};

/// Data-generating process on a side x side lattice with row-standardized queen weights.
struct DgpConfig {
  int side = 2;
  Index T = 50;
  Vector beta_true = (Vector(3) << 3.0, 0.0, 2.0).finished();
  double rho = 0.6;
  PhiScheme phi;
  double sigma2_true = 1.0;
  std::uint64_t seed = 1;
  Index burn_in = 200;
  int lags = 1;

  Index n() const { return static_cast<Index>(side) * side; }
  Index k() const { return beta_true.size(); }
  void validate() const;
};

/// Row-standardized queen contiguity matrix on a side x side grid (cells indexed row-major).
Matrix queen_lattice_weights(int side);

/// rho * queen weights, scheme phi, beta_true, sigma2_true. Throws ConfigError if the
/// result is not stationary.
ModelParams make_true_params(const DgpConfig& cfg);

/// T regressor matrices (n x k) of iid N(0, 1) draws; reproducible from cfg.seed.
std::vector<Matrix> simulate_regressors(const DgpConfig& cfg);

/// Draws regressors and N(0, sigma2) errors from cfg.seed, iterates the reduced form from
/// zero initial conditions through cfg.burn_in discarded steps, then records cfg.T steps.
/// Throws DomainError with the offending norm if params are not stationary.
PanelData simulate_panel(const ModelParams& params, const DgpConfig& cfg);

/// Deterministic core of the simulator: iterates
///   (I - W) y_t = X_t beta + sum_p Phi_p y_{t-p} + eps_t
/// for t = 0..T-1 with the given regressors and errors (n x T). `initial` (n x P) holds
/// y_{-P}, ..., y_{-1} in column order. (I - W) is factorized once.
PanelData simulate_panel(const ModelParams& params, std::vector<Matrix> x, const Matrix& eps,
                         const Matrix& initial);

}  // namespace stlasso
