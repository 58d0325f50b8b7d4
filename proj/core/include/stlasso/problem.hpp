#pragma once

// Optimization view of the penalized likelihood.
//
// The decision vector holds the free (unfrozen) entries of beta, phi and W followed by
// s = log sigma2. On the feasible set (w_ij >= 0, phi >= 0) the weight and temporal L1
// penalties are linear, so
//
//   f(x) = -T_eff ln det(I - W) + (n T_eff / 2)(ln 2 pi + s) + exp(-s) SSR / 2
//          + lambda1 sum w + lambda2 sum phi
//
// is smooth, and lambda3 * |beta|_1 is kept apart as the only nonsmooth term.
// Residuals are affine in (beta, phi, W): location i's residual over the sample is
// y_i - Z_i theta_i with a fixed local design Z_i, so the Gram matrix is computed once.

#include "stlasso/model.hpp"

#include <utility>
#include <vector>

namespace stlasso {

struct FeasibleSetMargins {
  double row = 1e-6;  // sum_j w_ij <= 1 - row
  double phi = 1e-6;  // sum_p phi_p(s_i) <= 1 - phi
  double log_sigma2_min = -30.0;
  double log_sigma2_max = 30.0;
};

class PenalizedProblem {
 public:
  PenalizedProblem(const PanelData& panel, Sample sample, int lags, const PenaltyConfig& pen,
                   const Support& free, FeasibleSetMargins margins = {});

  Index dim() const { return dim_; }
  Index n() const { return n_; }
  int lags() const { return lags_; }
  Index effective_size() const { return teff_; }
  const Support& free() const { return free_; }
  Index log_sigma2_index() const { return dim_ - 1; }

  Vector to_vector(const ModelParams& params) const;
  ModelParams to_params(const Vector& x) const;

  /// Smooth part f(x). Throws SingularityError when |det(I - W)| is below tolerance.
  double value(const Vector& x) const;
  double value_and_gradient(const Vector& x, Vector& grad) const;
  /// Exact Hessian of f.
  Matrix hessian(const Vector& x) const;
  /// lambda3 * sum |beta|.
  double l1(const Vector& x) const;
  double ssr(const Vector& x) const;

  /// Euclidean projection onto the feasible set (beta untouched).
  void project(Vector& x) const;
  /// Proximal map of step * lambda3 |beta|_1 + indicator(feasible set).
  void prox(Vector& x, double step) const;

  /// Spectral norm of (I - W)^{-1} sum_p Phi_p and, if requested, its gradient.
  double spectral_norm(const Vector& x, Vector* grad) const;

  /// Decision-vector indices of the free weights in row i / free lags at location i.
  const std::vector<Index>& w_row(Index i) const { return w_rows_[static_cast<std::size_t>(i)]; }
  const std::vector<Index>& phi_block(Index i) const { return phi_blocks_[static_cast<std::size_t>(i)]; }
  const std::vector<Index>& beta_indices() const { return beta_idx_; }
  const FeasibleSetMargins& margins() const { return margins_; }

 private:
  struct Coord {
    enum class Kind { kBeta, kPhi, kW } kind;
    Index a;  // beta: j; phi: lag p; w: row i
    Index b;  // phi: location i; w: column j
  };

  Matrix weights(const Vector& x) const;
  /// Residual vector per location and the gradient of SSR/2 wrt theta (negated Z'e).
  double residual_terms(const Vector& x, Vector* half_ssr_grad) const;

  Index n_;
  Index k_;
  int lags_;
  Index teff_;
  PenaltyConfig pen_;
  Support free_;
  FeasibleSetMargins margins_;
  Index dim_ = 0;

  std::vector<Coord> coords_;                 // size dim_ - 1
  std::vector<Index> beta_idx_;
  std::vector<std::vector<Index>> w_rows_;    // per row i
  std::vector<std::vector<Index>> phi_blocks_;  // per location i

  std::vector<Matrix> local_design_;          // Z_i
  std::vector<Vector> local_target_;          // y_i over the sample
  std::vector<std::vector<Index>> local_cols_;  // Z_i column -> decision index
  Matrix gram_;                               // sum_i scatter(Z_i' Z_i)
};

/// Projects v onto {u >= 0, sum u <= radius} (radius >= 0).
void project_capped_simplex(Eigen::Ref<Vector> v, double radius);

}  // namespace stlasso
